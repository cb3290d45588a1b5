"""Reference cross-objective values used by ``icx reproduce`` for side-by-side comparison."""

PROBLEM_ORDER = ("P1", "P2", "P3", "P4", "P5", "P6")

# name -> (nodes, links)
NETWORK_SIZES = {
    "rhesus-monkey": (16, 111),
    "high-tech": (21, 232),
    "bison": (26, 314),
}

# rows: objective of problem p; columns: evaluated at the optimal solution of problem q
CROSS_OBJECTIVES = {
    "rhesus-monkey": [
        [7.4838, 9.5436, 61.7243, 155.2115, 14.8129, 18.4516],
        [3.1312, 1.8597, 6.0634, 19.3768, 4.3120, 9.1841],
        [2.5593, 0.7894, 0.6091, 7.6046, 2.5593, 8.5505],
        [112.9506, 113.8430, 104.7592, 76.4015, 113.2091, 123.9184],
        [3.0, 15.0, 16.0, 16.0, 3.0, 8.0],
        [11.0, 69.0, 111.0, 111.0, 16.0, 11.0],
    ],
    "high-tech": [
        [7.6652, 11.3575, 78.2698, 330.1895, 29.8715, 16.2246],
        [3.6263, 1.7079, 5.2441, 31.3891, 6.1077, 11.0225],
        [3.1266, 0.5505, 0.3564, 10.8915, 3.1266, 10.8300],
        [231.6782, 231.8134, 226.6423, 140.6115, 231.4700, 240.2376],
        [4.0, 21.0, 21.0, 21.0, 4.0, 6.0],
        [11.0, 103.0, 232.0, 232.0, 37.0, 11.0],
    ],
    "bison": [
        [9.7070, 12.8607, 276.5547, 464.8477, 80.8821, 39.0658],
        [4.7889, 2.8468, 15.7666, 42.4710, 11.8447, 22.9597],
        [4.2933, 1.3231, 0.9119, 12.0516, 4.6204, 16.6946],
        [314.2816, 315.5194, 281.5060, 203.4237, 313.2941, 343.6404],
        [5.0, 24.0, 26.0, 26.0, 5.0, 8.0],
        [9.0, 54.0, 313.0, 313.0, 68.0, 9.0],
    ],
}
