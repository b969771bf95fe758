"""Literature (t, E, sigma) energy rows used as fit oracles.

Lithium: 18550 paths, h = 1/30.  Beryllium: 7000 paths, h = 1/30.
"""
LITHIUM = [
    (8, -7.478927, 28e-6), (16, -7.478519, 18e-6), (24, -7.478380, 14e-6),
    (32, -7.478294, 12e-6), (40, -7.478244, 10e-6), (48, -7.478215, 9e-6),
    (56, -7.478194, 9e-6), (64, -7.478176, 8e-6), (72, -7.478166, 7e-6),
    (80, -7.478157, 7e-6),
]
BERYLLIUM = [
    (8, -14.66946, 14e-5), (16, -14.66822, 11e-5), (24, -14.66782, 10e-5),
    (32, -14.66762, 9e-5), (40, -14.66750, 8e-5), (48, -14.66745, 7e-5),
    (56, -14.66734, 7e-5), (64, -14.66729, 6e-5), (72, -14.66721, 6e-5),
    (80, -14.66719, 6e-5),
]
