"""Published values for the three-variable quadratic test problem.

Component functions are stored as {subset: {exponents: coefficient}} with
0-based subsets and exponents aligned to the subset.
"""

from fractions import Fraction as F

CORRELATIONS = {
    1: (0.0, 0.0, 0.0),
    2: (0.2, 0.2, 0.2),
    3: (0.2, 0.4, 0.8),
    4: (-0.2, 0.4, -0.8),
}

MEAN = {1: F(12), 2: F(63, 5), 3: F(67, 5), 4: F(57, 5)}
VARIANCE = {1: F(51), 2: F(1794, 25), 3: F(2514, 25), 4: F(774, 25)}


def _uni(c):
    return {(0,): -c, (1,): F(4), (2,): c}


def _bi(c0, c2):
    return {(0, 0): c0, (2, 0): c2, (1, 1): F(1), (0, 2): c2}


COMPONENTS = {
    1: {(0,): {(1,): F(4)}, (1,): {(1,): F(4)}, (2,): {(1,): F(4)},
        (0, 1): {(1, 1): F(1)}, (0, 2): {(1, 1): F(1)}, (1, 2): {(1, 1): F(1)}},
    2: {(0,): _uni(F(5, 13)), (1,): _uni(F(5, 13)), (2,): _uni(F(5, 13)),
        (0, 1): _bi(F(12, 65), -F(5, 26)), (0, 2): _bi(F(12, 65), -F(5, 26)),
        (1, 2): _bi(F(12, 65), -F(5, 26))},
    3: {(0,): _uni(F(405, 754)), (1,): _uni(F(725, 1066)), (2,): _uni(F(990, 1189)),
        (0, 1): _bi(F(12, 65), -F(5, 26)), (0, 2): _bi(F(42, 145), -F(10, 29)),
        (1, 2): _bi(F(36, 205), -F(20, 41))},
    4: {(0,): _uni(F(115, 754)), (1,): _uni(-F(725, 1066)), (2,): _uni(-F(170, 1189)),
        (0, 1): _bi(-F(12, 65), F(5, 26)), (0, 2): _bi(F(42, 145), -F(10, 29)),
        (1, 2): _bi(-F(36, 205), F(20, 41))},
}

# (S_uv, S_uc, S_u) for {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}
SUBSETS = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
TRIPLETS = {
    1: [(0.313725, 0, 0.313725)] * 3 + [(0.019608, 0, 0.019608)] * 3 + [(0, 0, 0)],
    2: [(0.227088, 0.089780, 0.316868)] * 3 + [(0.012349, 0.004116, 0.016465)] * 3
       + [(0, 0, 0)],
    3: [(0.164847, 0.096992, 0.261839), (0.168309, 0.165600, 0.333909),
        (0.172897, 0.202314, 0.375211), (0.008812, 0.008812, 0.017624),
        (0.006049, 0.004321, 0.010370), (0.000786, 0.000262, 0.001048), (0, 0, 0)],
    4: [(0.518299, 0.103039, 0.621337), (0.546677, -0.509771, 0.036905),
        (0.518116, -0.201389, 0.316728), (0.028623, -0.014311, 0.014311),
        (0.019647, -0.014034, 0.005614), (0.002553, 0.002553, 0.005105), (0, 0, 0)],
}
# column sums; the Case 3 entries are published to four decimals only
COLUMN_SUMS = {1: (1, 0, 1), 2: (0.718312, 0.281688, 1), 3: (0.5217, 0.4783, 1),
               4: (1.63391, -0.63391, 1)}
COLUMN_SUM_TOL = {1: 1e-6, 2: 1e-6, 3: 5e-5, 4: 5e-6}
# exact Case 4 sums of S_uv and S_uc, from rational moment arithmetic
EXACT_CASE4_SUMS = (33572060331 / 20547021014, 1 - 33572060331 / 20547021014)

TOTAL_EFFECTS = {
    1: ((0.352941,) * 3, None),
    2: ((0.349798,) * 3, None),
    3: ((0.289833, 0.352581, 0.386628), (3, 2, 1)),
    4: ((0.641262, 0.056322, 0.327446), (1, 3, 2)),
}
