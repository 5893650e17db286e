"""Shared fixtures: named perturbations and the seeded random ensemble."""

import math

import numpy as np

from jiscat import normalize

SQRT2 = math.sqrt(2.0)
Z1_Q1 = 2.0 * SQRT2 - 2.0

ENSEMBLE_SEED = 20261016
ENSEMBLE_P = (2, 3, 4, 5)
ENSEMBLE_COUNT = 100


def q0():
    return normalize([], [], 0)


def q1():
    return normalize([0.5], [1.0], 1)


def q2():
    return normalize([1.0, 0.5], [1.0, 0.0], 1)


def q_w_at_one():
    # p = 2 member whose w vanishes at z = 1
    return normalize([1.0, 0.5], [0.5, -0.25], 1)


def p2_case(k):
    """
    One perturbation for each of the four p = 2 sub-cases.

    1: a2 != 1, b1 != 0;  2: a2 = 1, b1 = 0;  3: a2 = 1, b1, b2 != 0;
    4: a2 != 1, b1 = 0.
    """
    a, b = {1: ([1.0, 0.5], [1.0, 0.0]),
            2: ([0.5, 1.0], [0.0, 0.7]),
            3: ([0.5, 1.0], [1.0, 0.7]),
            4: ([0.5, 0.8], [0.0, 0.7])}[k]
    return normalize(a, b, 1), a, b


def p2_formula(k, a, b):
    """Closed-form ``(w, s)`` coefficient lists for the p = 2 sub-cases."""
    a1, a2 = a
    b1, b2 = b
    c1, c2 = 1 - a1 ** 2, 1 - a2 ** 2
    if k == 1:
        d = a1 * a2
        w = [1, -(b1 + b2), c2 - a1 ** 2 + b1 * b2, -c2 * b1]
        s = [-b1, c1 + b1 * b2, -(b2 + b1 * c2), c2]
    elif k == 2:
        d = a1
        w = [1, -b2, -a1 ** 2]
        s = [0, c1, -b2]
    elif k == 3:
        d = a1
        w = [1, -(b1 + b2), b1 * b2 - a1 ** 2]
        s = [-b1, c1 + b1 * b2, -b2]
    else:
        d = a1 * a2
        w = [1, -b2, c2 - a1 ** 2]
        s = [0, c1, -b2, c2]
    return [x / d for x in w], [x / d for x in s]


def ensemble(p_values=ENSEMBLE_P, count=ENSEMBLE_COUNT, seed=ENSEMBLE_SEED):
    """Members with ``a_n`` uniform on [0.2, 2] and ``b_n`` on [-2, 2], window 1..p."""
    rng = np.random.default_rng(seed)
    out = []
    for p in p_values:
        for _ in range(count):
            a = rng.uniform(0.2, 2.0, p)
            b = rng.uniform(-2.0, 2.0, p)
            out.append(normalize(a, b, 1))
    return out


def max_coeff_diff(f, g):
    n = max(len(f), len(g))
    return float(np.max(np.abs(f.padded(n) - g.padded(n)))) if n else 0.0
