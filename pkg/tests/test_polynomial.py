import math

import numpy as np
import pytest

from jiscat import (NonConvergence, OddCircleMultiplicity, RealPolynomial,
                    SymmetricLaurent, canonical_order, evaluate, find_roots,
                    pair_reciprocal, symmetric_product, to_lambda_polynomial)
from helpers import SQRT2, Z1_Q1

W_Q1 = RealPolynomial([2.0, -2.0, -0.5])
S_Q1 = RealPolynomial([-2.0, 1.5])
W_Q2 = RealPolynomial([2.0, -2.0, -0.5, -1.5])
S_Q2 = RealPolynomial([-2.0, 0.0, -1.5, 1.5])


# ===============
# RealPolynomial
# ===============

def test_trimmed_form():
    p = RealPolynomial([1.0, 2.0, 0.0, 0.0])
    assert p.degree() == 1
    assert RealPolynomial([]).is_zero()
    assert RealPolynomial([0.0, 0.0]).degree() == -1


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        RealPolynomial([1.0, float("nan")])


def test_arithmetic():
    p = RealPolynomial([1.0, 1.0])
    q = RealPolynomial([-1.0, 1.0])
    assert np.allclose((p * q).coeffs, [-1.0, 0.0, 1.0])
    assert np.allclose((p + q).coeffs, [0.0, 2.0])
    assert np.allclose((p - q).coeffs, [2.0])
    assert np.allclose(p.derivative().coeffs, [1.0])
    assert np.allclose(RealPolynomial([1.0, 2.0, 3.0]).reciprocal().coeffs, [3.0, 2.0, 1.0])


def test_from_roots_conjugates_real():
    p = RealPolynomial.from_roots([1j, -1j, 2.0])
    assert np.allclose(p.coeffs, [-2.0, 1.0, -2.0, 1.0])


# ========
# evaluate
# ========

def test_evaluate_examples():
    assert evaluate(W_Q1, 0.0) == 2.0
    assert abs(evaluate(W_Q1, Z1_Q1)) < 1e-12
    assert evaluate(W_Q2, -1.0) == pytest.approx(5.0, abs=1e-15)


def test_evaluate_conjugate_symmetry():
    rng = np.random.default_rng(3)
    p = RealPolynomial(rng.normal(size=8))
    z = complex(*rng.normal(size=2))
    assert evaluate(p, z.conjugate()) == evaluate(p, z).conjugate()


def test_evaluate_array():
    z = np.array([0.0, 1.0, -1.0])
    assert np.allclose(evaluate(W_Q1, z), [2.0, -0.5, 3.5])


# ==========
# find_roots
# ==========

def test_roots_of_z2_minus_1():
    r = np.sort_complex(find_roots(RealPolynomial([-1.0, 0.0, 1.0])))
    assert np.allclose(r, [-1.0, 1.0], atol=1e-14)


def test_roots_q1():
    r = sorted(find_roots(W_Q1).real)
    assert r[0] == pytest.approx(-2.0 - 2.0 * SQRT2, abs=1e-10)
    assert r[1] == pytest.approx(Z1_Q1, abs=1e-10)


def test_roots_q2():
    r = find_roots(W_Q2)
    real = [x for x in r if x.imag == 0.0]
    cplx = [x for x in r if x.imag != 0.0]
    assert len(real) == 1 and 0.65 < real[0].real < 0.67
    assert len(cplx) == 2 and cplx[0] == cplx[1].conjugate()
    assert abs(cplx[0]) == pytest.approx(math.sqrt(2.0), abs=1e-3)
    # monic form z**3 + z**2/3 + 4z/3 - 4/3 has root product 4/3
    assert np.prod(r).real == pytest.approx(4.0 / 3.0, abs=1e-12)


def test_roots_match_numpy_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c = rng.normal(size=rng.integers(3, 11))
        mine = np.sort_complex(find_roots(RealPolynomial(c)))
        ref = np.sort_complex(np.roots(c[::-1]))
        assert np.allclose(mine, ref, atol=1e-8)


def test_double_root_resolved():
    r = find_roots(RealPolynomial.from_roots([1.0, 1.0, 0.5]))
    assert np.allclose(np.sort(r.real), [0.5, 1.0, 1.0], atol=1e-10)
    assert np.all(r.imag == 0.0)


def test_zero_roots_and_budget():
    r = find_roots(RealPolynomial([0.0, 0.0, -1.0, 1.0]))
    assert np.allclose(np.sort(r.real), [0.0, 0.0, 1.0])
    rng = np.random.default_rng(1)
    with pytest.raises(NonConvergence):
        find_roots(RealPolynomial(rng.normal(size=10)), max_iter=1)


def test_roots_degree_zero_rejected():
    with pytest.raises(ValueError):
        find_roots(RealPolynomial([3.0]))


# ==================
# symmetric_product
# ==================

def test_symmetric_product_s_q1():
    L = symmetric_product(S_Q1, 0)
    assert np.allclose(L.coeffs, [6.25, -3.0], atol=0)


def test_unitarity_identity_q1():
    # w w~ + eta**2 = s s~ and, equivalently, s s~ - eta**2 = w w~
    assert np.array_equal(symmetric_product(W_Q1, +1).padded(3),
                          symmetric_product(S_Q1, 0).padded(3))
    assert np.array_equal(symmetric_product(S_Q1, -1).coeffs,
                          symmetric_product(W_Q1, 0).coeffs)
    assert np.allclose(symmetric_product(S_Q1, -1).coeffs, [8.25, -3.0, -1.0])


def test_one_plus_eta_squared():
    assert np.allclose(symmetric_product(RealPolynomial([1.0]), +1).coeffs, [-1.0, 0.0, 1.0])


def test_symmetric_laurent_symmetry():
    L = symmetric_product(W_Q2, 0)
    z = 0.3 + 0.7j
    assert L(z) == pytest.approx(L(1.0 / z), rel=1e-13)
    assert abs(L(np.exp(0.4j)).imag) < 1e-13


# ====================
# to_lambda_polynomial
# ====================

def test_lambda_examples():
    assert np.allclose(to_lambda_polynomial(SymmetricLaurent([-2.0, 0.0, 1.0])).coeffs,
                       [-4.0, 0.0, 1.0])
    assert np.allclose(to_lambda_polynomial(symmetric_product(S_Q1, 0)).coeffs, [6.25, -3.0])
    assert np.allclose(to_lambda_polynomial(SymmetricLaurent([1.0])).coeffs, [1.0])


def test_lambda_high_degree():
    rng = np.random.default_rng(5)
    L = SymmetricLaurent(rng.normal(size=6))
    P = to_lambda_polynomial(L)
    for z in (0.4 + 0.2j, np.exp(1.1j), -1.7):
        assert P(z + 1.0 / z) == pytest.approx(L(z), rel=1e-10)


# ===============
# pair_reciprocal
# ===============

def test_pairing_s_q1():
    P = pair_reciprocal(symmetric_product(S_Q1, 0))
    assert len(P.pairs) == 1
    assert P.pairs[0].t == pytest.approx(0.75, abs=1e-12)
    assert P.pairs[0].partner == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert np.allclose(P.canonical_list, [0.75])


def test_pairing_s_q2():
    P = pair_reciprocal(symmetric_product(S_Q2, 0))
    assert P.m == 3 and len(P.pairs) == 3
    zeros = np.roots(S_Q2.coeffs[::-1])
    expected = sorted((z if abs(z) < 1 else 1.0 / z for z in zeros), key=abs)
    t = P.canonical_list
    # the real entry comes first by modulus, then the conjugate pair
    assert t[0].imag == 0.0
    assert t[0] == pytest.approx(expected[0], abs=1e-10)
    assert t[0].real == pytest.approx(0.64395, abs=1e-5)
    assert abs(t[1]) == pytest.approx(0.92661, abs=1e-5)
    assert t[1] == pytest.approx(t[2].conjugate(), abs=1e-14)
    # nondecreasing argument in [0, 2 pi): upper half plane first
    assert t[1].imag > 0


def test_pairing_double_zero_at_one():
    P = pair_reciprocal(symmetric_product(RealPolynomial([-1.0, 1.0]), 0))
    assert len(P.pairs) == 1
    pr = P.pairs[0]
    assert pr.on_circle and pr.multiplicity == 1
    assert pr.t == pytest.approx(1.0, abs=1e-12)
    assert pr.partner == pytest.approx(1.0, abs=1e-12)


def test_pairing_odd_circle_multiplicity():
    with pytest.raises(OddCircleMultiplicity):
        pair_reciprocal(SymmetricLaurent([0.0, 1.0]))


def test_pairing_zero_multiset():
    P = pair_reciprocal(symmetric_product(W_Q2, 0))
    ref = np.roots(symmetric_product(W_Q2, 0).to_polynomial().coeffs[::-1])
    assert np.allclose(np.sort_complex(P.zeros()), np.sort_complex(ref), atol=1e-9)


def test_canonical_order_rule():
    vals = [0.5j, 0.5, -0.5, 0.3 - 0.1j, 0.3 + 0.1j]
    out = [vals[k] for k in canonical_order(vals)]
    assert out[0] == 0.3 + 0.1j and out[1] == 0.3 - 0.1j
    assert out[2:] == [0.5, 0.5j, -0.5]


def test_roots_do_not_stall_on_near_collisions():
    # two approximations once froze next to each other away from any root
    w = RealPolynomial([18.204444444444444, -8.533333333333333, 17.204444444444444,
                        -8.064583333333333, 16.259376085069444])
    r = find_roots(w)
    assert np.allclose(np.sort_complex(r), np.sort_complex(np.roots(w.coeffs[::-1])),
                       atol=1e-10)


def test_double_circle_zero_merged():
    # s has simple zeros on the circle, so s s~ has double ones there
    s = RealPolynomial([0.0, 1.0, 0.0, 0.5, 0.0, 1.0])
    P = pair_reciprocal(symmetric_product(s, 0))
    assert P.m == 4
    assert all(abs(abs(t) - 1.0) < 1e-12 for t in P.canonical_list)
    assert [pr.multiplicity for pr in P.pairs] == [2, 2]


def test_fourfold_zero_at_one():
    # w(1) = 0 and a double zero of s at 1
    s = RealPolynomial([-1.0, 1.0, 0.0, 1.0, -1.0])
    P = pair_reciprocal(symmetric_product(s, 0))
    assert P.canonical_list[:2] == (1.0, 1.0)
    assert P.pairs[0].multiplicity == 2
