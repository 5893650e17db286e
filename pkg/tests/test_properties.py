import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from jiscat import (ClassError, RealPolynomial, ScatteringData, SymmetricLaurent,
                    canonical_zero_list, classify, find_roots, lambda_consistency,
                    normalize, pair_reciprocal, recover_s, recover_w, sigma_of,
                    spectrum, symmetric_product, to_lambda_polynomial,
                    unitarity_residual, wronskian_pair)

SETTINGS = settings(max_examples=60, deadline=None)

coef = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)

# Coefficients a hair away from the free values put a zero of s near 0 or
# send the top coefficient of w towards 0; both are ill-posed in binary64.
# The free values themselves are drawn exactly.
a_entry = st.one_of(st.just(1.0), st.floats(0.2, 2.0).filter(lambda x: abs(x - 1.0) >= 1e-3))
b_entry = st.one_of(st.just(0.0), coef.filter(lambda x: abs(x) >= 1e-3))


@st.composite
def sequences(draw, p_min=1, p_max=4):
    p = draw(st.integers(p_min, p_max))
    a = draw(st.lists(a_entry, min_size=p, max_size=p))
    b = draw(st.lists(b_entry, min_size=p, max_size=p))
    offset = draw(st.integers(-3, 3))
    return normalize(a, b, offset)


def _pair(q):
    try:
        return wronskian_pair(q)
    except ClassError:
        # accidental cancellation of a top coefficient
        assume(False)


def _close(x, y, tol):
    n = max(len(x), len(y))
    return float(np.max(np.abs(x.padded(n) - y.padded(n)))) <= tol


@SETTINGS
@given(sequences())
def test_forward_pair_is_unitary(q):
    assume(not q.is_free())
    w, s = _pair(q)
    rep = unitarity_residual(w, s, 64)
    assert rep.coefficient_residual <= 1e-12 * max(1.0, w.max_abs(), s.max_abs()) ** 2
    assert rep.max_det_defect < 1e-9


@SETTINGS
@given(sequences())
def test_forward_degrees(q):
    assume(not q.is_free())
    w, s = _pair(q)
    c = classify(q)
    assert w.degree() == max(c.m, 2)
    assert s.degree() == c.m + c.nu
    assert w(0.0) > 0.0


@SETTINGS
@given(sequences(), st.integers(-5, 5))
def test_forward_translation_invariant(q, k):
    assume(not q.is_free())
    w, s = _pair(q)
    w2, s2 = wronskian_pair(q.shifted(k))
    assert np.array_equal(w.coeffs, w2.coeffs) and np.array_equal(s.coeffs, s2.coeffs)


@SETTINGS
@given(sequences())
def test_lambda_form_holds(q):
    assume(not q.is_free())
    w, s = _pair(q)
    assume(max(w.max_abs(), s.max_abs()) < 1e3)
    assert lambda_consistency(s, w)["max"] < 1e-8


@SETTINGS
@given(sequences(p_min=2))
def test_roundtrip_both_ways(q):
    assume(not q.is_free())
    w, s = _pair(q)
    assume(classify(q).m >= 3 and max(w.max_abs(), s.max_abs()) < 1e3)
    bs, _ = spectrum(w)
    assert _close(recover_w(ScatteringData.from_s(s, bs)), w, 1e-7)
    sig = sigma_of(s, canonical_zero_list(w))
    assert _close(recover_s(w, sig, nu=classify(q).nu).s, s, 1e-7)


@SETTINGS
@given(st.lists(coef, min_size=3, max_size=8))
def test_roots_match_numpy(c):
    c[-1] = 1.0 if abs(c[-1]) < 0.1 else c[-1]
    p = RealPolynomial(c)
    mine = find_roots(p)
    assert len(mine) == p.degree()
    scale = np.sum(np.abs(c)) * max(1.0, np.max(np.abs(mine))) ** p.degree()
    assert np.allclose(p(mine), 0.0, atol=1e-7 * scale)
    ref = np.roots(p.coeffs[::-1])
    assert np.allclose(np.sort(np.abs(mine)), np.sort(np.abs(ref)), atol=1e-5)


@SETTINGS
@given(st.lists(st.floats(0.3, 3.0), min_size=1, max_size=4),
       st.lists(st.sampled_from([-1.0, 1.0]), min_size=4, max_size=4))
def test_pairing_reciprocal(mods, signs):
    roots = [m * sg for m, sg in zip(mods, signs)]
    assume(all(abs(abs(r) - 1.0) > 0.05 for r in roots))
    assume(all(abs(x - y) > 0.05 for i, x in enumerate(roots) for y in roots[:i]))
    f = RealPolynomial.from_roots(roots)
    P = pair_reciprocal(symmetric_product(f, 0))
    assert P.m == len(roots)
    for pr in P.pairs:
        assert abs(pr.t) <= 1.0
        assert pr.t * pr.partner == pytest.approx(1.0, abs=1e-8)
    expect = sorted(r if abs(r) < 1 else 1.0 / r for r in roots)
    assert np.allclose(sorted(np.real(P.canonical_list)), expect, atol=1e-8)


@SETTINGS
@given(st.lists(coef, min_size=1, max_size=7), st.floats(0.1, 6.2))
def test_lambda_change_of_variable(c, theta):
    L = SymmetricLaurent(c)
    P = to_lambda_polynomial(L)
    for z in (np.exp(1j * theta), 0.7 * np.exp(1j * theta)):
        assert P(z + 1.0 / z) == pytest.approx(L(z), rel=1e-9, abs=1e-9)


@SETTINGS
@given(st.lists(coef, min_size=1, max_size=6), st.floats(0.0, 6.3))
def test_symmetric_product_real_on_circle(c, theta):
    f = RealPolynomial(c)
    assume(not f.is_zero())
    L = symmetric_product(f, 0)
    z = np.exp(1j * theta)
    assert L(z).real == pytest.approx(abs(f(z)) ** 2, rel=1e-9, abs=1e-12)
