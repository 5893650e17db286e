"""
Real polynomials, symmetric Laurent polynomials and reciprocal root pairing.

Coefficients are always stored in ascending power order, ``coeffs[k]``
multiplies ``z**k``.  A symmetric Laurent polynomial is stored by its centre
and upper half, ``L(z) = c[0] + sum_k c[k] (z**k + z**-k)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NonConvergence, OddCircleMultiplicity, UnpairedRoot

__all__ = [
    "RealPolynomial",
    "SymmetricLaurent",
    "ReciprocalPair",
    "ReciprocalPairing",
    "evaluate",
    "find_roots",
    "symmetric_product",
    "to_lambda_polynomial",
    "pair_reciprocal",
    "canonical_order",
]

_EPS = np.finfo(float).eps


def _trim(c, tol=0.0):
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return c
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return c[:0]
    cut = tol * scale
    k = c.size
    while k > 0 and abs(c[k - 1]) <= cut:
        k -= 1
    return c[:k]


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ===============
# Real polynomial
# ===============

class RealPolynomial:
    """
    Polynomial with real coefficients in ascending power order.

    The stored array is trimmed so that the highest stored coefficient is
    nonzero; the zero polynomial has an empty coefficient array and degree -1.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, ``coeffs[k]`` multiplies ``z**k``.
    trim_tol : float, default=0.0
        Trailing coefficients with ``|c_k| <= trim_tol * max|c|`` are dropped.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=(), trim_tol=0.0):
        c = np.array(coeffs, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        self._c = _readonly(_trim(c, trim_tol))

    @classmethod
    def from_roots(cls, roots, leading=1.0, imag_tol=1e-8):
        """Expand ``leading * prod(z - r)``; the roots must be conjugate closed."""
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, np.array([-complex(r), 1.0]))
        scale = max(1.0, float(np.max(np.abs(c))))
        if np.max(np.abs(c.imag)) > imag_tol * scale:
            raise ValueError("roots are not closed under conjugation")
        return cls(leading * c.real)

    @property
    def coeffs(self):
        return self._c

    def degree(self):
        return self._c.size - 1

    def is_zero(self):
        return self._c.size == 0

    @property
    def leading(self):
        return float(self._c[-1]) if self._c.size else 0.0

    def valuation(self):
        """Order of the zero at the origin."""
        nz = np.flatnonzero(self._c)
        return int(nz[0]) if nz.size else 0

    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self):
        if self._c.size <= 1:
            return RealPolynomial()
        return RealPolynomial(self._c[1:] * np.arange(1, self._c.size))

    def shift(self, k):
        """Multiply by ``z**k`` (k >= 0) or divide exactly (k < 0)."""
        if k >= 0:
            return RealPolynomial(np.concatenate([np.zeros(k), self._c]))
        if np.any(self._c[:-k] != 0.0):
            raise ValueError("division by z**%d is not exact" % -k)
        return RealPolynomial(self._c[-k:])

    def reciprocal(self):
        """``z**deg * p(1/z)``, the coefficient reversal."""
        return RealPolynomial(self._c[::-1])

    def padded(self, length):
        out = np.zeros(max(length, self._c.size))
        out[: self._c.size] = self._c
        return out

    def max_abs(self):
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def __neg__(self):
        return RealPolynomial(-self._c)

    def __add__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial([float(other)])
        n = max(self._c.size, other._c.size)
        return RealPolynomial(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial([float(other)])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            if self.is_zero() or other.is_zero():
                return RealPolynomial()
            return RealPolynomial(np.convolve(self._c, other._c))
        return RealPolynomial(self._c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return RealPolynomial(self._c / float(scalar))

    def __len__(self):
        return self._c.size

    def __iter__(self):
        return iter(self._c.tolist())

    def __repr__(self):
        return "RealPolynomial(%s)" % np.array2string(
            self._c, precision=17, separator=", ")

    def tolist(self):
        return self._c.tolist()


def evaluate(p, z):
    """
    Evaluate a real polynomial by Horner's scheme.

    ``z`` may be a scalar or an array.  With real coefficients the scheme is
    exactly conjugation symmetric, ``evaluate(p, conj(z)) == conj(evaluate(p, z))``.
    """
    c = p.coeffs if isinstance(p, RealPolynomial) else np.asarray(p, float)
    if np.ndim(z) == 0:
        acc = 0.0 * z
        for ck in c[::-1]:
            acc = acc * z + ck
        return acc
    z = np.asarray(z)
    acc = np.zeros_like(z, dtype=np.result_type(z, float))
    for ck in c[::-1]:
        acc = acc * z + ck
    return acc


def _horner_with_derivative(c, z):
    p = 0j
    dp = 0j
    for ck in c[::-1]:
        dp = dp * z + p
        p = p * z + ck
    return p, dp


# ============
# Root finding
# ============

def _upper_hull(points):
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _initial_guesses(c):
    # Newton polygon radii: one circle per edge of the upper convex hull of
    # (k, log|c_k|), with as many points as the edge is wide.
    n = c.size - 1
    pts = [(k, math.log(abs(c[k]))) for k in range(n + 1) if c[k] != 0.0]
    hull = _upper_hull(pts)
    z = []
    for (i, li), (j, lj) in zip(hull[:-1], hull[1:]):
        r = math.exp((li - lj) / (j - i))
        cnt = j - i
        for k in range(cnt):
            ang = 2.0 * math.pi * k / cnt + 2.0 * math.pi * i / n + 0.4
            z.append(r * cmath.exp(1j * ang))
    return z


_STALL = 1e-3


def _aberth(c, tol, max_iter):
    n = c.size - 1
    z = _initial_guesses(c)
    absc = np.abs(c)
    done = [False] * n
    for _ in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p, dp = _horner_with_derivative(c, zi)
            bound = 4.0 * (n + 1) * _EPS * float(evaluate(absc, abs(zi)))
            if abs(p) <= bound:
                done[i] = True
                continue
            if dp == 0:
                ratio = p / (bound + _EPS)
            else:
                ratio = p / dp
            acc = 0j
            for j in range(n):
                if j != i:
                    d = zi - z[j]
                    if d != 0:
                        acc += 1.0 / d
            corr = ratio / (1.0 - ratio * acc)
            z[i] = zi - corr
            # two nearby approximations shrink each other's step; a small
            # step counts only where the Newton ratio is small as well
            if abs(corr) <= tol * max(abs(z[i]), _EPS) and \
                    abs(ratio) <= _STALL * max(abs(zi), 1.0):
                done[i] = True
        if all(done):
            return z
    raise NonConvergence(
        "Aberth iteration did not converge in %d iterations" % max_iter)


def _newton_polish(c, z, cluster_tol):
    out = list(z)
    for i, zi in enumerate(out):
        isolated = all(abs(zi - zj) > cluster_tol * max(1.0, abs(zi))
                       for j, zj in enumerate(out) if j != i)
        if not isolated:
            continue
        p, dp = _horner_with_derivative(c, zi)
        for _ in range(3):
            if dp == 0:
                break
            cand = zi - p / dp
            pc, dpc = _horner_with_derivative(c, cand)
            if abs(pc) >= abs(p):
                break
            zi, p, dp = cand, pc, dpc
        out[i] = zi
    return out


def _group(z, radius):
    label = list(range(len(z)))
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            if abs(z[i] - z[j]) <= radius * max(1.0, abs(z[i])):
                old, new = label[j], label[i]
                label = [new if x == old else x for x in label]
    groups = {}
    for i, lb in enumerate(label):
        groups.setdefault(lb, []).append(i)
    return [g for g in groups.values() if len(g) > 1]


def _multiple_root(c, zs):
    # a k-fold root is a simple root of the (k-1)-th derivative
    k = len(zs)
    d = np.asarray(c, dtype=float)
    for _ in range(k - 1):
        d = d[1:] * np.arange(1, d.size)
    x = complex(np.mean(zs))
    p, dp = _horner_with_derivative(d, x)
    for _ in range(8):
        if dp == 0 or p == 0:
            break
        cand = x - p / dp
        pc, dpc = _horner_with_derivative(d, cand)
        if abs(pc) >= abs(p):
            break
        x, p, dp = cand, pc, dpc
    return x


def _refine_clusters(c, z, cluster_tol, verify_radius=1e-5, verify_rel=1e-13):
    # A k-fold root is only resolved to about eps**(1/k) by simultaneous
    # iteration.  Roots within cluster_tol are merged outright; roots within
    # verify_radius only if p nearly vanishes at the merged point.
    z = list(z)
    merged = set()
    for idx in _group(z, cluster_tol):
        x = _multiple_root(c, [z[i] for i in idx])
        for i in idx:
            z[i] = x
            merged.add(i)
    for idx in _group(z, verify_radius):
        if all(i in merged for i in idx) and len({z[i] for i in idx}) == 1:
            continue
        x = _multiple_root(c, [z[i] for i in idx])
        scale = float(np.sum(np.abs(c) * max(1.0, abs(x)) ** np.arange(len(c))))
        if abs(_horner_with_derivative(c, x)[0]) <= verify_rel * scale:
            for i in idx:
                z[i] = x
    return z


def _enforce_conjugates(z, tol):
    real, upper, lower = [], [], []
    for r in z:
        if abs(r.imag) <= tol * max(1.0, abs(r)):
            real.append(complex(r.real, 0.0))
        elif r.imag > 0:
            upper.append(r)
        else:
            lower.append(r)
    cand = sorted((abs(u - l.conjugate()), i, j)
                  for i, u in enumerate(upper) for j, l in enumerate(lower))
    used_u, used_l = set(), set()
    out = list(real)
    for _, i, j in cand:
        if i in used_u or j in used_l:
            continue
        used_u.add(i)
        used_l.add(j)
        m = 0.5 * (upper[i] + lower[j].conjugate())
        out.extend([m, m.conjugate()])
    # unmatched leftovers can only be numerically real roots
    out.extend(complex(u.real, 0.0) for i, u in enumerate(upper) if i not in used_u)
    out.extend(complex(l.real, 0.0) for j, l in enumerate(lower) if j not in used_l)
    return out


def find_roots(p, tol=1e-12, max_iter=200, cluster_tol=1e-7):
    """
    All complex roots of a real polynomial, with multiplicity.

    Simultaneous Aberth-Ehrlich iteration from Newton-polygon initial
    guesses, followed by a Newton polish of isolated roots.  Roots closer
    than ``cluster_tol`` are merged into one multiple root, refined as a
    simple root of the matching derivative.  Conjugate
    symmetry is restored afterwards and roots within ``tol`` of the real
    axis are made exactly real.

    Parameters
    ----------
    p : RealPolynomial
        Polynomial of degree >= 1.
    tol : float, default=1e-12
        Relative step size at which a root counts as converged; also the
        relative distance to the real axis below which a root is snapped.
    max_iter : int, default=200
    cluster_tol : float, default=1e-7

    Returns
    -------
    numpy.ndarray
        Complex array of length ``p.degree()``, sorted by modulus.

    Raises
    ------
    NonConvergence
        If the iteration budget is exhausted.
    """
    if not isinstance(p, RealPolynomial):
        p = RealPolynomial(p)
    if p.degree() < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    c = p.coeffs
    nzero = p.valuation()
    c = c[nzero:]
    roots = [0j] * nzero
    n = c.size - 1
    if n == 1:
        roots.append(complex(-c[0] / c[1], 0.0))
    elif n >= 2:
        z = _aberth(c / c[-1], tol, max_iter)
        z = _newton_polish(c, z, cluster_tol)
        z = _refine_clusters(c, z, cluster_tol)
        roots.extend(_enforce_conjugates(z, tol))
    roots = np.array(roots, dtype=complex)
    return roots[np.lexsort((np.angle(roots), np.abs(roots)))]


# ============================
# Symmetric Laurent polynomial
# ============================

class SymmetricLaurent:
    """
    ``L(z) = c[0] + sum_{k=1..m} c[k] (z**k + z**-k)``.

    Symmetry ``L(z) = L(1/z)`` holds by construction and ``L`` is real on
    the unit circle.
    """

    __slots__ = ("_c",)

    def __init__(self, center_and_up=(), trim_tol=0.0):
        c = np.array(center_and_up, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        self._c = _readonly(_trim(c, trim_tol))

    @property
    def coeffs(self):
        return self._c

    def degree(self):
        return self._c.size - 1

    def is_zero(self):
        return self._c.size == 0

    def __call__(self, z):
        z = np.asarray(z, dtype=complex) if np.ndim(z) else complex(z)
        acc = self._c[0] if self._c.size else 0.0
        zk = 1.0
        for k in range(1, self._c.size):
            zk = zk * z
            acc = acc + self._c[k] * (zk + 1.0 / zk)
        return acc

    def to_polynomial(self):
        """Ascending coefficients of ``z**m L(z)``, degree ``2m``."""
        c = self._c
        return RealPolynomial(np.concatenate([c[::-1], c[1:]]))

    def padded(self, length):
        out = np.zeros(max(length, self._c.size))
        out[: self._c.size] = self._c
        return out

    def __sub__(self, other):
        n = max(self._c.size, other._c.size)
        return SymmetricLaurent(self.padded(n) - other.padded(n))

    def __add__(self, other):
        n = max(self._c.size, other._c.size)
        return SymmetricLaurent(self.padded(n) + other.padded(n))

    def __repr__(self):
        return "SymmetricLaurent(%s)" % np.array2string(
            self._c, precision=17, separator=", ")


def exact_symmetric_coeffs(f, eta_sign=0):
    """
    Exact ``Fraction`` coefficients of ``f f~ + eta_sign * eta**2``.

    Returns the centre coefficient followed by the upper ones.
    """
    fr = [Fraction(float(x)) for x in f]
    d = len(fr) - 1
    c = [sum((fr[i] * fr[i + k] for i in range(d + 1 - k)), Fraction(0))
         for k in range(d + 1)]
    if eta_sign:
        c += [Fraction(0)] * max(0, 3 - len(c))
        c[0] -= 2 * eta_sign
        c[2] += eta_sign
    return c


def symmetric_product(f, eta_sign=0, trim_tol=1e-12):
    """
    ``f(z) f(1/z) + eta_sign * eta(z)**2`` with ``eta = z - 1/z``.

    The convolution is carried out exactly on the binary64 inputs and each
    coefficient is rounded once.  Top coefficients below
    ``trim_tol * max|c|`` are treated as cancelled.
    """
    if not isinstance(f, RealPolynomial):
        f = RealPolynomial(f)
    if eta_sign not in (-1, 0, 1):
        raise ValueError("eta_sign must be -1, 0 or +1")
    if f.is_zero():
        c = [Fraction(0)]
        if eta_sign:
            c = [Fraction(-2 * eta_sign), Fraction(0), Fraction(eta_sign)]
    else:
        c = exact_symmetric_coeffs(f.coeffs, eta_sign)
    return SymmetricLaurent([float(x) for x in c], trim_tol=trim_tol)


def functional_residual(w, s):
    """
    Coefficients of ``w w~ + eta**2 - s s~`` computed exactly then rounded.
    """
    if s.is_zero():
        left = [Fraction(0)]
    else:
        left = exact_symmetric_coeffs(s.coeffs)
    right = exact_symmetric_coeffs(w.coeffs, +1)
    n = max(len(left), len(right))
    left += [Fraction(0)] * (n - len(left))
    right += [Fraction(0)] * (n - len(right))
    return np.array([float(r - l) for l, r in zip(left, right)])


def to_lambda_polynomial(L):
    """
    The polynomial ``P`` with ``P(z + 1/z) = L(z)``.

    Uses ``D_k(lam) = z**k + z**-k`` from ``D_0 = 2, D_1 = lam,
    D_{k+1} = lam D_k - D_{k-1}``.
    """
    c = L.coeffs
    if c.size == 0:
        return RealPolynomial()
    out = np.zeros(c.size)
    out[0] = c[0]
    d_prev = np.array([2.0])
    d_cur = np.array([0.0, 1.0])
    for k in range(1, c.size):
        out[: d_cur.size] += c[k] * d_cur
        nxt = np.zeros(d_cur.size + 1)
        nxt[1:] = d_cur
        nxt[: d_prev.size] -= d_prev
        d_prev, d_cur = d_cur, nxt
    return RealPolynomial(out)


# ==================
# Reciprocal pairing
# ==================

@dataclass(frozen=True)
class ReciprocalPair:
    """A zero ``t`` of a symmetric Laurent polynomial together with ``1/t``.

    ``t`` is the member in the open unit disk, or on the closed upper unit
    semicircle.  The pair contributes ``multiplicity`` copies of both ``t``
    and ``1/t`` to the zero multiset.
    """
    t: complex
    multiplicity: int
    on_circle: bool

    @property
    def partner(self):
        return 1.0 / self.t


@dataclass(frozen=True)
class ReciprocalPairing:
    pairs: tuple
    canonical_list: tuple

    @property
    def m(self):
        return len(self.canonical_list)

    def zeros(self):
        out = []
        for pr in self.pairs:
            out.extend([pr.t, pr.partner] * pr.multiplicity)
        return np.array(out, dtype=complex)


def _arg(t):
    a = cmath.phase(t)
    if a < 0:
        a += 2.0 * math.pi
    if a >= 2.0 * math.pi:
        a = 0.0
    return a


def canonical_order(values, sizes=None, mod_tol=1e-12):
    """
    Indices sorting ``values`` by modulus, then by argument in [0, 2pi).

    Moduli closer than ``mod_tol`` (relative) count as equal.  Remaining
    ties keep the order given by ``sizes`` (descending) and then insertion.
    """
    n = len(values)
    sizes = sizes if sizes is not None else [1] * n
    by_mod = sorted(range(n), key=lambda i: abs(values[i]))
    groups, cur = [], []
    for i in by_mod:
        if cur and abs(values[i]) - abs(values[cur[0]]) > mod_tol * max(1.0, abs(values[i])):
            groups.append(cur)
            cur = []
        cur.append(i)
    if cur:
        groups.append(cur)
    out = []
    for g in groups:
        out.extend(sorted(g, key=lambda i: (round(_arg(values[i]), 12), -sizes[i], i)))
    return out


def _deflate_unit_edges(poly, rel=1e-13):
    """
    Divide out double zeros at ``z = +-1`` while they persist.

    Zeros of a symmetric Laurent polynomial at ``+-1`` have even order;
    removing them exactly keeps high-order clusters away from the root
    finder.  Returns the quotient and the removed zeros.
    """
    c = poly.coeffs[::-1].copy()
    removed = []
    for e in (1.0, -1.0):
        while c.size > 3:
            scale = float(np.sum(np.abs(c)))
            q1 = np.zeros(c.size - 1)
            acc = 0.0
            for k in range(c.size - 1):
                acc = acc * e + c[k]
                q1[k] = acc
            r1 = acc * e + c[-1]
            acc = 0.0
            q2 = np.zeros(q1.size - 1)
            for k in range(q1.size - 1):
                acc = acc * e + q1[k]
                q2[k] = acc
            r2 = acc * e + q1[-1]
            if abs(r1) > rel * scale or abs(r2) > rel * scale:
                break
            c = q2
            removed += [complex(e), complex(e)]
    return RealPolynomial(c[::-1]), removed


def _merge_circle_splits(roots, circle_tol, radius):
    on = [i for i, r in enumerate(roots) if abs(abs(r) - 1.0) < circle_tol
          and abs(r.imag) > radius]
    label = {i: i for i in on}
    for a in on:
        for b in on:
            if a < b and abs(roots[a] - roots[b]) <= radius:
                old, new = label[b], label[a]
                label = {k: (new if v == old else v) for k, v in label.items()}
    groups = {}
    for i, lb in label.items():
        groups.setdefault(lb, []).append(i)
    out = list(roots)
    for idx in groups.values():
        if len(idx) > 1 and len(idx) % 2 == 0:
            m = complex(np.mean([roots[i] for i in idx]))
            for i in idx:
                out[i] = m / abs(m)
    return out


def pair_reciprocal(L, tol=1e-8, circle_tol=1e-9, cluster_tol=1e-7, root_tol=1e-12,
                    circle_merge=1e-5):
    """
    Group the zeros of a symmetric Laurent polynomial into pairs ``{t, 1/t}``.

    Parameters
    ----------
    L : SymmetricLaurent
        Nonzero, degree ``m >= 1``.
    tol : float, default=1e-8
        Acceptance bound on ``|t t' - 1|`` for a matched pair.
    circle_tol : float, default=1e-9
        Zeros with ``||t| - 1| < circle_tol`` are moved onto the circle.
    cluster_tol : float, default=1e-7
        Zeros closer than this are treated as one multiple zero.
    circle_merge : float, default=1e-5
        Even-sized groups of unit-circle zeros within this distance are
        merged; rounding splits an even-order circle zero along the circle.

    Returns
    -------
    ReciprocalPairing
        Pairs and the canonical list ``t_1..t_m`` ordered by modulus, then
        argument in [0, 2pi).

    Raises
    ------
    UnpairedRoot
        A zero has no reciprocal partner within ``tol``.
    OddCircleMultiplicity
        A zero on the unit circle (other than +-1) has odd multiplicity, so
        ``L`` cannot be of the form ``f(z) f(1/z)``.
    """
    if L.is_zero() or L.degree() < 1:
        raise ValueError("pair_reciprocal needs a nonzero L of degree >= 1")
    poly, edge = _deflate_unit_edges(L.to_polynomial())
    roots = list(edge)
    if poly.degree() >= 1:
        roots += [complex(r) for r in find_roots(poly, root_tol, cluster_tol=cluster_tol)]
    for i, r in enumerate(roots):
        if abs(abs(r) - 1.0) < circle_tol:
            roots[i] = r / abs(r)
    roots = _merge_circle_splits(roots, circle_tol, circle_merge)

    # greedy global matching on the reciprocity defect
    cand = sorted((abs(roots[i] * roots[j] - 1.0), i, j)
                  for i in range(len(roots)) for j in range(i + 1, len(roots)))
    used = set()
    matched = []
    for err, i, j in cand:
        if i in used or j in used:
            continue
        if err > tol:
            break
        used.update((i, j))
        matched.append((roots[i], roots[j]))
    if len(used) != len(roots):
        left = [roots[k] for k in range(len(roots)) if k not in used]
        raise UnpairedRoot("zeros without reciprocal partner: %s" % left)

    reps = []
    for a, b in matched:
        t = a if abs(a) < abs(b) else b
        if abs(abs(a) - abs(b)) <= cluster_tol or abs(abs(t) - 1.0) <= cluster_tol:
            # radially split multiple zero on the circle
            t = t / abs(t)
            if t.imag < 0:
                t = t.conjugate()
            if abs(t.imag) <= cluster_tol:
                t = complex(math.copysign(1.0, t.real), 0.0)
            reps.append((t, True))
        else:
            reps.append((t, False))

    # clusters of equal representatives
    clusters = []
    for t, circ in reps:
        for cl in clusters:
            if abs(cl[0] - t) <= cluster_tol * max(1.0, abs(t)) and cl[2] == circ:
                cl[1] += 1
                cl[3].append(t)
                break
        else:
            clusters.append([t, 1, circ, [t]])

    pairs = []
    for _, count, circ, members in clusters:
        t = complex(np.mean(members))
        if circ:
            t = t / abs(t)
            if abs(t.imag) <= cluster_tol:
                t = complex(math.copysign(1.0, t.real), 0.0)
            elif count % 2:
                raise OddCircleMultiplicity(
                    "zero %r on the unit circle has odd multiplicity %d" % (t, count))
        pairs.append(ReciprocalPair(t, count, circ))

    ts = [pr.t for pr in pairs]
    order = canonical_order(ts, [pr.multiplicity for pr in pairs])
    pairs = tuple(pairs[i] for i in order)
    canon = tuple(pr.t for pr in pairs for _ in range(pr.multiplicity))
    return ReciprocalPairing(pairs, canon)
