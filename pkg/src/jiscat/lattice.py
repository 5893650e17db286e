"""
Finitely supported Jacobi perturbations, Jost polynomials and Wronskians.

The operator is ``(J f)_n = a_{n-1} f_{n-1} + a_n f_{n+1} + b_n f_n`` with
``a_n = 1`` and ``b_n = 0`` outside a finite window.  All recursions run in
the translated frame where the window is ``n = 1..p`` and are carried out
exactly in rational arithmetic on the binary64 inputs, so the only rounding
is the final conversion of each coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegreeMismatch, EmptySupport, InvalidCoefficient
from .polynomial import RealPolynomial

__all__ = [
    "JacobiSequence",
    "ClassParams",
    "JostTable",
    "normalize",
    "classify",
    "jost_plus",
    "jost_minus",
    "jost_table",
    "wronskian_pair",
    "wronskian_at",
    "asymptotic_diagnostics",
    "forward",
]

TRIM_TOL = 1e-10


# ================
# Sequence & class
# ================

@dataclass(frozen=True)
class JacobiSequence:
    """
    Coefficients ``a_n, b_n`` for ``n = offset .. offset + len(a) - 1``.

    Every other site carries the free values ``a_n = 1``, ``b_n = 0``.
    """
    offset: int
    a: tuple
    b: tuple

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise InvalidCoefficient("a and b must have equal length")
        for x in self.a:
            if not math.isfinite(x) or x <= 0.0:
                raise InvalidCoefficient("a_n must be finite and positive, got %r" % x)
        for x in self.b:
            if not math.isfinite(x):
                raise InvalidCoefficient("b_n must be finite, got %r" % x)

    @property
    def window(self):
        return range(self.offset, self.offset + len(self.a))

    def a_at(self, n):
        k = n - self.offset
        return self.a[k] if 0 <= k < len(self.a) else 1.0

    def b_at(self, n):
        k = n - self.offset
        return self.b[k] if 0 <= k < len(self.b) else 0.0

    def is_free(self):
        return len(self.a) == 0

    def shifted(self, k):
        """The same sequence with every index moved by ``k``."""
        return JacobiSequence(self.offset + k, self.a, self.b)

    def max_difference(self, other, lo=None, hi=None):
        """Largest entrywise gap to ``other`` over the union of windows."""
        idx = set(self.window) | set(other.window)
        if lo is not None:
            idx |= set(range(lo, hi + 1))
        if not idx:
            return 0.0
        return max(max(abs(self.a_at(n) - other.a_at(n)),
                       abs(self.b_at(n) - other.b_at(n))) for n in idx)


def normalize(a, b, offset=0):
    """
    Build a :class:`JacobiSequence` trimmed to its minimal nontrivial window.

    Parameters
    ----------
    a, b : array_like
        Raw coefficients for ``n = offset, offset + 1, ...``.
    offset : int, default=0

    Raises
    ------
    InvalidCoefficient
        On nonpositive or non-finite entries or mismatched lengths.
    """
    a = [float(x) for x in np.asarray(a, dtype=float).ravel()]
    b = [float(x) for x in np.asarray(b, dtype=float).ravel()]
    if len(a) != len(b):
        raise InvalidCoefficient("a and b must have equal length")
    for x in a:
        if not math.isfinite(x) or x <= 0.0:
            raise InvalidCoefficient("a_n must be finite and positive, got %r" % x)
    for x in b:
        if not math.isfinite(x):
            raise InvalidCoefficient("b_n must be finite, got %r" % x)
    live = [k for k in range(len(a)) if a[k] != 1.0 or b[k] != 0.0]
    if not live:
        return JacobiSequence(1, (), ())
    lo, hi = live[0], live[-1]
    return JacobiSequence(int(offset) + lo, tuple(a[lo:hi + 1]), tuple(b[lo:hi + 1]))


@dataclass(frozen=True)
class ClassParams:
    """
    Class parameters of a nonzero perturbation.

    The doubled sequence ``q_{2n-1} = b_n``, ``q_{2n} = 1 - a_n`` is
    supported on ``[1 + nu, 2p - tau]`` after translating the window to
    start at ``n = 1``.  ``translation`` is the index shift applied, so
    that canonical site ``n`` is original site ``n + translation``.
    """
    nu: int
    tau: int
    p: int
    translation: int
    a: tuple = field(repr=False)
    b: tuple = field(repr=False)

    @property
    def m(self):
        return 2 * self.p - 1 - self.tau - self.nu

    @property
    def support_lo(self):
        return 1 + self.nu + 2 * self.translation

    @property
    def support_hi(self):
        return 2 * self.p - self.tau + 2 * self.translation

    @property
    def in_theorem_scope(self):
        return self.m >= 3

    def sequence(self):
        """The translated sequence on the window ``1..p``."""
        return JacobiSequence(1, self.a, self.b)

    def c(self, n):
        return 1.0 - self.a[n - 1] ** 2

    def beta(self, n):
        return math.fsum(self.b[n - 1:])

    def eta(self, n):
        return math.prod(self.a[n - 1:])


def classify(q):
    """
    Class parameters ``(nu, tau, p)`` and the translation to ``n = 1``.

    Raises
    ------
    EmptySupport
        For the zero perturbation.
    """
    if q.is_free():
        raise EmptySupport("the zero perturbation has no class parameters")
    nu = 1 if q.b[0] == 0.0 else 0
    tau = 1 if q.a[-1] == 1.0 else 0
    return ClassParams(nu, tau, len(q.a), q.offset - 1, tuple(q.a), tuple(q.b))


# ===============
# Jost polynomials
# ===============

def _fr(xs):
    return [Fraction(x) for x in xs]


def _add(x, y):
    n = max(len(x), len(y))
    return [(x[k] if k < len(x) else 0) + (y[k] if k < len(y) else 0)
            for k in range(n)]


def _mul(x, y):
    out = [Fraction(0)] * (len(x) + len(y) - 1)
    for i, u in enumerate(x):
        if u:
            for j, v in enumerate(y):
                out[i + j] += u * v
    return out


def _scale(x, c):
    return [c * u for u in x]


def _shift(x, k):
    return [Fraction(0)] * k + list(x)


def _strip(x):
    x = list(x)
    while x and x[-1] == 0:
        x.pop()
    return x


def _round(x):
    return RealPolynomial([float(u) for u in _strip(x)])


@dataclass(frozen=True)
class JostTable:
    """
    Jost polynomials in the translated frame.

    ``phi[n]`` is ``z**-n psi_n^+`` for ``n = 0 .. p+1`` and ``chi[n]`` is
    ``z**n psi_n^-`` for ``n = -1 .. p+1``.
    """
    p: int
    a: tuple
    phi: dict
    chi: dict
    phi_exact: dict = field(repr=False, compare=False)
    chi_exact: dict = field(repr=False, compare=False)


def _coeff_fns(params):
    a = _fr(params.a)
    b = _fr(params.b)
    p = params.p
    one, zero = Fraction(1), Fraction(0)

    def A(n):
        return a[n - 1] if 1 <= n <= p else one

    def B(n):
        return b[n - 1] if 1 <= n <= p else zero

    return A, B


def _phi_exact(params):
    A, B = _coeff_fns(params)
    p = params.p
    phi = {p + 2: [Fraction(1)], p + 1: [Fraction(1)]}
    for n in range(p + 1, 0, -1):
        t = _add(_mul([Fraction(1), -B(n), Fraction(1)], phi[n]),
                 _shift(_scale(phi[n + 1], -A(n)), 2))
        phi[n - 1] = _strip(_scale(t, 1 / A(n - 1)))
    return phi


def _chi_exact(params, top=None):
    A, B = _coeff_fns(params)
    top = params.p + 1 if top is None else top
    chi = {-1: [Fraction(1)], 0: [Fraction(1)]}
    for n in range(0, top):
        t = _add(_mul([Fraction(1), -B(n), Fraction(1)], chi[n]),
                 _shift(_scale(chi[n - 1], -A(n - 1)), 2))
        chi[n + 1] = _strip(_scale(t, 1 / A(n)))
    return chi


def jost_plus(q, params=None):
    """
    ``phi_n = z**-n psi_n^+`` for ``n = 0 .. p+1`` by downward recursion.

    ``a_{n-1} phi_{n-1} = (z**2 + 1 - b_n z) phi_n - a_n z**2 phi_{n+1}``
    from ``phi_{p+2} = phi_{p+1} = 1``.
    """
    params = classify(q) if params is None else params
    ex = _phi_exact(params)
    return {n: _round(ex[n]) for n in range(0, params.p + 2)}


def jost_minus(q, params=None, top=2):
    """
    ``chi_n = z**n psi_n^-`` for ``n = -1 .. top`` by upward recursion.

    ``a_n chi_{n+1} = (1 + z**2 - b_n z) chi_n - a_{n-1} z**2 chi_{n-1}``
    from ``chi_0 = chi_{-1} = 1``.
    """
    params = classify(q) if params is None else params
    ex = _chi_exact(params, top)
    return {n: _round(ex[n]) for n in range(-1, top + 1)}


def jost_table(q, params=None):
    params = classify(q) if params is None else params
    phi = _phi_exact(params)
    chi = _chi_exact(params)
    p = params.p
    return JostTable(
        p,
        tuple(params.a),
        {n: _round(phi[n]) for n in range(0, p + 2)},
        {n: _round(chi[n]) for n in range(-1, p + 2)},
        {n: phi[n] for n in range(0, p + 3)},
        chi,
    )


# ===========
# Wronskians
# ===========

def _wronskian_exact(params, phi):
    a1 = Fraction(params.a[0])
    b1 = Fraction(params.b[0])
    w = _add(_mul([Fraction(1), -b1], phi[1]), _shift(_scale(phi[2], -a1), 2))
    s = _add(_mul([-b1, Fraction(1)], phi[1]), _shift(_scale(phi[2], -a1), 1))
    return _strip(w), _strip(s)


def _check_degrees(w, s, params, trim_tol):
    m, nu = params.m, params.nu
    want_w, want_s = max(m, 2), m + nu
    for name, f, want in (("w", w, want_w), ("s", s, want_s)):
        deg = len(f) - 1
        scale = max(abs(u) for u in f) if f else 0
        if deg != want or abs(f[-1]) <= trim_tol * scale:
            raise DegreeMismatch(
                "deg %s = %d with leading coefficient %.3g, class predicts %d"
                % (name, deg, float(f[-1]) if f else 0.0, want))


def wronskian_pair(q, trim_tol=TRIM_TOL):
    """
    The Wronskian polynomials ``w`` and ``s`` of a perturbation.

    ``w = (1 - b_1 z) phi_1 - a_1 z**2 phi_2`` and
    ``s = (z - b_1) phi_1 - a_1 z phi_2`` in the translated frame.  The zero
    perturbation gives ``w = 1 - z**2`` and ``s = 0``.

    Raises
    ------
    DegreeMismatch
        If ``deg w != max(m, 2)`` or ``deg s != m + nu``, or the leading
        coefficient is below ``trim_tol`` relative to the largest one.
    """
    if q.is_free():
        return RealPolynomial([1.0, 0.0, -1.0]), RealPolynomial()
    params = classify(q)
    w, s = _wronskian_exact(params, _phi_exact(params))
    _check_degrees(w, s, params, trim_tol)
    return _round(w), _round(s)


def wronskian_at(table, n, z):
    """
    ``a_n (phi_n chi_{n+1} - z**2 chi_n phi_{n+1})`` at site ``n``.

    Equals ``w(z)`` for every ``0 <= n <= p``.
    """
    if not 0 <= n <= table.p:
        raise ValueError("site %d outside 0..%d" % (n, table.p))
    an = 1.0 if n == 0 else table.a[n - 1]
    phi, chi = table.phi, table.chi
    return an * (phi[n](z) * chi[n + 1](z) - z * z * chi[n](z) * phi[n + 1](z))


def asymptotic_diagnostics(q, w, s):
    """
    Residuals of the low-order expansions of ``w`` and ``s``.

    Checks ``w(0) = 1/eta_1``, ``s(0) = -b_1/eta_1``,
    ``w'(0)/w(0) = -beta_1`` and, when ``tau = 0``, that the leading
    coefficient of ``s`` equals ``c_p / eta_1`` with ``eta_1 = a_1 ... a_p``,
    ``beta_1 = b_1 + ... + b_p`` and ``c_p = 1 - a_p**2``.

    Returns
    -------
    dict
        Residual per check and ``in_scope`` (the expansions assume
        ``p >= 2``).
    """
    if q.is_free():
        return {"in_scope": False,
                "w0": abs(w(0.0) - 1.0), "s0": abs(s(0.0)) if not s.is_zero() else 0.0}
    par = classify(q)
    eta1 = par.eta(1)
    out = {"in_scope": par.p >= 2}
    w0 = float(w(0.0))
    out["w0"] = abs(w0 - 1.0 / eta1)
    out["s0"] = abs(float(s(0.0)) + par.b[0] / eta1)
    out["dlogw0"] = abs(float(w.derivative()(0.0)) / w0 + par.beta(1))
    if par.tau == 0:
        out["s_leading"] = abs(s.leading - par.c(par.p) / eta1)
    return out


def forward(q):
    """``(params, w, s)`` for a perturbation; ``params`` is None for q = 0."""
    w, s = wronskian_pair(q)
    params = None if q.is_free() else classify(q)
    return params, w, s
