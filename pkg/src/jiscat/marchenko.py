"""
Marchenko reconstruction of a Jacobi perturbation from scattering data.

The kernel ``F(n)`` is the sum of the Fourier coefficients of the right
reflection coefficient and the bound-state terms ``z_j**n / m_j^+``.  For
compactly supported perturbations it is finitely supported on the right and
equals ``-h_{d+1-n}`` where ``h`` is the power series at 0 of
``z**d s(1/z) / w(z)`` and ``d = deg s``; the bound-state residues cancel
exactly.  Solving ``(I + F_n) x = e_0`` for every site gives ``a_n`` and
``b_n`` from ratios of the first two solution entries.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import (ClassError, NonPositiveRatio, QuadratureUnstable,
                     RoundTripFailure, SeriesOverflow, SingularSystem)
from .inverse import (ScatteringData, enumerate_sigma, recover_w)
from .lattice import JacobiSequence, classify, normalize, wronskian_pair
from .polynomial import RealPolynomial, find_roots
from .scattering import _common_unit_factors, _deflate, norming_constants, spectrum

__all__ = [
    "MarchenkoKernel",
    "GLMSystem",
    "InverseResult",
    "IsoMember",
    "kernel",
    "kernel_dft_oracle",
    "glm_solve",
    "reconstruct_coefficients",
    "reconstruct",
    "literal_reading",
    "inverse_scattering",
    "inverse_scattering_report",
    "iso_enumerate",
]

FREE_SNAP = 1e-9


# =====
# Types
# =====

@dataclass(frozen=True)
class MarchenkoKernel:
    """``F(n)`` for ``n_min <= n <= 2p``; zero for ``n > 2p``."""
    p: int
    n_min: int
    values: tuple
    exact: tuple = field(default=None, repr=False, compare=False)

    def __call__(self, n):
        if n > 2 * self.p:
            return 0.0
        if n < self.n_min:
            raise KeyError("F(%d) below the computed range n >= %d" % (n, self.n_min))
        k = n - self.n_min
        return self.values[k] if k < len(self.values) else 0.0

    def exact_at(self, n):
        """``F(n)`` as the exact rational value, if available."""
        if n > 2 * self.p:
            return Fraction(0)
        if self.exact is None:
            return Fraction(self(n))
        return self.exact[n - self.n_min]

    def as_dict(self):
        return {n: self(n) for n in range(self.n_min, 2 * self.p + 1)}


@dataclass(frozen=True)
class GLMSystem:
    n: int
    size: int
    matrix: np.ndarray = field(repr=False)
    solution: np.ndarray


@dataclass(frozen=True)
class InverseResult:
    """Outcome of the inverse scattering pipeline with its residuals."""
    sequence: JacobiSequence
    w: RealPolynomial
    kernel: MarchenkoKernel
    sites: tuple
    a: tuple
    b: tuple
    guard_residual: float
    roundtrip_residual: float
    literal: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True)
class IsoMember:
    sigma: tuple
    sequence: JacobiSequence
    w_residual: float


# ======
# Kernel
# ======

def _series_ratio(num, den, count):
    # power series of num/den at 0, coefficients 0..count-1, exact
    num = [Fraction(x) for x in num]
    den = [Fraction(x) for x in den]
    out = []
    for N in range(count):
        acc = num[N] if N < len(num) else Fraction(0)
        for i in range(1, min(N, len(den) - 1) + 1):
            acc -= den[i] * out[N - i]
        out.append(acc / den[0])
    return out


def kernel(s, w, bs=None, nc=None, n_min=None, p=None, overflow=1e12):
    """
    The Marchenko kernel from the Wronskian pair.

    ``F(n) = -sum_{k=1}^{d+1} s_{k-1} c_{k-n}`` with ``c`` the power series
    of ``1/w``; evaluated as ``-h_{d+1-n}`` with ``h`` the series of the
    reversed ``s`` over ``w``.  The series is computed exactly from the
    stored coefficients and kept alongside the rounded values.  The bound
    states and norming constants are accepted for interface symmetry with
    :func:`kernel_dft_oracle`; their contribution is already contained in
    the closed form.

    Parameters
    ----------
    s, w : RealPolynomial
    n_min : int, optional
        Lowest index computed; defaults to ``-2p - 6``.
    p : int, optional
        Class half-width; read off ``s`` if omitted.

    Raises
    ------
    SeriesOverflow
        If a coefficient of the series of ``w(0)/w`` exceeds ``overflow``.
    """
    if p is None:
        if s.is_zero():
            p = 1
        else:
            from .inverse import class_from_s
            p = class_from_s(s)[2]
    if n_min is None:
        n_min = -2 * p - 6
    if w.is_zero() or w.coeffs[0] == 0.0:
        raise SeriesOverflow("w(0) = 0")
    if s.is_zero():
        return MarchenkoKernel(p, n_min, tuple(0.0 for _ in range(n_min, 2 * p + 1)))
    d = s.degree()
    count = d + 2 - n_min
    wc = w.coeffs.tolist()
    unit = _series_ratio([w.coeffs[0]], wc, count)
    big = max(abs(float(x)) for x in unit)
    if big > overflow:
        raise SeriesOverflow("series of w(0)/w reaches %.3g" % big)
    h = _series_ratio(s.coeffs[::-1].tolist(), wc, count)
    exact = []
    for n in range(n_min, 2 * p + 1):
        N = d + 1 - n
        exact.append(-h[N] if N >= 0 else Fraction(0))
    return MarchenkoKernel(p, n_min, tuple(float(x) for x in exact), tuple(exact))


def _oracle_samples(w, near, alias, cap):
    # trapezoidal aliasing decays like rho**N, rho the largest pole modulus
    # of R_+ strictly inside the annulus around the circle
    rho = 0.0
    for r in find_roots(w):
        if abs(r - 1) <= near or abs(r + 1) <= near:
            continue
        if abs(abs(r) - 1.0) < near:
            raise QuadratureUnstable("w has a zero at %r near the circle" % complex(r))
        rho = max(rho, min(abs(r), 1.0 / abs(r)))
    need = 1024
    if rho > 0.0:
        need = max(need, math.log(alias) / math.log(rho))
    samples = 1 << max(10, math.ceil(math.log2(need)))
    if samples > cap:
        raise QuadratureUnstable("quadrature needs %d samples (pole modulus %.12g)"
                                 % (samples, rho))
    return samples


def kernel_dft_oracle(s, w, bs, nc, samples=None, n_min=None, p=None, near=1e-4,
                      alias=1e-15, cap=1 << 22):
    """
    The kernel by trapezoidal quadrature of ``R_+(z) z**n`` on the circle.

    ``F(n) = mean_k R_+(z_k) z_k**n + sum_j z_j**n / m_j^+``.  Common factors
    ``z -+ 1`` of ``w`` and ``s`` are cancelled before sampling.  By default
    the sample count is the smallest power of two that pushes the aliasing
    term below ``alias``.

    Raises
    ------
    QuadratureUnstable
        If ``w`` has a zero within ``near`` of the circle away from ``+-1``
        or more than ``cap`` samples would be needed.
    """
    if samples is not None and (samples < 1024 or samples & (samples - 1)):
        raise ValueError("samples must be a power of two >= 1024")
    if p is None:
        from .inverse import class_from_s
        p = 1 if s.is_zero() else class_from_s(s)[2]
    if n_min is None:
        n_min = -2 * p - 6
    if s.is_zero():
        return MarchenkoKernel(p, n_min, tuple(0.0 for _ in range(n_min, 2 * p + 1)))
    if samples is None:
        samples = _oracle_samples(w, near, alias, cap)
    else:
        _oracle_samples(w, near, 1.0, cap)
    wd, sd = w, s
    ratio = np.ones(samples, dtype=complex)
    z = np.exp(2j * np.pi * (np.arange(samples) + 0.5) / samples)
    for e in _common_unit_factors(w, s, 1e-12):
        wd, sd = _deflate(wd, e), _deflate(sd, e)
        ratio *= -e / z
    R = -ratio * sd(1.0 / z) / (z * wd(z))
    vals = []
    for n in range(n_min, 2 * p + 1):
        v = np.mean(R * z ** n).real
        v += math.fsum(zj ** n / mj for zj, mj in zip(bs.z_values, nc.m_plus))
        vals.append(float(v))
    return MarchenkoKernel(p, n_min, tuple(vals))


# ==============
# Marchenko solve
# ==============

def _refine(kern, n, size, lu, piv, x, iters):
    # iterative refinement against the exact kernel; the float LU is the
    # preconditioner, residuals are exact
    col = [kern.exact_at(2 * n + j) for j in range(2 * size - 1)]
    for _ in range(iters):
        xf = [Fraction(v) for v in x]
        r = np.empty(size)
        for i in range(size):
            acc = (1 if i == 0 else 0) - xf[i]
            for k in range(size):
                acc -= col[i + k] * xf[k]
            r[i] = float(acc)
        dx = lu_solve((lu, piv), r)
        x = x + dx
        if np.max(np.abs(dx)) <= 1e-16 * np.max(np.abs(x)):
            break
    return x


def glm_solve(kern, n, pivot_tol=1e-12, refine=4):
    """
    Solve ``(I + F_n) x = e_0`` with ``(F_n)_{ik} = F(2n + i + k)``.

    The system is truncated to ``max(1, 2p + 1 - 2n)`` unknowns, beyond
    which every entry vanishes.  When the kernel carries exact values, the
    LU solution is improved by up to ``refine`` steps of iterative
    refinement with exactly computed residuals.  The solution is padded with
    zeros to length at least 2.

    Raises
    ------
    SingularSystem
        If an LU pivot falls below ``pivot_tol``.
    """
    size = max(1, 2 * kern.p + 1 - 2 * n)
    M = np.eye(size)
    for i in range(size):
        for k in range(size):
            M[i, k] += kern(2 * n + i + k)
    with warnings.catch_warnings():
        # the pivot check below reports singularity
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(M, check_finite=True)
    if np.min(np.abs(np.diag(lu))) < pivot_tol:
        raise SingularSystem("I + F_%d is singular to working precision" % n)
    e0 = np.zeros(size)
    e0[0] = 1.0
    x = lu_solve((lu, piv), e0)
    if kern.exact is not None and size > 1:
        x = _refine(kern, n, size, lu, piv, x, refine)
    if size < 2:
        x = np.concatenate([x, np.zeros(2 - size)])
    return GLMSystem(n, size, M, x)


def reconstruct_coefficients(kern, lo=-2, hi=None):
    """
    ``(sites, a, b)`` over ``lo..hi`` from the Marchenko solutions.

    ``a_n**2 = x_{n+1}[0] / x_n[0]`` and
    ``b_n = x_n[1]/x_n[0] - x_{n-1}[1]/x_{n-1}[0]``.

    Raises
    ------
    NonPositiveRatio
        If a leading entry or ratio is not positive.
    """
    hi = kern.p + 2 if hi is None else hi
    X = {n: glm_solve(kern, n).solution for n in range(lo - 1, hi + 2)}
    for n, x in X.items():
        if not x[0] > 0.0:
            raise NonPositiveRatio("x_%d[0] = %.6g is not positive" % (n, x[0]))
    sites, a, b = [], [], []
    for n in range(lo, hi + 1):
        r = X[n + 1][0] / X[n][0]
        if not r > 0.0:
            raise NonPositiveRatio("a_%d**2 = %.6g is not positive" % (n, r))
        sites.append(n)
        a.append(math.sqrt(r))
        b.append(X[n][1] / X[n][0] - X[n - 1][1] / X[n - 1][0])
    return tuple(sites), tuple(a), tuple(b)


def _snap(a, b, tol):
    a = [1.0 if abs(x - 1.0) <= tol else x for x in a]
    b = [0.0 if abs(x) <= tol else x for x in b]
    return a, b


def reconstruct(kern, lo=-2, hi=None, snap=FREE_SNAP):
    """
    The perturbation on ``lo..hi`` as a :class:`JacobiSequence`.

    Entries within ``snap`` of the free values are set to them exactly
    before trimming.
    """
    sites, a, b = reconstruct_coefficients(kern, lo, hi)
    a, b = _snap(a, b, snap)
    return normalize(a, b, sites[0])


def literal_reading(kern, lo=-2, hi=None):
    """
    Coefficients from ``Psi_n^k = <e_k, (I + F_n) e_0>`` with
    ``a_n**2 = Psi_n^0 / Psi_{n+1}^0``; kept as a comparison diagnostic.
    """
    hi = kern.p + 2 if hi is None else hi
    psi0 = {n: 1.0 + kern(2 * n) for n in range(lo - 1, hi + 2)}
    psi1 = {n: kern(2 * n + 1) for n in range(lo - 1, hi + 2)}
    out = {}
    for n in range(lo, hi + 1):
        r = psi0[n] / psi0[n + 1] if psi0[n + 1] != 0.0 else float("nan")
        bn = psi1[n] / psi0[n] - psi1[n - 1] / psi0[n - 1] \
            if psi0[n] != 0.0 and psi0[n - 1] != 0.0 else float("nan")
        out[n] = {"a_squared": r, "b": bn}
    return out


# ================
# Inverse pipeline
# ================

def inverse_scattering_report(sd, lo=-2, hi=None, guard_tol=1e-8, roundtrip_tol=1e-8,
                              min_m=3):
    """
    Reconstruct the perturbation from ``(s, E_N)`` with residuals.

    Runs ``recover_w``, the norming constants, the kernel and the Marchenko
    solves over ``lo..p+2``; requires free values outside ``1..p`` within
    ``guard_tol`` and that the forward map of the result reproduces ``s``
    (relative to its largest coefficient) and the bound states within
    ``roundtrip_tol``.

    Raises
    ------
    RoundTripFailure
        If either requirement fails.
    """
    if not isinstance(sd, ScatteringData):
        raise TypeError("expected ScatteringData")
    w = recover_w(sd, min_m=min_m)
    bs = sd.bound_states
    nc = norming_constants(w, sd.s, bs)
    p = sd.p
    hi = p + 2 if hi is None else hi
    kern = kernel(sd.s, w, bs, nc, n_min=2 * (lo - 1), p=p)
    sites, a, b = reconstruct_coefficients(kern, lo, hi)
    guard = 0.0
    for n, an, bn in zip(sites, a, b):
        if not 1 <= n <= p:
            guard = max(guard, abs(an - 1.0), abs(bn))
    if guard > guard_tol:
        raise RoundTripFailure("coefficients outside 1..%d deviate by %.3g" % (p, guard))
    inside = [k for k, n in enumerate(sites) if 1 <= n <= p]
    aa, bb = _snap([a[k] for k in inside], [b[k] for k in inside], FREE_SNAP)
    q = normalize(aa, bb, 1)
    try:
        w2, s2 = wronskian_pair(q)
    except ClassError as exc:
        raise RoundTripFailure("reconstructed sequence leaves the class: %s" % exc) from None
    n = max(len(s2), len(sd.s))
    rt = float(np.max(np.abs(s2.padded(n) - sd.s.padded(n)))) / sd.s.max_abs()
    bs2, _ = spectrum(w2)
    if bs2.N != bs.N:
        rt = max(rt, float("inf"))
    else:
        rt = max([rt] + [abs(x - y) for x, y in zip(bs2.z_values, bs.z_values)])
    if not rt <= roundtrip_tol:
        raise RoundTripFailure("forward image differs from the input by %.3g" % rt)
    return InverseResult(q, w, kern, sites, a, b, guard, rt, literal_reading(kern, lo, hi))


def inverse_scattering(sd, **kw):
    """The perturbation with scattering data ``sd``; see :func:`inverse_scattering_report`."""
    return inverse_scattering_report(sd, **kw).sequence


def iso_enumerate(q, min_m=3):
    """
    Every perturbation sharing the Wronskian ``w`` of ``q``.

    Returns a list of :class:`IsoMember` in the order of the sign family,
    each carrying the sign sequence, the reconstructed sequence (in the
    frame starting at ``n = 1``) and ``max |w(r) - w(q)|`` coefficientwise.
    """
    params = classify(q)
    w, _ = wronskian_pair(q)
    fam = enumerate_sigma(w, nu=params.nu, min_m=min_m)
    out = []
    for sig, sd in zip(fam.members, fam.data):
        r = inverse_scattering(sd, min_m=min_m)
        wr, _ = wronskian_pair(r)
        n = max(len(wr), len(w))
        res = float(np.max(np.abs(wr.padded(n) - w.padded(n))))
        out.append(IsoMember(tuple(sig.sigma), r, res))
    return out
