"""
Scattering quantities built from the Wronskian polynomials ``w`` and ``s``.

On the unit circle ``A = w/(1 - z**2)`` and ``B = z**2 s / eta`` with
``eta = z - 1/z``; unitarity of the scattering matrix is the polynomial
identity ``w(z) w(1/z) + eta**2 = s(z) s(1/z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (NonPositiveNorming, NonRealBoundState, NonSimpleBoundState,
                     NotABoundState, PoleAtZ)
from .lattice import classify, jost_table
from .polynomial import (RealPolynomial, find_roots, functional_residual,
                         symmetric_product)

__all__ = [
    "BoundStateSet",
    "ResonanceSet",
    "NormingConstants",
    "SMatrixSample",
    "UnitarityReport",
    "Diagnostics",
    "spectrum",
    "smatrix",
    "unitarity_defect",
    "unitarity_residual",
    "norming_constants",
    "norming_direct",
    "validate_scattering_class",
    "validate_resonance_class",
    "coefficient_identities",
]


# =====
# Types
# =====

@dataclass(frozen=True)
class BoundStateSet:
    """
    Real zeros of ``w`` in ``(-1, 1)``, sorted increasingly.

    ``index[k]`` is the signed label of ``z_values[k]``: negative zeros are
    labelled ``-1, -2, ...`` moving away from the origin and positive ones
    ``1, 2, ...``.
    """
    z_values: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "z_values", tuple(sorted(float(z) for z in self.z_values)))

    @property
    def lam(self):
        return tuple(z + 1.0 / z for z in self.z_values)

    @property
    def n_minus(self):
        return -sum(1 for z in self.z_values if z < 0)

    @property
    def n_plus(self):
        return sum(1 for z in self.z_values if z > 0)

    @property
    def N(self):
        return len(self.z_values)

    @property
    def index(self):
        return tuple(range(self.n_minus, 0)) + tuple(range(1, self.n_plus + 1))

    def __len__(self):
        return len(self.z_values)

    def __iter__(self):
        return iter(self.z_values)


@dataclass(frozen=True)
class ResonanceSet:
    """Zeros of ``w`` with ``|z| >= 1`` as ``(z, multiplicity)`` entries."""
    entries: tuple = ()
    boundary: tuple = ()

    def values(self):
        return [z for z, k in self.entries for _ in range(k)]


@dataclass(frozen=True)
class NormingConstants:
    m_plus: tuple
    m_minus: tuple
    B: tuple = ()


@dataclass(frozen=True)
class SMatrixSample:
    z: complex
    A: complex
    B: complex
    R_plus: complex
    R_minus: complex
    T: complex

    @property
    def det(self):
        # det S = T**2 - R_+ R_- = -z**2 w(1/z) / w(z)
        return self.T * self.T - self.R_plus * self.R_minus


@dataclass(frozen=True)
class UnitarityReport:
    """Grid and coefficient defects of the unitarity identity."""
    max_defect: float
    max_relative_defect: float
    max_det_defect: float
    coefficient_residual: float
    grid_size: int
    max_direct_defect: float = 0.0

    def as_dict(self):
        return {"max_defect": self.max_defect,
                "max_relative_defect": self.max_relative_defect,
                "max_det_defect": self.max_det_defect,
                "coefficient_residual": self.coefficient_residual,
                "grid_size": self.grid_size,
                "max_direct_defect": self.max_direct_defect}


@dataclass
class Diagnostics:
    """Named pass/fail checks with a value or detail each."""
    checks: list = field(default_factory=list)

    def add(self, name, passed, value=None, detail=""):
        self.checks.append({"name": name, "passed": bool(passed),
                            "value": value, "detail": detail})

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def failures(self):
        return [c["name"] for c in self.checks if not c["passed"]]

    def as_dict(self):
        return {"passed": self.passed, "checks": list(self.checks)}


def _eta(z):
    return z - 1.0 / z


def _scale_at(f, z):
    # rounding scale of evaluating f at z
    return float(np.sum(np.abs(f.coeffs) * abs(z) ** np.arange(len(f)))) if len(f) else 0.0


# ========
# Spectrum
# ========

def spectrum(w, tol=1e-8):
    """
    Bound states and resonances of ``w``.

    Zeros with ``|z| < 1`` are bound states and must be real and simple;
    the rest are resonances.  Zeros within ``tol`` of ``+-1`` are snapped
    there and count as resonances.

    Raises
    ------
    NonRealBoundState, NonSimpleBoundState
    """
    if w.degree() < 1:
        return BoundStateSet(()), ResonanceSet(())
    roots = []
    for r in find_roots(w):
        r = complex(r)
        for e in (1.0, -1.0):
            if abs(r - e) <= tol:
                r = complex(e, 0.0)
        roots.append(r)
    inside = [r for r in roots if abs(r) < 1.0]
    outside = [r for r in roots if abs(r) >= 1.0]
    for r in inside:
        if abs(r.imag) > tol:
            raise NonRealBoundState("zero %r of w inside the disk is not real" % r)
    zs = sorted(r.real for r in inside)
    for x, y in zip(zs[:-1], zs[1:]):
        if abs(x - y) <= tol:
            raise NonSimpleBoundState("zero %.17g of w inside the disk is multiple" % x)
    entries = []
    for r in outside:
        for k, (z, mult) in enumerate(entries):
            if abs(z - r) <= 1e-7 * max(1.0, abs(r)):
                entries[k] = (z, mult + 1)
                break
        else:
            entries.append((r, 1))
    boundary = tuple(z for z, _ in entries
                     if abs(abs(z) - 1.0) <= tol and abs(z - 1) > tol and abs(z + 1) > tol)
    return BoundStateSet(zs), ResonanceSet(tuple(entries), boundary)


# ========
# S-matrix
# ========

def _deflate(f, root):
    # synthetic division by (z - root), remainder dropped
    c = f.coeffs
    out = np.zeros(c.size - 1)
    acc = 0.0
    for k in range(c.size - 1, 0, -1):
        acc = acc * root + c[k]
        out[k - 1] = acc
    return RealPolynomial(out)


def _common_unit_factors(w, s, tol):
    found = []
    for e in (1.0, -1.0):
        if w.degree() >= 1 and s.degree() >= 1:
            if abs(w(e)) <= tol * w.max_abs() and abs(s(e)) <= tol * max(s.max_abs(), 1.0):
                found.append(e)
    return found


def smatrix(w, s, z, tol=1e-12):
    """
    Scattering matrix entries at a point ``z`` of the unit circle.

    ``A = w/(1 - z**2)``, ``B = z**2 s/eta``, ``R_- = B/A``,
    ``R_+ = -s(1/z)/(z w(z))`` and ``T = 1/A``.  A common factor ``z -+ 1``
    of ``w`` and ``s`` is cancelled first, so the values stay finite at and
    near a zero of ``w`` at ``+-1``.

    Raises
    ------
    PoleAtZ
        If ``w`` (after deflation) vanishes at ``z`` or ``A`` has a pole there.
    """
    z = complex(z)
    wd, sd = w, s
    den = RealPolynomial([-1.0, 0.0, 1.0])
    ratio = 1.0 + 0j
    for e in _common_unit_factors(w, s, tol):
        wd, sd, den = _deflate(wd, e), _deflate(sd, e), _deflate(den, e)
        # d(1/z)/d(z) for d = z - e is -e/z
        ratio *= -e / z
    Dz = den(z)
    wz = wd(z)
    if abs(Dz) <= tol:
        raise PoleAtZ("A has a pole at z = %r" % z)
    if abs(wz) <= tol * max(_scale_at(wd, z), 1.0):
        raise PoleAtZ("w vanishes at z = %r" % z)
    sz = sd(z) if not sd.is_zero() else 0j
    sinv = sd(1.0 / z) if not sd.is_zero() else 0j
    A = -wz / Dz
    B = z ** 3 * sz / Dz
    R_minus = -z ** 3 * sz / wz
    R_plus = -ratio * sinv / (z * wz)
    return SMatrixSample(z, A, B, R_plus, R_minus, 1.0 / A)


def unitarity_defect(w, s, z, residual=None):
    """
    ``||A|**2 - 1 - |B|**2|`` at points ``z`` of the unit circle.

    On the circle the defect equals ``|L(z)| / |eta(z)|**2`` with
    ``L = w w~ + eta**2 - s s~`` and ``|eta|**2 = 4 Im(z)**2``.  ``L`` is
    formed exactly from the stored coefficients (or taken from
    ``residual``) and summed as a cosine series, which avoids the
    cancellation between ``|A|**2`` and ``1 + |B|**2`` near ``z = +-1``.
    """
    r = functional_residual(w, s) if residual is None else np.asarray(residual)
    z = np.asarray(z, dtype=complex)
    theta = np.angle(z)
    L = r[0] + 2.0 * sum(r[k] * np.cos(k * theta) for k in range(1, r.size))
    return np.abs(L) / (4.0 * z.imag ** 2)


def unitarity_residual(w, s, grid_size=512, exclude=1e-6):
    """
    Unitarity defects on a uniform circle grid.

    Returns
    -------
    UnitarityReport
        ``max_defect``: the maximum of :func:`unitarity_defect` over grid
        points farther than ``exclude`` from ``+-1``;
        ``max_relative_defect``: the same divided by ``|A|**2``;
        ``max_det_defect``: the maximum of ``||det S| - 1|``;
        ``coefficient_residual``: the largest coefficient of
        ``w w~ + eta**2 - s s~``; ``max_direct_defect``: the defect from
        evaluating ``A`` and ``B`` directly in binary64.
    """
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    z = np.exp(2j * np.pi * np.arange(grid_size) / grid_size)
    z = z[(np.abs(z - 1) > exclude) & (np.abs(z + 1) > exclude)]
    wz = w(z)
    sz = s(z) if not s.is_zero() else np.zeros_like(z)
    # on the circle eta = z - conj(z) = 2i Im(z)
    eta = 2j * z.imag
    A = wz / (-eta * z)
    B = z * z * sz / eta
    A2 = np.abs(A) ** 2
    direct = np.abs(A2 - 1.0 - np.abs(B) ** 2)
    r = functional_residual(w, s)
    defect = unitarity_defect(w, s, z, r)
    det = -z * z * w(1.0 / z) / wz
    return UnitarityReport(
        float(np.max(defect)),
        float(np.max(defect / A2)),
        float(np.max(np.abs(np.abs(det) - 1.0))),
        float(np.max(np.abs(r))),
        grid_size,
        float(np.max(direct)),
    )


# ================
# Norming constants
# ================

def norming_constants(w, s, bs):
    """
    ``m+ = z**2 w'(z) s(z)/eta**2``, ``B = z**2 s(z)/eta`` and
    ``m- = m+/B**2`` at every bound state.

    Raises
    ------
    NonPositiveNorming
        If any constant is not strictly positive.
    """
    dw = w.derivative()
    mp, mm, bb = [], [], []
    for z in bs.z_values:
        e = _eta(z)
        sz = float(s(z)) if not s.is_zero() else 0.0
        plus = z * z * float(dw(z)) * sz / (e * e)
        Bz = z * z * sz / e
        if not plus > 0.0 or Bz == 0.0:
            raise NonPositiveNorming("m+ = %.6g at z = %.17g" % (plus, z))
        minus = plus / (Bz * Bz)
        mp.append(plus)
        mm.append(minus)
        bb.append(Bz)
    return NormingConstants(tuple(mp), tuple(mm), tuple(bb))


def norming_direct(q, z_j, tol=1e-8):
    """
    ``m+ = sum_n psi_n^+(z_j)**2`` from the Jost table.

    The window ``1..p`` is summed term by term, the tails in closed form:
    ``z**(2p+2)/(1 - z**2)`` for ``n > p`` and ``B**2/(1 - z**2)`` for
    ``n <= 0`` where ``B = psi_0^+(z_j)``.

    Raises
    ------
    NotABoundState
        If ``|z_j| >= 1`` or ``w(z_j) != 0`` within ``tol`` (relative).
    """
    z = float(z_j)
    if not abs(z) < 1.0 or z == 0.0:
        raise NotABoundState("z = %r is not in (-1, 1) minus 0" % z_j)
    if q.is_free():
        raise NotABoundState("the free operator has no bound states")
    params = classify(q)
    table = jost_table(q, params)
    phi = table.phi
    w0 = phi[0](z) - z * z * phi[1](z)
    scale = max(_scale_at(phi[0], z), 1.0)
    if abs(w0) > tol * scale:
        raise NotABoundState("w(%.17g) = %.3g is not zero" % (z, w0))
    p = params.p
    terms = [z ** (2 * n) * phi[n](z) ** 2 for n in range(1, p + 1)]
    B = phi[0](z)
    terms.append(z ** (2 * p + 2) / (1.0 - z * z))
    terms.append(B * B / (1.0 - z * z))
    return math.fsum(terms)


# ==========
# Validators
# ==========

def _equation_allowance(s, z, sz, si):
    # first-order error of s(z) s(1/z) - eta**2 from rounding z to binary64
    # and from evaluating both factors in floating point
    eps = np.finfo(float).eps
    ds = s.derivative()
    y = 1.0 / z
    g1 = float(ds(z)) * si - sz * float(ds(y)) * y * y - 2.0 * _eta(z) * (1.0 + y * y)
    k = np.arange(len(s.coeffs))
    absval = lambda x: float(np.sum(np.abs(s.coeffs) * abs(x) ** k))
    n = max(1, s.degree())
    return 4.0 * eps * abs(g1 * z) + 2.0 * n * eps * (absval(z) * abs(si) + abs(sz) * absval(y))


def validate_scattering_class(s, bs, tol=1e-8):
    """
    Membership checks for scattering data ``(s, E_N)``.

    Checks that ``s`` is nonzero, that the bound states are ordered, real,
    distinct and in ``(-1, 1)`` minus 0, the sign laws
    ``(-1)**j z_j s(z_j) > 0`` and ``(-1)**j z_j s(1/z_j) > 0``, the boundary
    signs ``(-1)**n+ s(1) >= 0`` and ``(-1)**n- (-s(-1)) >= 0``, and
    ``s(z_j) s(1/z_j) = eta(z_j)**2`` at each bound state.  Never raises.
    """
    d = Diagnostics()
    if s.is_zero():
        d.add("s_nonzero", False, detail="s = 0")
        return d
    d.add("s_nonzero", True)
    zs = list(bs.z_values)
    ok = all(-1.0 < z < 1.0 and z != 0.0 for z in zs) and all(
        x < y for x, y in zip(zs[:-1], zs[1:]))
    d.add("ordering", ok, detail="bound states must be distinct, sorted, in (-1,1)\\{0}")
    bad_sign = []
    worst_eq = 0.0
    worst_excess = 0.0
    for j, z in zip(bs.index, zs):
        if not (-1.0 < z < 1.0) or z == 0.0:
            continue
        sz, si = float(s(z)), float(s(1.0 / z))
        sgn = (-1) ** abs(j)
        if not sgn * z * sz > 0.0:
            bad_sign.append((j, "s(z_j)"))
        if not sgn * z * si > 0.0:
            bad_sign.append((j, "s(1/z_j)"))
        e2 = _eta(z) ** 2
        den = max(e2, abs(sz * si))
        rel = abs(sz * si - e2) / den
        worst_eq = max(worst_eq, rel)
        worst_excess = max(worst_excess, rel - _equation_allowance(s, z, sz, si) / den)
    d.add("sign_law", not bad_sign, detail=", ".join("%s at j=%d" % (w_, j) for j, w_ in bad_sign))
    d.add("bound_state_equation", worst_excess <= tol, worst_eq,
          "relative defect of s(z_j) s(1/z_j) = eta(z_j)**2")
    scale = s.max_abs()
    b_plus = (-1) ** bs.n_plus * float(s(1.0))
    b_minus = (-1) ** abs(bs.n_minus) * (-float(s(-1.0)))
    d.add("boundary_plus", b_plus >= -tol * scale, b_plus, "(-1)^n+ s(1) >= 0")
    d.add("boundary_minus", b_minus >= -tol * scale, b_minus, "(-1)^n- (-s(-1)) >= 0")
    return d


def _real_zero_count(F, lo, hi, roots):
    return sum(1 for r in roots if lo < r < hi)


def validate_resonance_class(w, tol=1e-8, grid_size=4096):
    """
    Membership checks for a Wronskian ``w``.

    Checks ``w(0) > 0``; ``|w| >= |eta|`` on a circle grid; that the zeros
    in the disk are real and simple; and the real zero counts of
    ``F = w w~ + eta**2``: even and at least 2 between consecutive bound
    states of equal sign, and with an even half count on each outer
    interval ``(z, 1/z)`` bounded by an extreme bound state.  Zeros of
    ``F`` are located by root finding and counted with multiplicity.
    Never raises.
    """
    d = Diagnostics()
    if w.is_zero():
        d.add("w_nonzero", False, detail="w = 0")
        return d
    w0 = float(w(0.0))
    d.add("w0_positive", w0 > 0.0, w0)
    z = np.exp(2j * np.pi * (np.arange(grid_size) + 0.5) / grid_size)
    gap = float(np.min(np.abs(w(z)) - np.abs(_eta(z))))
    d.add("circle_bound", gap >= -tol * w.max_abs(), gap, "min |w| - |eta| on the circle")
    try:
        bs, _ = spectrum(w, tol)
        d.add("disk_zeros_real_simple", True)
    except (NonRealBoundState, NonSimpleBoundState) as exc:
        d.add("disk_zeros_real_simple", False, detail=str(exc))
        return d
    F = symmetric_product(w, +1)
    if F.is_zero() or F.degree() < 1:
        d.add("F_nonconstant", False, detail="w w~ + eta^2 is constant")
        return d
    roots = [complex(r) for r in find_roots(F.to_polynomial())]
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-7 * max(1.0, abs(r)))
    zs = list(bs.z_values)
    bad = []
    for x, y in zip(zs[:-1], zs[1:]):
        if x * y < 0:
            continue
        k = _real_zero_count(F, x, y, real)
        if k % 2 or k < 2:
            bad.append("(%.6g, %.6g): %d" % (x, y, k))
    for z_out in ([zs[-1]] if zs and zs[-1] > 0 else []) + ([zs[0]] if zs and zs[0] < 0 else []):
        lo, hi = sorted((z_out, 1.0 / z_out))
        k = _real_zero_count(F, lo, hi, real)
        if k % 2 or (k // 2) % 2:
            bad.append("(%.6g, %.6g): %d" % (lo, hi, k))
    d.add("F_zero_counts", not bad, detail="; ".join(bad))
    return d


def coefficient_identities(w, s, p):
    """
    Autocorrelation identities between the coefficient vectors of w and s.

    With both vectors padded to length ``2p`` and ``V`` the one-slot shift,
    ``2 + <s, s> = <w, w>``, ``<V**2 s, s> = 1 + <V**2 w, w>`` and
    ``<V**k s, s> = <V**k w, w>`` for every other ``k``.

    Returns
    -------
    dict
        ``s_products`` and ``w_products`` (``<V**k f, f>`` for
        ``k = 0 .. 2p-1``), ``residuals`` per ``k`` and their maximum.
    """
    n = max(2 * p, len(w), len(s))
    sc = s.padded(n)
    wc = w.padded(n)
    sp = [math.fsum(sc[i] * sc[i + k] for i in range(n - k)) for k in range(n)]
    wp = [math.fsum(wc[i] * wc[i + k] for i in range(n - k)) for k in range(n)]
    exact = functional_residual(w, s)
    exact = np.concatenate([exact, np.zeros(max(0, n - exact.size))])
    res = [abs(float(x)) for x in exact[:n]]
    return {"s_products": sp, "w_products": wp, "residuals": res,
            "max": max(res) if res else 0.0}
