"""
Command-line front end.

Reads a JSON problem file, runs the forward, inverse or iso-resonance
pipeline and writes a JSON result.  Every result carries the five check
blocks ``unitarity``, ``trp``, ``sw5``, ``boundary`` and ``class``, filled
with a reason when they could not be computed.  Exit codes: 0 success,
1 input outside the admissible class, 2 unreadable or malformed file,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import jsonschema
import numpy as np

from .errors import JiscatError
from .inverse import (ScatteringData, SignSequence, boundary_identities,
                      canonical_zero_list, lambda_consistency, recover_s,
                      recover_w, sigma_of)
from .lattice import classify, normalize, wronskian_pair
from .marchenko import inverse_scattering_report, iso_enumerate
from .polynomial import RealPolynomial
from .scattering import (BoundStateSet, coefficient_identities,
                         norming_constants, spectrum, unitarity_residual,
                         validate_resonance_class, validate_scattering_class)

__all__ = ["main", "build_parser", "load_problem", "check_blocks", "dumps",
           "SCHEMA"]

BLOCKS = ("unitarity", "trp", "sw5", "boundary", "class")

_NUMBERS = {"type": "array", "items": {"type": "number"}}

SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["sequence", "scattering", "resonance"]}},
    "oneOf": [
        {
            "properties": {
                "kind": {"const": "sequence"},
                "offset": {"type": "integer"},
                "a": _NUMBERS,
                "b": _NUMBERS,
            },
            "required": ["kind", "offset", "a", "b"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "scattering"},
                "s": dict(_NUMBERS, minItems=1),
                "bound_states": _NUMBERS,
            },
            "required": ["kind", "s", "bound_states"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "kind": {"const": "resonance"},
                "w": dict(_NUMBERS, minItems=1),
                "sigma": {"type": "array", "items": {"enum": [-1, 1]}, "minItems": 1},
                "nu": {"enum": [0, 1]},
            },
            "required": ["kind", "w", "sigma"],
            "additionalProperties": False,
        },
    ],
}


class ProblemError(Exception):
    """Unreadable, malformed or schema-violating problem file (exit 2)."""
    exit_code = 2


# =============
# Serialisation
# =============

def _emit(x, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if x is None or isinstance(x, (bool, np.bool_)):
        return "null" if x is None else ("true" if x else "false")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "%.17g" % x if math.isfinite(x) else "null"
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = ["%s%s: %s" % (pad, json.dumps(str(k)), _emit(v, indent, level + 1))
                 for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        if len(x) == 0:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in x):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in x) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError("cannot serialise %r" % type(x))


def dumps(obj, indent=2):
    """JSON text with floats written to 17 significant digits, keys in insertion order."""
    return _emit(obj, indent, 0) + "\n"


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".jiscat-", suffix=".tmp", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# =======
# Loading
# =======

def _reject_constant(name):
    raise ValueError("non-finite number %s" % name)


def load_problem(path):
    """
    Parse and validate a problem file.

    Raises
    ------
    ProblemError
        On I/O, JSON or schema errors and on non-finite numbers.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh, parse_constant=_reject_constant)
    except (OSError, UnicodeDecodeError, ValueError) as exc:
        raise ProblemError("cannot read %s: %s" % (path, exc)) from None
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ProblemError("schema violation: %s" % exc.message) from None
    for key in ("a", "b", "s", "bound_states", "w"):
        if key in data and not all(math.isfinite(v) for v in data[key]):
            raise ProblemError("non-finite entry in %r" % key)
    return data


# ======
# Blocks
# ======

def _missing(reason):
    return {"passed": None, "max": None, "detail": "not computed: %s" % reason}


def _guard(fn):
    try:
        return fn()
    except (JiscatError, ValueError, ArithmeticError) as exc:
        return {"passed": False, "max": None, "detail": "%s: %s" % (type(exc).__name__, exc)}


def _unitarity_block(w, s, grid, tol):
    rep = unitarity_residual(w, s, grid).as_dict()
    worst = max(rep["max_defect"], rep["max_det_defect"], rep["coefficient_residual"])
    return dict({"passed": worst <= tol, "max": worst}, **rep)


def _trp_block(w, s, p, tol):
    rep = coefficient_identities(w, s, p)
    return {"passed": rep["max"] <= tol, "max": rep["max"], "residuals": rep["residuals"],
            "s_products": rep["s_products"], "w_products": rep["w_products"]}


def _sw5_block(w, s, tol):
    rep = lambda_consistency(s, w)
    out = {"passed": rep["max"] <= tol, "max": rep["max"]}
    out.update((k, v) for k, v in rep.items() if k != "max")
    return out


def _boundary_block(w, s, tol):
    rep = boundary_identities(s, w)
    worst = 0.0
    for side in ("plus", "minus"):
        worst = max(worst, rep[side]["square"], rep[side].get("derivative", 0.0))
    return {"passed": worst <= tol, "max": worst, "plus": rep["plus"], "minus": rep["minus"]}


def _class_block(w, s, bs):
    sd = validate_scattering_class(s, bs)
    wd = validate_resonance_class(w)
    return {"passed": sd.passed and wd.passed, "max": None,
            "scattering": sd.as_dict(), "resonance": wd.as_dict()}


def check_blocks(w, s, p, bs, grid=512, tol=1e-9, degenerate=False):
    """
    The five residual blocks for a Wronskian pair.

    Each block holds ``passed`` (compared against ``tol``), ``max`` and the
    underlying residuals.  For the free pair only the unitarity and trace
    blocks apply.
    """
    out = {}
    out["unitarity"] = _guard(lambda: _unitarity_block(w, s, grid, tol))
    out["trp"] = _guard(lambda: _trp_block(w, s, p, tol))
    if degenerate:
        out["sw5"] = _missing("s = 0")
        out["boundary"] = _guard(lambda: dict(_boundary_block(w, s, tol), passed=None))
        out["class"] = _missing("s = 0 lies outside the scattering class")
    else:
        out["sw5"] = _guard(lambda: _sw5_block(w, s, tol))
        out["boundary"] = _guard(lambda: _boundary_block(w, s, tol))
        out["class"] = _guard(lambda: _class_block(w, s, bs))
    return out


def _all_missing(reason):
    return {k: _missing(reason) for k in BLOCKS}


def _fallback_checks(data, reason):
    # class diagnostics of the raw input when the pipeline stopped early
    out = _all_missing(reason)
    if data is None:
        return out
    if data["kind"] == "scattering":
        d = validate_scattering_class(RealPolynomial(data["s"]),
                                      BoundStateSet(tuple(data["bound_states"])))
        out["class"] = {"passed": d.passed, "max": None, "scattering": d.as_dict()}
    elif data["kind"] == "resonance":
        d = validate_resonance_class(RealPolynomial(data["w"]))
        out["class"] = {"passed": d.passed, "max": None, "resonance": d.as_dict()}
    return out


# =======
# Outputs
# =======

def _sequence_dict(q):
    return {"offset": q.offset, "a": list(q.a), "b": list(q.b)}


def _bound_state_list(w, s, bs):
    out = []
    try:
        nc = norming_constants(w, s, bs)
        mp, mm = nc.m_plus, nc.m_minus
    except JiscatError:
        mp = mm = (None,) * bs.N
    for z, lam, a, b in zip(bs.z_values, bs.lam, mp, mm):
        out.append({"z": z, "lambda": lam, "m_plus": a, "m_minus": b})
    return out


def _resonance_list(rs):
    return [{"re": z.real, "im": z.imag, "multiplicity": k} for z, k in rs.entries]


def _sigma_or_none(w, s):
    try:
        return list(sigma_of(s, canonical_zero_list(w)).sigma)
    except (JiscatError, ValueError, ArithmeticError):
        return None


def _pair_outputs(w, s):
    bs, rs = spectrum(w)
    return bs, {
        "w": w.tolist(),
        "s": s.tolist() if not s.is_zero() else [],
        "bound_states": _bound_state_list(w, s, bs),
        "resonances": _resonance_list(rs),
        "sigma": _sigma_or_none(w, s) if not s.is_zero() else None,
    }


# ========
# Commands
# ========

def _require(data, kind, command):
    if data["kind"] != kind:
        raise ProblemError("%s expects a %s file, got %s" % (command, kind, data["kind"]))


def _forward_pair(data):
    q = normalize(data["a"], data["b"], data["offset"])
    w, s = wronskian_pair(q)
    if q.is_free():
        return q, w, s, 1, True
    return q, w, s, classify(q).p, False


def _cmd_forward(data, args, res):
    _require(data, "sequence", "forward")
    q, w, s, p, free = _forward_pair(data)
    bs, outs = _pair_outputs(w, s)
    res["outputs"] = dict({"sequence": _sequence_dict(q), "class": None}, **outs)
    res["checks"] = check_blocks(w, s, p, bs, args.grid, args.tol, degenerate=free)
    if free:
        res["status"] = "degenerate: q=0"
        return 0
    par = classify(q)
    res["outputs"]["class"] = {"nu": par.nu, "tau": par.tau, "p": par.p, "m": par.m,
                               "translation": par.translation,
                               "in_theorem_scope": par.in_theorem_scope}
    res["status"] = "ok" if par.in_theorem_scope else "ok: below theorem scope (m < 3)"
    return 0


def _inverse_common(sd, args, res):
    kw = {}
    if args.range is not None:
        kw = {"lo": args.range[0], "hi": args.range[1]}
    rep = inverse_scattering_report(sd, **kw)
    bs, outs = _pair_outputs(rep.w, sd.s)
    res["outputs"] = dict({"sequence": _sequence_dict(rep.sequence)}, **outs)
    res["outputs"]["reconstruction"] = {
        "sites": list(rep.sites), "a": list(rep.a), "b": list(rep.b),
        "guard_residual": rep.guard_residual, "roundtrip_residual": rep.roundtrip_residual}
    res["checks"] = check_blocks(rep.w, sd.s, sd.p, bs, args.grid, args.tol)
    res["status"] = "ok"
    return 0


def _cmd_inverse_s(data, args, res):
    _require(data, "scattering", "inverse-s")
    sd = ScatteringData.from_s(RealPolynomial(data["s"]), data["bound_states"])
    return _inverse_common(sd, args, res)


def _cmd_inverse_w(data, args, res):
    _require(data, "resonance", "inverse-w")
    w = RealPolynomial(data["w"])
    sd = recover_s(w, SignSequence(tuple(data["sigma"])), nu=data.get("nu", 0))
    return _inverse_common(sd, args, res)


def _cmd_iso(data, args, res):
    _require(data, "sequence", "iso")
    q, w, s, p, free = _forward_pair(data)
    members = iso_enumerate(q)
    bs, outs = _pair_outputs(w, s)
    res["outputs"] = dict({"sequence": _sequence_dict(q)}, **outs)
    res["outputs"]["family"] = [
        {"sigma": list(m.sigma), "sequence": _sequence_dict(m.sequence),
         "w_residual": m.w_residual} for m in members]
    res["checks"] = check_blocks(w, s, p, bs, args.grid, args.tol)
    res["status"] = "ok"
    return 0


def _cmd_verify(data, args, res):
    if data["kind"] == "sequence":
        q, w, s, p, free = _forward_pair(data)
        seq = _sequence_dict(q)
    elif data["kind"] == "scattering":
        sd = ScatteringData.from_s(RealPolynomial(data["s"]), data["bound_states"])
        s, p, free, seq = sd.s, sd.p, False, None
        w = recover_w(sd)
    else:
        w = RealPolynomial(data["w"])
        sd = recover_s(w, SignSequence(tuple(data["sigma"])), nu=data.get("nu", 0))
        s, p, free, seq = sd.s, sd.p, False, None
    bs, outs = _pair_outputs(w, s)
    res["outputs"] = dict({"sequence": seq}, **outs)
    res["checks"] = check_blocks(w, s, p, bs, args.grid, args.tol, degenerate=free)
    if free:
        res["status"] = "degenerate: q=0"
        return 0
    failed = [k for k in BLOCKS if res["checks"][k]["passed"] is False]
    res["status"] = "ok" if not failed else "failed: " + ", ".join(failed)
    return 1 if failed else 0


COMMANDS = {
    "forward": _cmd_forward,
    "inverse-s": _cmd_inverse_s,
    "inverse-w": _cmd_inverse_w,
    "iso": _cmd_iso,
    "verify": _cmd_verify,
}


# ======
# Driver
# ======

def _range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO:HI, got %r" % text) from None
    if lo > hi:
        raise argparse.ArgumentTypeError("empty range %r" % text)
    return lo, hi


def _positive_float(text):
    x = float(text)
    if not x > 0.0:
        raise argparse.ArgumentTypeError("must be positive")
    return x


def _grid(text):
    n = int(text)
    if n < 16:
        raise argparse.ArgumentTypeError("grid must be at least 16")
    return n


def build_parser():
    ap = argparse.ArgumentParser(
        prog="jiscat",
        description="Forward and inverse resonance scattering for finitely "
                    "supported Jacobi perturbations.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("file", help="JSON problem file")
    ap.add_argument("--grid", type=_grid, default=512,
                    help="circle grid size for unitarity checks (default 512)")
    ap.add_argument("--tol", type=_positive_float, default=1e-9,
                    help="pass threshold for the check blocks (default 1e-9)")
    ap.add_argument("--output", default=None,
                    help="result path (default stdout); written atomically")
    ap.add_argument("--range", type=_range, default=None, metavar="LO:HI",
                    help="sites reconstructed by the inverse commands "
                         "(default -2:p+2)")
    return ap


def run(argv=None):
    """Run one command; returns ``(exit_code, result, parsed_args)``."""
    args = build_parser().parse_args(argv)
    res = {"command": args.command, "input": None, "status": None,
           "outputs": None, "checks": _all_missing("run aborted"), "error": None}
    code = 0
    try:
        data = load_problem(args.file)
        res["input"] = data
        code = COMMANDS[args.command](data, args, res)
    except (ProblemError, JiscatError) as exc:
        code = exc.exit_code
        kind = {1: "class", 2: "input", 3: "numerical"}[code]
        res["status"] = "error: %s" % kind
        res["error"] = {"type": type(exc).__name__, "exit_code": code, "message": str(exc)}
        if res["outputs"] is None:
            try:
                res["checks"] = _fallback_checks(res["input"], res["status"])
            except (JiscatError, ValueError, ArithmeticError):
                pass
    return code, res, args


def main(argv=None):
    code, res, args = run(argv)
    _write(dumps(res), args.output)
    if res["error"] is not None:
        sys.stderr.write("jiscat: %s: %s\n" % (res["error"]["type"], res["error"]["message"]))
    return code


if __name__ == "__main__":
    sys.exit(main())
