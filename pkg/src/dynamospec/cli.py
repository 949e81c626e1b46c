"""Command-line front end.

Every subcommand writes CSV or JSON to ``--output`` (or stdout) and, when
writing to a file, a ``<output>.manifest.json`` next to it.  ``dynamospec
rerun MANIFEST`` replays a manifest and reproduces the output byte for
byte.

Profile files are JSON objects::

    {"alpha0": 0.0, "epsilon_scale": 1.0, "mean": 0.0,
     "harmonics": [{"k": 2, "a": 2.5, "b": 0.0}]}

``mean`` is the average of the perturbation, i.e. half of the Fourier
``a0``.  Instead of ``harmonics`` a profile may give
``"samples": {"values": [...]}`` on a uniform grid over [0, 1] including
both endpoints.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .eig import EigenvalueError, SweepError, sweep
from .fourier import AlphaProfile, FourierSpectrum, q_factor
from .galerkin import GalerkinBasis
from .mesh import branch_eigenvalue, dp_from_node_l0, enumerate_dps, make_dp
from .quadrature import DEFAULT_ORDER, MIN_PANELS, QuadratureError
from .specfun import BesselRootError
from .unfolding import (critical_offset_l0, critical_profile_residual_l0, ep_offset_estimate_l0,
                        unfold_dp)

NUMERICAL_ERRORS = (EigenvalueError, SweepError, BesselRootError, QuadratureError, ArithmeticError)


class UsageError(ValueError):
    pass


# --- profile files ---------------------------------------------------------

_PROFILE_KEYS = {"alpha0", "epsilon_scale", "mean", "harmonics", "samples"}


def _number(doc, key, default=None):
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise UsageError(f"profile field {key!r} must be a finite number, got {v!r}")
    return float(v)


def profile_from_config(doc) -> AlphaProfile:
    """Validate a profile document and build the :class:`AlphaProfile`."""
    if not isinstance(doc, dict):
        raise UsageError("profile must be a JSON object")
    unknown = set(doc) - _PROFILE_KEYS
    if unknown:
        raise UsageError(f"unknown profile fields: {sorted(unknown)}")
    alpha0 = _number(doc, "alpha0", 0.0)
    eps = _number(doc, "epsilon_scale", 1.0)
    mean = _number(doc, "mean", 0.0)
    harmonics = doc.get("harmonics", [])
    samples = doc.get("samples")
    if not isinstance(harmonics, list):
        raise UsageError("'harmonics' must be a list")
    hs = []
    for h in harmonics:
        if not isinstance(h, dict) or set(h) - {"k", "a", "b"} or "k" not in h:
            raise UsageError(f"bad harmonic entry {h!r}; expected {{k, a, b}}")
        k = h["k"]
        if isinstance(k, bool) or not isinstance(k, int) or k < 1:
            raise UsageError(f"harmonic number must be an integer >= 1, got {k!r}")
        hs.append((k, _number(h, "a", 0.0), _number(h, "b", 0.0)))
    if len({k for k, _, _ in hs}) != len(hs):
        raise UsageError("harmonic numbers must be distinct")
    if samples is not None:
        if hs or mean != 0.0:
            raise UsageError("give either harmonics/mean or samples, not both")
        if not isinstance(samples, dict) or set(samples) != {"values"}:
            raise UsageError("'samples' must be an object with a 'values' list")
        vals = samples["values"]
        if not isinstance(vals, list) or len(vals) < 4:
            raise UsageError("samples need at least 4 values")
        vals = [_number({"v": v}, "v") for v in vals]
        return AlphaProfile(alpha0, eps, samples=tuple(vals))
    return AlphaProfile(alpha0, eps, FourierSpectrum(2.0 * mean, tuple(hs)))


def load_profile(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read profile {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"profile {path} is not valid JSON: {exc}") from exc


# --- formatting ------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _cplx(z):
    if z is None:
        return None
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _grid(lo, hi, steps):
    if steps <= 0 or hi < lo:
        return np.zeros(0)
    if steps == 1:
        return np.array([lo])
    return np.linspace(lo, hi, steps)


def _pair(text, name):
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{name} expects two comma-separated integers, got {text!r}") from exc
    return a, b


# --- commands --------------------------------------------------------------

def run_mesh(p) -> str:
    l, nmax = p["l"], p["n_max"]
    branches = list(range(nmax, 0, -1)) + list(range(-1, -nmax - 1, -1))
    rows = []
    for a0 in _grid(p["alpha0_min"], p["alpha0_max"], p["steps"]):
        for n in branches:
            rows.append((float(a0), n, float(branch_eigenvalue(l, n, float(a0))), 0.0))
    return _csv(["alpha0", "branch_n", "re_lambda", "im_lambda"], rows)


def run_dps(p) -> str:
    dps = enumerate_dps(p["l"], p["n_max"], (p["alpha0_min"], p["alpha0_max"]),
                        (p["lambda_min"], p["lambda_max"]))
    rows = [(d.alpha0_node, d.lambda_node, d.branch_a, d.branch_b, int(d.same_type), d.j, d.M)
            for d in dps]
    return _csv(["alpha0", "lambda", "n_a", "n_b", "same_type", "j", "M"], rows)


def _select_dp(p):
    if p.get("node"):
        if p["l"] != 0:
            raise UsageError("--node selects l=0 nodes only; use --branches")
        n, j = _pair(p["node"], "--node")
        if j == 0 or n == 0 or n + j == 0:
            raise UsageError(f"--node {n},{j} does not pair two branches")
        return dp_from_node_l0(n, j)
    if p.get("branches"):
        a, b = _pair(p["branches"], "--branches")
        if a == 0 or b == 0 or a == b:
            raise UsageError(f"--branches {a},{b} does not pair two branches")
        return make_dp(p["l"], a, b)
    raise UsageError("give --node n,j or --branches n_a,n_b")


def run_unfold(p) -> str:
    dp = _select_dp(p)
    profile = profile_from_config(p["profile"])
    res = unfold_dp(dp, profile, profile.epsilon_scale)
    out = {
        "l": dp.l,
        "dp": {"n_a": dp.branch_a, "n_b": dp.branch_b, "alpha0": dp.alpha0_node,
               "lambda": dp.lambda_node, "same_type": dp.same_type, "j": dp.j, "M": dp.M},
        "epsilon_scale": res.epsilon_scale,
        "lambda1_plus": _cplx(res.lambda1_plus),
        "lambda1_minus": _cplx(res.lambda1_minus),
        "ray_ratio_plus": _cplx(res.ray_ratio_plus),
        "ray_ratio_minus": _cplx(res.ray_ratio_minus),
        "regime": res.regime.value,
        "elements": dict(zip(("p_aa", "p_bb", "p_ab"), res.elements)),
        "discriminant": res.discriminant,
        "eigenvalues_first_order": [_cplx(z) for z in res.eigenvalues],
    }
    if dp.l == 0:
        spec = profile.spectrum()
        q = q_factor(spec, dp.j)
        out["q_j"] = q
        out["a0"] = spec.a0
        out["critical_offset"] = (critical_offset_l0(dp.n, dp.j, q)
                                  if dp.n * (dp.n + dp.j) < 0 else None)
    return _json(out)


def run_sweep(p) -> str:
    profile = profile_from_config(p["profile"])
    basis = GalerkinBasis.symmetric(p["l"], p["N"])
    grid = _grid(p["alpha0_min"], p["alpha0_max"], p["steps"])
    if len(grid) == 0:
        return _csv(["alpha0", "branch_label", "re_lambda", "im_lambda"], [])
    table = sweep(p["l"], basis, profile, grid)
    return _csv(["alpha0", "branch_label", "re_lambda", "im_lambda"], table.rows())


def run_critical(p) -> str:
    if p["l"] != 0:
        raise UsageError("critical-profile estimates exist for l=0 only")
    profile = profile_from_config(p["profile"])
    spec = profile.delta_spectrum(p["harmonics"])
    entries = []
    for M in range(p["M_min"], p["M_max"] + 1):
        for j in range(abs(M) + 2, p["j_max"] + 1, 2):
            q = q_factor(spec, j)
            res = critical_profile_residual_l0(M, j, q)
            q_crit = math.pi * j * math.sqrt(j * j - M * M) / M if M > 0 else None
            entries.append({
                "M": M, "j": j, "q_j": q,
                "ep_offset": ep_offset_estimate_l0(M, j, q).offset,
                "residual": res,
                "q_critical": q_crit,
                "overcritical": res > 0,
            })
    out = {
        "a0": spec.a0,
        "entries": entries,
        "zero_crossings": [{"M": e["M"], "j": e["j"]} for e in entries if e["overcritical"]],
        "max_residual": max((e["residual"] for e in entries), default=None),
    }
    return _json(out)


COMMANDS = {
    "mesh": run_mesh,
    "dps": run_dps,
    "unfold": run_unfold,
    "sweep": run_sweep,
    "critical": run_critical,
}


def manifest(command: str, params: dict) -> dict:
    return {
        "tool": "dynamospec",
        "version": __version__,
        "command": command,
        "parameters": params,
        "quadrature": {"scheme": "composite-gauss-legendre", "order": DEFAULT_ORDER,
                       "min_panels": MIN_PANELS, "panels_per_mode": 4},
    }


# --- argument parsing ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynamospec", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, output=True):
        sp.add_argument("--l", type=int, default=0, help="spherical-harmonic degree")
        if output:
            sp.add_argument("-o", "--output", help="output file (default: stdout)")

    sp = sub.add_parser("mesh", help="unperturbed branches over an alpha0 grid (CSV)")
    common(sp)
    sp.add_argument("--n-max", type=int, default=3)
    sp.add_argument("--alpha0-min", type=float, default=0.0)
    sp.add_argument("--alpha0-max", type=float, default=2 * math.pi)
    sp.add_argument("--steps", type=int, default=101, help="number of grid points")

    sp = sub.add_parser("dps", help="diabolical points inside a window (CSV)")
    common(sp)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--alpha0-min", type=float, default=-math.inf)
    sp.add_argument("--alpha0-max", type=float, default=math.inf)
    sp.add_argument("--lambda-min", type=float, default=-math.inf)
    sp.add_argument("--lambda-max", type=float, default=math.inf)

    sp = sub.add_parser("unfold", help="first-order unfolding of one diabolical point (JSON)")
    common(sp)
    sel = sp.add_mutually_exclusive_group(required=True)
    sel.add_argument("--node", help="l=0 node as n,j (branches n and n+j)")
    sel.add_argument("--branches", help="branch pair as n_a,n_b")
    sp.add_argument("--profile", required=True, help="profile JSON file")

    sp = sub.add_parser("sweep", help="Galerkin spectra over an alpha0 grid (CSV)")
    common(sp)
    sp.add_argument("--N", type=int, default=24, help="basis size (even)")
    sp.add_argument("--profile", required=True)
    sp.add_argument("--alpha0-min", type=float, default=0.0)
    sp.add_argument("--alpha0-max", type=float, default=8 * math.pi)
    sp.add_argument("--steps", type=int, default=401)

    sp = sub.add_parser("critical", help="l=0 critical-profile residuals (JSON)")
    common(sp)
    sp.add_argument("--profile", required=True)
    sp.add_argument("--M-min", type=int, default=-12)
    sp.add_argument("--M-max", type=int, default=12)
    sp.add_argument("--j-max", type=int, default=12)
    sp.add_argument("--harmonics", type=int, default=16,
                    help="Fourier harmonics extracted from sampled profiles")

    sp = sub.add_parser("rerun", help="replay a manifest")
    sp.add_argument("manifest")
    sp.add_argument("-o", "--output")
    return ap


def _params(args) -> dict:
    p = {k: v for k, v in vars(args).items() if k not in ("command", "output")}
    if "profile" in p:
        p["profile"] = load_profile(p["profile"])
    for k, v in p.items():
        if isinstance(v, float) and not math.isfinite(v):
            p[k] = repr(v)
    return p


def _restore(p: dict) -> dict:
    return {k: (float(v) if isinstance(v, str) and v in ("inf", "-inf") else v) for k, v in p.items()}


def _validate(command, p):
    if command in ("mesh", "dps") and p["n_max"] < (1 if command == "mesh" else 2):
        raise UsageError("--n-max too small")
    if p.get("l", 0) < 0:
        raise UsageError("--l must be non-negative")
    if command == "sweep" and (p["N"] < 2 or p["N"] % 2):
        raise UsageError("--N must be an even integer >= 2")


def _emit(text: str, output, man: dict | None):
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
        if man is not None:
            Path(f"{output}.manifest.json").write_text(_json(man), encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "rerun":
            man = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
            command, params = man["command"], man["parameters"]
            if command not in COMMANDS:
                raise UsageError(f"manifest names unknown command {command!r}")
        else:
            command, params = args.command, _params(args)
            man = manifest(command, params)
        resolved = _restore(params)
        _validate(command, resolved)
        text = COMMANDS[command](resolved)
    except NUMERICAL_ERRORS as exc:
        print(f"dynamospec: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (UsageError, KeyError, OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"dynamospec: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.output, man)
    return 0


if __name__ == "__main__":
    sys.exit(main())
