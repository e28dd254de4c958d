"""Command-line front end: deterministic JSON output and the L-value cache.

Subcommands: coeff, shintani, lfun, orbits, weights, chars, selftest.
Every run prints one JSON document to stdout (pretty by default, compact
with --json); reruns with identical inputs and a warm cache are
byte-identical.  Exit codes: 0 success, 2 usage error, 3 numeric
instability (with a machine-readable error object).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from fractions import Fraction

from mpmath import mpf, mpc

from .arith import PlaceSet, cclass_reps, sclass_reps
from .characters import enum_cubic_chars, enum_quad_chars, QuadChar
from . import lfun
from .coeff import CoeffResult, VolumeParams, coeff_unipotent, endoscopic_diff
from .quadforms import OrbitClass, SymForm2, hasse_profile, unipotent_orbit_set
from .shintani import ShintaniConfig, shintani_run
from . import weights as wmod
from . import selfcheck

CACHE_ENV = "TRACECOEF_CACHE"


# ---------------------------------------------------------------------------
# Deterministic JSON rendering
# ---------------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(obj[k]) for k in sorted(obj, key=str)}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, mpf):
        return float(obj)
    if isinstance(obj, mpc):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _plain(dataclasses.asdict(obj))
    if isinstance(obj, (frozenset, set)):
        return sorted(_plain(x) for x in obj)
    if isinstance(obj, float) and obj != obj:  # NaN is not valid JSON
        return "nan"
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def render_json(obj, pretty=True) -> str:
    doc = _plain(obj)
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    return json.dumps(doc, separators=(",", ":"), sort_keys=True, allow_nan=False)


def _coeff_doc(res: CoeffResult) -> dict:
    return {
        "terms": [
            {
                "prefactor": t.prefactor,
                "volume": t.volume,
                "factors": [{"name": n, "value": v} for n, v in t.factors],
                "value": t.value,
            }
            for t in res.terms
        ],
        "value": res.value,
        "error": res.error,
        "provenance": res.provenance,
        "notes": res.notes,
    }


# ---------------------------------------------------------------------------
# JSON-lines L-value cache
# ---------------------------------------------------------------------------

class JsonlCache:
    """Append-only cache of L(1,chi_D) records, one JSON object per line.

    Reads tolerate duplicate keys (the record with the most digits wins,
    ties going to the last one) and skip corrupt lines with a warning.
    """

    def __init__(self, path: str | None):
        self.path = path
        self._mem: dict[int, dict] = {}
        if path and os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = json.loads(line)
                        D = int(rec["D"])
                    except (ValueError, KeyError, TypeError):
                        print(f"warning: skipping corrupt cache line: {line[:60]}",
                              file=sys.stderr)
                        continue
                    old = self._mem.get(D)
                    if old is None or rec.get("digits", 0) >= old.get("digits", 0):
                        self._mem[D] = rec

    def get(self, D: int):
        return self._mem.get(int(D))

    def put(self, rec: dict):
        D = int(rec["D"])
        old = self._mem.get(D)
        if old is not None and old.get("digits", 0) > rec.get("digits", 0):
            return
        self._mem[D] = rec
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(_plain(rec), sort_keys=True) + "\n")


def open_cache(path: str | None) -> JsonlCache:
    return JsonlCache(path or os.environ.get(CACHE_ENV))


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------

class UsageError(ValueError):
    pass


def _parse_S(text: str | None) -> PlaceSet:
    if not text:
        return PlaceSet.of()
    primes = [int(p) for p in text.split(",") if p.strip()]
    return PlaceSet.of(*primes)


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _parse_list(text: str, conv=float) -> list:
    return [conv(x) for x in text.split(",") if x.strip()]


def _vols(args) -> VolumeParams:
    return VolumeParams(
        vol_m0=args.vol_m0, vol_m1=args.vol_m1, vol_m2=args.vol_m2,
        vol_mp=args.vol_mp, vol_g=args.vol_g,
    )


def _add_common(p):
    p.add_argument("--S", default="2", help="comma-separated finite primes of S (oo implicit)")
    p.add_argument("--digits", type=int, default=30, help="working precision in decimal digits")
    p.add_argument("--cache", default=None, help=f"L-value cache path (default ${CACHE_ENV})")
    p.add_argument("--json", action="store_true", help="compact single-line JSON output")
    p.add_argument("--vol-m0", dest="vol_m0", type=float, default=1.0)
    p.add_argument("--vol-m1", dest="vol_m1", type=float, default=1.0)
    p.add_argument("--vol-m2", dest="vol_m2", type=float, default=1.0)
    p.add_argument("--vol-mp", dest="vol_mp", type=float, default=1.0)
    p.add_argument("--vol-g", dest="vol_g", type=float, default=1.0)
    p.add_argument("--X", type=int, default=10**5, help="discriminant truncation bound")
    p.add_argument("--eps", default="0.2,0.15,0.1,0.05", help="epsilon grid, descending")
    p.add_argument("--seed", type=int, default=selfcheck.SEED)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tracecoef",
        description="geometric-side coefficients of the rank-2 symplectic trace formula over Q",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", help="unipotent orbital-integral coefficients")
    _add_common(p)
    p.add_argument("--group", required=True,
                   choices=["gl2", "sl2", "gl3", "sl3", "gsp2", "sp2"])
    p.add_argument("--orbit", default="min", help="tri|min|sub|reg")
    p.add_argument("--alpha", default="1", help="square/cube class parameter")
    p.add_argument("--form", default=None,
                   help="a,b,c entries of the symmetric form for subregular orbits")

    p = sub.add_parser("shintani", help="Shintani zeta grid, residue and constant term")
    _add_common(p)
    p.add_argument("--alpha", default="-1")
    p.add_argument("--l1-method", dest="l1_method", default="class-number-formula",
                   choices=["class-number-formula", "smoothed-character-sum"])

    p = sub.add_parser("lfun", help="partial L-function values and Laurent data")
    _add_common(p)
    p.add_argument("--chi", type=int, default=1,
                   help="fundamental discriminant of the character (1 = trivial)")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--deriv", action="store_true")
    p.add_argument("--laurent", action="store_true")

    p = sub.add_parser("orbits", help="unipotent orbit enumeration")
    _add_common(p)
    p.add_argument("--group", required=True,
                   choices=["gl2", "sl2", "gl3", "sl3", "gsp2", "sp2"])

    p = sub.add_parser("weights", help="weight factors, closed form and engine")
    _add_common(p)
    p.add_argument("--which", required=True,
                   choices=["m0", "m1", "m2", "gl3-m0", "gl3-mp"])
    p.add_argument("--nu", required=True, help="entries n12,n13,n14,n24 (gl3: n12,n13,n23)")
    p.add_argument("--u", default=None, help="Levi unipotent entry for the mixed cases")
    p.add_argument("--T", default="0,0")
    p.add_argument("--engine", action="store_true",
                   help="also run the numeric family-limit cross-check")

    p = sub.add_parser("chars", help="character enumeration")
    _add_common(p)
    p.add_argument("--cubic", action="store_true")

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    _add_common(p)
    p.add_argument("--quick", action="store_true", help="reduced sizes, same checks")
    p.add_argument("--criteria", default=None, help="comma list of criterion ids")

    p = sub.add_parser("diff", help="symplectic-vs-similitude coefficient difference")
    _add_common(p)
    p.add_argument("--orbit", default="min", choices=["min", "sub", "reg"])
    p.add_argument("--alpha", default="1")
    p.add_argument("--form", default=None)

    return ap


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------

def _shintani_config(args) -> ShintaniConfig:
    lfun.PrecisionConfig(working_digits=args.digits)  # validates >= 15
    return ShintaniConfig(
        X=args.X,
        eps_grid=tuple(_parse_list(args.eps)),
        L1_method=getattr(args, "l1_method", "class-number-formula"),
        digits=args.digits,
    )


def _orbit_argument(args, S):
    if args.form:
        a, b, c = _parse_list(args.form, _parse_fraction)
        return SymForm2(a, b, c)
    if args.orbit in ("sub", "sub'"):
        return SymForm2.x_alpha(_parse_fraction(args.alpha))
    return args.orbit


def cmd_coeff(args) -> dict:
    S = _parse_S(args.S)
    vols = _vols(args)
    cache = open_cache(args.cache)
    cfg = _shintani_config(args)
    alpha = _parse_fraction(args.alpha)
    g = args.group
    orbit_arg = _orbit_argument(args, S)
    if isinstance(orbit_arg, SymForm2):
        orbit = OrbitClass(g, "sub", orbit_arg)
    else:
        typ = {"min": "min", "tri": "tri", "reg": "reg"}.get(args.orbit)
        if typ is None:
            raise UsageError(f"unknown orbit {args.orbit!r} for group {g}")
        param = alpha if g in ("sl2", "sl3", "sp2") else None
        if g in ("gl2", "sl2") and typ == "min":
            typ = "reg"  # the rank-1 groups have a single nontrivial type
        orbit = OrbitClass(g, typ, param)
    res = coeff_unipotent(orbit, S, vols, cfg, cache, args.digits)
    return {
        "command": "coeff",
        "inputs": {"group": g, "orbit": str(orbit), "S": str(S), "alpha": alpha,
                   "X": args.X, "digits": args.digits},
        "result": _coeff_doc(res),
    }


def cmd_shintani(args) -> dict:
    S = _parse_S(args.S)
    S.require_2("the shintani command")
    cache = open_cache(args.cache)
    cfg = _shintani_config(args)
    alpha = _parse_fraction(args.alpha)
    res = shintani_run(alpha, S, cfg, cache)
    doc = {
        "command": "shintani",
        "inputs": {"alpha": alpha, "S": str(S), "X": cfg.X, "eps_grid": list(cfg.eps_grid),
                   "l1_method": cfg.L1_method},
        "result": {
            "grid_values": {str(e): v for e, v in res.grid_values.items()},
            "residue_estimate": res.residue_estimate,
            "residue_exact": res.residue_exact,
            "residue_error": res.residue_error,
            "constant": res.constant_CF,
            "constant_error": res.constant_error,
            "unstable": res.unstable,
            "diagnostics": {
                "n_terms": res.diagnostics["constant"]["n_terms"],
                "kappa_star": res.diagnostics["constant"]["kappa_star"],
                "kappa_hat": res.diagnostics["constant"]["kappa_hat"],
            },
        },
    }
    if res.unstable:
        doc["error"] = {"code": "shintani-unstable",
                        "message": "extrapolants disagree beyond tolerance; increase X"}
    return doc


def cmd_lfun(args) -> dict:
    S = _parse_S(args.S)
    chi = None if args.chi == 1 else QuadChar(args.chi)
    out: dict = {"command": "lfun",
                 "inputs": {"chi": args.chi, "S": str(S), "s": args.s,
                            "digits": args.digits}}
    if args.laurent:
        ld = lfun.laurent_at_1(chi, S, args.digits)
        out["result"] = {"center": 1.0, "residue": ld.residue, "c0": ld.c0, "c1": ld.c1}
        return out
    if args.deriv:
        out["result"] = {"derivative": lfun.deriv_LS(args.s, chi, S, args.digits)}
        return out
    out["result"] = {"value": lfun.LS(args.s, chi, S, args.digits)}
    return out


def cmd_orbits(args) -> dict:
    S = _parse_S(args.S)
    orbits = unipotent_orbit_set(args.group, S)
    items = []
    for o in orbits:
        entry = {"type": o.type}
        if isinstance(o.param, SymForm2):
            entry["form"] = [o.param.a, o.param.b, o.param.c]
            entry["minus_det"] = -o.param.det
            entry["hasse"] = {str(v): e for v, e in hasse_profile(o.param, S).items()}
        elif o.param is not None:
            entry["param"] = getattr(o.param, "value", o.param)
        items.append(entry)
    return {
        "command": "orbits",
        "inputs": {"group": args.group, "S": str(S)},
        "result": {"count": len(orbits), "orbits": items},
    }


def cmd_weights(args) -> dict:
    S = _parse_S(args.S)
    T1, T2 = _parse_list(args.T)
    T = wmod.TruncParam(T1, T2)
    u = _parse_fraction(args.u) if args.u is not None else None
    entries = _parse_list(args.nu, _parse_fraction)
    if args.which.startswith("gl3"):
        if len(entries) != 3:
            raise UsageError("gl3 weights need nu = n12,n13,n23")
        nu = wmod.Nu3Entries(*entries, S)
        if args.which == "gl3-m0":
            closed, family, dims = wmod.w_M0_gl3(nu, T), wmod.family_m0_gl3(nu, T), 2
        else:
            closed = wmod.w_Mp_gl3(nu, T, u12=u)
            family, dims = wmod.family_mp_gl3(nu, T, u12=u), 1
    else:
        if len(entries) != 4:
            raise UsageError("symplectic weights need nu = n12,n13,n14,n24")
        nu = wmod.NuEntries(*entries, S)
        if args.which == "m0":
            closed, family, dims = wmod.w_M0(nu, T), wmod.family_m0(nu, T), 2
        elif args.which == "m1":
            closed = wmod.w_M1(nu, T, u12=u)
            family, dims = wmod.family_m1(nu, T, u12=u), 1
        else:
            closed = wmod.w_M2(nu, T, u24=u)
            family, dims = wmod.family_m2(nu, T, u24=u), 1
    result = {"closed_form": closed}
    if args.engine:
        lim, err = wmod.gm_family_limit(family, dims=dims, seed=args.seed)
        result["engine_limit"] = lim
        result["engine_error"] = err
        result["deviation"] = abs(lim - closed)
    return {
        "command": "weights",
        "inputs": {"which": args.which, "nu": entries, "u": u, "T": [T1, T2], "S": str(S)},
        "result": result,
    }


def cmd_chars(args) -> dict:
    S = _parse_S(args.S)
    quad = [ch.D for ch in enum_quad_chars(S)]
    result = {"quadratic_discriminants": quad,
              "square_classes": [r.value for r in sclass_reps(S)]}
    if args.cubic:
        result["cubic_moduli"] = [ch.modulus for ch in enum_cubic_chars(S)]
        result["cube_classes"] = [r.value for r in cclass_reps(S)]
    return {"command": "chars", "inputs": {"S": str(S)}, "result": result}


def cmd_diff(args) -> dict:
    S = _parse_S(args.S)
    vols = _vols(args)
    cache = open_cache(args.cache)
    cfg = _shintani_config(args)
    param: object = _parse_fraction(args.alpha)
    if args.orbit == "sub":
        if args.form:
            a, b, c = _parse_list(args.form, _parse_fraction)
            param = SymForm2(a, b, c)
        else:
            param = SymForm2.x_alpha(param)
    d = endoscopic_diff(S, args.orbit, param, vols, cfg, cache, args.digits)
    return {
        "command": "diff",
        "inputs": {"orbit": args.orbit, "S": str(S), "alpha": args.alpha},
        "result": {
            "two_path_difference": d["difference"].value,
            "predicted": _coeff_doc(d["predicted"]),
            "sp2_value": d["sp2"].value,
            "gsp2_value": d["gsp2"].value,
            "deviation": abs(d["difference"].value - d["predicted"].value),
            "error_bars": d["difference"].error,
        },
    }


def cmd_selftest(args) -> dict:
    cache = open_cache(args.cache)
    ids = None
    if args.criteria:
        ids = [int(x) for x in args.criteria.split(",") if x.strip()]
    results = selfcheck.run_criteria(ids, quick=args.quick, cache=cache)
    if ids is None or 11 in (ids or []):
        results.append(selfcheck.determinism_check(cache=cache))
    table = [
        {"id": r["id"], "name": r["name"], "passed": r["passed"], "details": r["details"]}
        for r in results
    ]
    return {
        "command": "selftest",
        "inputs": {"quick": args.quick},
        "result": {
            "criteria": table,
            "all_passed": all(r["passed"] for r in results),
        },
    }


COMMANDS = {
    "coeff": cmd_coeff,
    "shintani": cmd_shintani,
    "lfun": cmd_lfun,
    "orbits": cmd_orbits,
    "weights": cmd_weights,
    "chars": cmd_chars,
    "selftest": cmd_selftest,
    "diff": cmd_diff,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        doc = COMMANDS[args.command](args)
    except (UsageError, ValueError, lfun.PoleError) as e:
        print(render_json({"error": {"code": "usage", "message": str(e)}},
                          pretty=not getattr(args, "json", False)))
        return 2
    except (wmod.FamilyLimitError, RuntimeError) as e:
        print(render_json({"error": {"code": "numeric-instability", "message": str(e)}},
                          pretty=not getattr(args, "json", False)))
        return 3
    print(render_json(doc, pretty=not args.json))
    if doc.get("error") or (
        args.command == "selftest" and not doc["result"]["all_passed"]
    ):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
