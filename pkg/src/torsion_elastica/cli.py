"""Command-line front end.

Every run is driven by one JSON config; flags only pick the command and
override the output directory, station count and seed.  Exit codes: 0 when
the verdict holds (or the comparison is within tolerance), 1 when it does
not, 2 on any error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .curves import curve_from_config, darboux_state, total_square_curvature, total_square_torsion
from .elastic import Tolerances, verify_relaxed_elastic
from .errors import ConfigError, GeometryError
from .quadrature import QuadratureSpec
from .relax import RelaxConfig, checkpoint, discretize, relax
from .surfaces import patch_from_config
from .variation import dlambda_dt, first_variation_analytic, first_variation_fd, make_family

log = logging.getLogger("torsion_elastica")

_NUM = {"type": "number"}
_NULLNUM = {"type": ["number", "null"]}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["surface", "curve"],
    "properties": {
        "surface": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["plane", "sphere", "cylinder", "torus", "graph", "dsl"]},
                "params": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"R": _NUM, "r": _NUM},
                },
                "expr": {"type": "string"},
                "flip": {"type": "boolean"},
                "domain": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NULLNUM},
                },
            },
        },
        "curve": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "u": {"type": "string"},
                "v": {"type": "string"},
                "length": {"type": "number", "exclusiveMinimum": 0},
                "extension": {"type": "number", "exclusiveMinimum": 0},
                "parameter": {"enum": ["arc_length", "general"]},
                "points": {
                    "type": "array", "minItems": 6,
                    "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM},
                },
            },
            "oneOf": [{"required": ["u", "v", "length"]}, {"required": ["points"]}],
        },
        "variation": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mu"],
            "properties": {
                "mu": {"anyOf": [
                    {"type": "string"},
                    {"type": "array", "items": _NUM, "minItems": 1},
                    {
                        "type": "object", "additionalProperties": False, "required": ["bump"],
                        "properties": {
                            "bump": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
                            "power": {"type": "integer", "minimum": 3},
                        },
                    },
                ]},
                "t_steps": {"type": "array", "items": _NUM, "minItems": 2},
                "l_star_factor": {"type": "number", "exclusiveMinimum": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "abs_tol": _NUM,
                "rel_tol": _NUM,
                "lambda_tol": _NUM,
            },
        },
        "relax": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "N": {"type": "integer"},
                "max_iters": {"type": "integer"},
                "step_rule": {"enum": ["armijo", "fixed"]},
                "direction": {"enum": ["gauss_newton", "gradient"]},
                "fixed_step": _NUM,
                "armijo_c": _NUM,
                "fd_step": _NUM,
                "f_tol": _NUM,
                "grad_tol": _NUM,
                "stall_iters": {"type": "integer"},
                "max_rejections": {"type": "integer"},
                "damping": _NUM,
                "speed_weight": _NUM,
                "restarts": {"type": "integer", "minimum": 0},
                "restart_scale": _NUM,
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"E": _NUM, "B": _NUM, "classification": _NULLNUM},
        },
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nodes": {"type": "integer", "minimum": 2},
                "panels": {"type": "integer", "minimum": 1},
            },
        },
        "stations": {"type": "integer", "minimum": 2},
        "seed": {"type": "integer"},
        "label": {"type": "string"},
    },
}


# ---------------------------------------------------------------------------
# Config loading


def _line_of(text: str, path) -> int | None:
    """Best-effort line number of the JSON element at ``path``."""
    pos = 0
    for key in path:
        if isinstance(key, str):
            i = text.find(json.dumps(key), pos)
            if i < 0:
                return None
            pos = i
    return text.count("\n", 0, pos) + 1


def load_config(path: str | Path):
    """Parse and validate; returns (config dict, sha256 of the file bytes)."""
    raw = Path(path).read_bytes()
    text = raw.decode("utf-8")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        where = "$" + "".join(f"[{k}]" if isinstance(k, int) else f".{k}" for k in e.absolute_path)
        bad = getattr(e, "instance", None)
        path_for_line = list(e.absolute_path)
        if e.validator == "additionalProperties" and isinstance(bad, dict):
            extra = sorted(set(bad) - set(e.schema.get("properties", {})))
            path_for_line += extra[:1]
        line = _line_of(text, path_for_line)
        loc = f"{path}:{line}" if line else str(path)
        raise ConfigError(f"{loc}: at {where}: {e.message}")
    return cfg, hashlib.sha256(raw).hexdigest()


def _curve_cfg(cfg):
    c = dict(cfg["curve"])
    factor = cfg.get("variation", {}).get("l_star_factor")
    if factor is not None and "extension" not in c and "length" in c:
        c["extension"] = factor * c["length"]
    return c


def build_curve(cfg):
    patch = patch_from_config(cfg["surface"])
    return curve_from_config(_curve_cfg(cfg), patch)


def _tolerances(cfg):
    return Tolerances(**cfg.get("tolerances", {}))


def _quad(cfg):
    return QuadratureSpec(**cfg.get("quadrature", {}))


# ---------------------------------------------------------------------------
# Output


class Output:
    def __init__(self, outdir: Path, sha: str, orientation: str):
        self.dir = Path(outdir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.sha = sha
        self.orientation = orientation

    def csv(self, name, header, rows):
        p = self.dir / name
        with open(p, "w", newline="") as fh:
            fh.write(f"# config_sha256: {self.sha}\n")
            fh.write(f"# orientation: {self.orientation}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        return p

    def json(self, name, doc):
        doc = {**doc, "config_sha256": self.sha, "orientation": self.orientation}
        p = self.dir / name
        p.write_text(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")
        return p


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


# ---------------------------------------------------------------------------
# Commands


def cmd_invariants(cfg, out: Output, stations: int) -> int:
    curve = build_curve(cfg)
    s = np.linspace(0.0, curve.length, stations)
    st = darboux_state(curve, s)
    header = ["s"]
    cols = [s]
    for name in ("kg", "kn", "tg", "tau"):
        arr = getattr(st, name)
        for k in range(4):
            header.append(name + (str(k) if k else ""))
            cols.append(arr[k])
    header += ["kappa2", "p", "q"]
    cols += [st.kappa2, st.p, st.q]
    out.csv("invariants.csv", header, zip(*cols))
    return 0


def cmd_residual(cfg, out: Output, stations: int) -> int:
    curve = build_curve(cfg)
    rep = verify_relaxed_elastic(curve, _tolerances(cfg), stations)
    out.csv("residual.csv", ["s", "E", "E_normalized"], zip(rep.stations, rep.E_values, rep.E_normalized))
    out.json("residual.json", rep.to_dict())
    if not rep.verdict:
        print("verdict false; violated: " + ", ".join(rep.violated), file=sys.stderr)
    return 0 if rep.verdict else 1


def cmd_variation_check(cfg, out: Output, stations: int) -> int:
    if "variation" not in cfg:
        raise ConfigError("variation-check needs a 'variation' section")
    var = cfg["variation"]
    curve = build_curve(cfg)
    fam = make_family(curve, var["mu"], var.get("eps"))
    steps = None
    if "t_steps" in var:
        steps = sorted({abs(float(t)) for t in var["t_steps"] if t != 0}, reverse=True)
    quad = _quad(cfg)
    fd = first_variation_fd(fam, steps=steps, quad=quad)
    an = first_variation_analytic(curve, fam.field, quad)
    lam_fd, lam_formula = dlambda_dt(fam)
    abs_tol, rel_tol = var.get("abs_tol", 1e-5), var.get("rel_tol", 1e-4)
    lam_tol = var.get("lambda_tol", 1e-6)

    d1 = abs(float(fd.value) - an.total)
    ok1 = d1 <= max(abs_tol, rel_tol * abs(an.total))
    d2 = abs(float(lam_fd.value) - lam_formula)
    ok2 = d2 <= lam_tol * max(1.0, abs(lam_formula))
    rel = lambda d, ref: d / abs(ref) if ref else (0.0 if d == 0 else float("inf"))
    rows = [
        ["dF/dt", float(fd.value), an.total, d1, rel(d1, an.total), fd.error, fd.converged, ok1],
        ["dlambda/dt", float(lam_fd.value), lam_formula, d2, rel(d2, lam_formula), lam_fd.error,
         lam_fd.converged, ok2],
    ]
    out.csv("variation_check.csv",
            ["quantity", "fd", "analytic", "abs_diff", "rel_diff", "fd_error", "fd_converged", "within_tol"],
            rows)
    out.json("variation_check.json", {
        "mu": var["mu"],
        "eps": fam.eps,
        "first_variation": {
            "fd": float(fd.value), "fd_error": fd.error, "fd_converged": fd.converged,
            "interior": an.interior, "b1_term": an.b1_term, "b2_term": an.b2_term,
            "b3_term": an.b3_term, "total": an.total, "abs_diff": d1, "within_tol": ok1,
        },
        "dlambda_dt": {"fd": float(lam_fd.value), "formula": lam_formula, "abs_diff": d2, "within_tol": ok2},
    })
    return 0 if (ok1 and ok2) else 1


def cmd_relax(cfg, out: Output, stations: int, seed: int) -> int:
    opts = dict(cfg.get("relax", {}))
    names = {f.name for f in fields(RelaxConfig)}
    rc = RelaxConfig(**{k: v for k, v in opts.items() if k in names}, seed=seed,
                     tolerances=_tolerances(cfg))
    curve = build_curve(cfg)
    res = relax(discretize(curve, rc.N), rc)
    out.json("relax_checkpoint.json", checkpoint(res, cfg))
    out.csv("relax_history.csv", ["iteration", "F"], enumerate(res.history))
    out.csv("relax_nodes.csv", ["u", "v"], res.curve.nodes.tolist())
    if res.report is not None:
        out.json("relax_report.json", res.report.to_dict())
    print(f"relax: status={res.status} iterations={res.iterations} F={res.history[-1]:.3e} "
          f"verdict={res.verdict}", file=sys.stderr)
    return 0 if res.verdict else 1


def cmd_functional(cfg, out: Output, stations: int) -> int:
    curve = build_curve(cfg)
    quad = _quad(cfg)
    F = total_square_torsion(curve, quad)
    K = total_square_curvature(curve, quad)
    out.csv("functional.csv", ["quantity", "value", "error"],
            [["length", curve.length, 0.0], ["F", F.value, F.error], ["K", K.value, K.error]])
    return 0


COMMANDS = {
    "invariants": cmd_invariants,
    "residual": cmd_residual,
    "variation-check": cmd_variation_check,
    "relax": cmd_relax,
    "functional": cmd_functional,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="torsion-elastica", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--out", default="out", help="output directory (default: ./out)")
    ap.add_argument("--stations", type=int, default=None, help="number of arc-length stations")
    ap.add_argument("--seed", type=int, default=None, help="random seed (relax restarts)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, sha = load_config(args.config)
        stations = args.stations if args.stations is not None else cfg.get("stations", 101)
        if stations < 2:
            raise ConfigError("--stations must be at least 2")
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        patch = patch_from_config(cfg["surface"])
        out = Output(Path(args.out), sha, patch.orientation)
        fn = COMMANDS[args.command]
        if args.command == "relax":
            return fn(cfg, out, stations, seed)
        return fn(cfg, out, stations)
    except (GeometryError, OSError, ArithmeticError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
