"""Command-line interface.

Subcommands:
  solve-phases    homodyne phases realising a target operation
  error-surface   closed-form error multipliers on a (b, d) grid (CSV)
  simulate        Monte Carlo run with closed-form cross-check (JSON)
  gain-surface    correction-failure probability ratios (CSV + summary)
  weight-bound    largest admissible cluster weight for a squeezing level
  cz-decompose    five-factor optical decomposition of a weighted CZ gate

Value flags may also be supplied through ``--config FILE`` (JSON);
explicit flags win over the file, the file wins over built-in defaults.
A run manifest written next to a previous output (``<out>.manifest.json``)
is accepted directly as a config file, which reproduces that run
bit-for-bit: data outputs never contain timestamps.

Exit codes: 0 success; 2 invalid input or configuration (a JSON object
with ``error`` and ``message`` fields is printed to stderr); 3 for
``simulate`` when a consistency z-score exceeds the gate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    CubicConfig,
    DegenerateD,
    DenominatorPole,
    DomainError,
    InvalidReflectivity,
    NonpositiveIm,
    NotSymplectic,
    SqueezingSpec,
    SymplecticTarget,
    WeightConfig,
)
from .czgate import bloch_messiah, max_weight
from .errormodel import (
    MODE_CUBIC_OPTIMIZED,
    MODE_GAUSSIAN_FIXED,
    MODE_GAUSSIAN_OPTIMIZED,
    MODES,
    ErrorSurfaceSpec,
    error_surface,
)
from .gkp import gain_surface
from .phases import solve_phases, theta2_unprimed, theta4_unprimed
from .simulate import (
    RECORD_COLUMNS,
    VARIANT_CUBIC,
    VARIANT_GAUSSIAN,
    VARIANTS,
    InputState,
    SimConfig,
    run,
)

__all__ = ["main"]

MANIFEST_SCHEMA_VERSION = 1
WORKERS_ENV = "CLUSTERGAUSS_WORKERS"

ERROR_SURFACE_HEADER = ("b", "d", "err_x", "err_y", "err_inf", "theta4p_used")
GAIN_SURFACE_HEADER = ("b", "d", "p_err_base", "p_err_opt", "ratio")

_ERROR_SLUGS = (
    (NotSymplectic, "not-symplectic"),
    (DegenerateD, "degenerate-d"),
    (DenominatorPole, "denominator-pole"),
    (NonpositiveIm, "nonpositive-im"),
    (InvalidReflectivity, "invalid-reflectivity"),
)


def _slug(exc: Exception) -> str:
    for cls, slug in _ERROR_SLUGS:
        if isinstance(exc, cls):
            return slug
    return "invalid-config"


def _emit_error(slug: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": slug, "message": message}) + "\n")


def _jsonify(obj):
    """Recursively coerce to plain JSON types; non-finite floats -> null."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _dumps(obj) -> str:
    return json.dumps(_jsonify(obj), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def _deliver(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(float(v)) for v in row])
    return buf.getvalue()


def _write_manifest(out, subcommand: str, resolved: dict) -> None:
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "tool": "clustergauss",
        "version": __version__,
        "subcommand": subcommand,
        "resolved_config": _jsonify(resolved),
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    Path(str(out) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _load_config(path):
    if path is None:
        return {}
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "resolved_config" in data:
        data = data["resolved_config"]
    if not isinstance(data, dict):
        raise DomainError("config file must contain a JSON object")
    return data


def _resolve(args, config: dict, defaults: dict) -> dict:
    """Merge flag values, config-file values, and defaults (in that order)."""
    unknown = sorted(set(config) - set(defaults))
    if unknown:
        raise DomainError(f"unknown config keys: {unknown}")
    resolved = {}
    for key, default in defaults.items():
        val = getattr(args, key)
        if val is None:
            val = config.get(key, default)
        resolved[key] = val
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved[k] is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise DomainError(f"missing required value(s): {flags}")


def _workers(resolved: dict) -> int:
    val = resolved.get("workers")
    if val is None:
        val = os.environ.get(WORKERS_ENV, "1")
    n = int(val)
    if n < 1:
        raise DomainError(f"workers must be >= 1, got {n}")
    resolved["workers"] = n
    return n


def _angles_to_radians(args) -> None:
    """Convert flag-supplied angles when --degrees is set.

    Applies only to values given on the command line; config files and
    manifests always store radians.
    """
    if getattr(args, "degrees", False) and args.theta4p is not None:
        args.theta4p = math.radians(args.theta4p)


def _weight_config(resolved: dict, prefix: str = "g") -> WeightConfig:
    return WeightConfig(
        g1=float(resolved[prefix + "1"]),
        g2=float(resolved[prefix + "2"]),
        g3=float(resolved[prefix + "3"]),
        g4=float(resolved[prefix + "4"]),
    )


def _cubic_config(resolved: dict, needed: bool):
    if not needed:
        return None
    _require(resolved, "gamma", "alpha")
    im = resolved["im"]
    return CubicConfig(
        gamma=float(resolved["gamma"]),
        alpha=float(resolved["alpha"]),
        i_m=None if im is None else float(im),
    )


# ---------------------------------------------------------------------------
# solve-phases

_SOLVE_DEFAULTS = {
    "a": None, "b": None, "c": None, "d": None,
    "g1": 1.0, "g2": 1.0, "g3": 1.0, "g4": 1.0,
    "theta4p": math.pi / 2.0,
    "out": None,
}


def cmd_solve_phases(args) -> int:
    _angles_to_radians(args)
    resolved = _resolve(args, _load_config(args.config), _SOLVE_DEFAULTS)
    _require(resolved, "a", "b", "c", "d")
    target = SymplecticTarget(float(resolved["a"]), float(resolved["b"]),
                              float(resolved["c"]), float(resolved["d"]))
    w = _weight_config(resolved)
    result = solve_phases(target, w, float(resolved["theta4p"]))
    ph = result.phases
    payload = {
        "target": {"a": target.a, "b": target.b,
                   "c": target.c, "d": target.d},
        "weights": [w.g1, w.g2, w.g3, w.g4],
        "phases": {
            "theta1": ph.theta1,
            "theta2p": ph.theta2p,
            "theta3": ph.theta3,
            "theta4p": ph.theta4p,
            "theta2": theta2_unprimed(ph.theta2p, w),
            "theta4": theta4_unprimed(ph.theta4p, w),
        },
        "cots": {
            "cot_theta1": ph.cot1,
            "cot_theta2p": ph.cot2p,
            "cot_theta3": ph.cot3,
            "cot_theta4p": ph.cot4p,
        },
        "realized": {"a": result.realized.a, "b": result.realized.b,
                     "c": result.realized.c, "d": result.realized.d},
        "residual": result.residual,
    }
    _deliver(_dumps(payload), resolved["out"])
    if resolved["out"] is not None:
        _write_manifest(resolved["out"], "solve-phases", resolved)
    return 0


# ---------------------------------------------------------------------------
# error-surface

_SURFACE_DEFAULTS = {
    "mode": MODE_GAUSSIAN_FIXED,
    "g1": 1.0, "g2": 1.0, "g3": 1.0, "g4": 1.0,
    "b_min": -5.0, "b_max": 5.0, "nb": 101,
    "d_min": -5.0, "d_max": 5.0, "nd": 101,
    "db": -15.0,
    "gamma": None, "alpha": None, "im": None,
    "workers": None,
    "out": None,
}


def cmd_error_surface(args) -> int:
    resolved = _resolve(args, _load_config(args.config), _SURFACE_DEFAULTS)
    workers = _workers(resolved)
    mode = str(resolved["mode"])
    spec = ErrorSurfaceSpec(
        b_range=(float(resolved["b_min"]), float(resolved["b_max"])),
        d_range=(float(resolved["d_min"]), float(resolved["d_max"])),
        nb=int(resolved["nb"]),
        nd=int(resolved["nd"]),
        w=_weight_config(resolved),
        mode=mode,
        cubic=_cubic_config(resolved, mode == MODE_CUBIC_OPTIMIZED),
    )
    surface = error_surface(spec, n_workers=workers)
    _deliver(_csv_text(ERROR_SURFACE_HEADER, surface.to_rows()),
             resolved["out"])
    if resolved["out"] is not None:
        _write_manifest(resolved["out"], "error-surface", resolved)
    return 0


# ---------------------------------------------------------------------------
# gain-surface

_GAIN_DEFAULTS = {
    "db": -15.0,
    "base_g1": 1.0, "base_g2": 1.0, "base_g3": 1.0, "base_g4": 1.0,
    "base_mode": MODE_GAUSSIAN_FIXED,
    "opt_g1": 5.0, "opt_g2": 5.0, "opt_g3": 4.0, "opt_g4": 4.0,
    "opt_mode": MODE_GAUSSIAN_OPTIMIZED,
    "b_min": -5.0, "b_max": 5.0, "nb": 101,
    "d_min": -5.0, "d_max": 5.0, "nd": 101,
    "gamma": None, "alpha": None, "im": None,
    "workers": None,
    "out": None,
}


def cmd_gain_surface(args) -> int:
    resolved = _resolve(args, _load_config(args.config), _GAIN_DEFAULTS)
    workers = _workers(resolved)
    _require(resolved, "out")
    grid = dict(
        b_range=(float(resolved["b_min"]), float(resolved["b_max"])),
        d_range=(float(resolved["d_min"]), float(resolved["d_max"])),
        nb=int(resolved["nb"]),
        nd=int(resolved["nd"]),
    )
    base_mode = str(resolved["base_mode"])
    opt_mode = str(resolved["opt_mode"])
    base_spec = ErrorSurfaceSpec(
        w=_weight_config(resolved, "base_g"), mode=base_mode,
        cubic=_cubic_config(resolved, base_mode == MODE_CUBIC_OPTIMIZED),
        **grid)
    opt_spec = ErrorSurfaceSpec(
        w=_weight_config(resolved, "opt_g"), mode=opt_mode,
        cubic=_cubic_config(resolved, opt_mode == MODE_CUBIC_OPTIMIZED),
        **grid)
    squeezing = SqueezingSpec.from_db(float(resolved["db"]))
    gs = gain_surface(base_spec, opt_spec, squeezing, n_workers=workers)
    Path(resolved["out"]).write_text(
        _csv_text(GAIN_SURFACE_HEADER, gs.to_rows()))
    _write_manifest(resolved["out"], "gain-surface", resolved)
    bmax, dmax = gs.argmax_cell
    sys.stdout.write(_dumps({
        "max_ratio": gs.max_ratio,
        "argmax_b": bmax,
        "argmax_d": dmax,
        "n_invalid_baseline": gs.baseline.n_invalid,
        "n_invalid_optimized": gs.optimized.n_invalid,
    }))
    return 0


# ---------------------------------------------------------------------------
# simulate

_SIMULATE_DEFAULTS = {
    "variant": VARIANT_GAUSSIAN,
    "a": None, "b": None, "c": None, "d": None,
    "g1": 1.0, "g2": 1.0, "g3": 1.0, "g4": 1.0,
    "theta4p": math.pi / 2.0,
    "db": -15.0,
    "shots": 100000,
    "seed": 0,
    "gamma": None, "alpha": None,
    "mean_x": 0.0, "mean_y": 0.0, "var_x": 0.25, "var_y": 0.25,
    "z_gate": 5.0,
    "workers": None,
    "out": None,
    "records": None,
}


def cmd_simulate(args) -> int:
    _angles_to_radians(args)
    resolved = _resolve(args, _load_config(args.config), _SIMULATE_DEFAULTS)
    workers = _workers(resolved)
    _require(resolved, "a", "b", "c", "d")
    variant = str(resolved["variant"])
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    cubic = None
    if variant == VARIANT_CUBIC:
        _require(resolved, "gamma", "alpha")
        cubic = CubicConfig(gamma=float(resolved["gamma"]),
                            alpha=float(resolved["alpha"]))
    config = SimConfig(
        target=SymplecticTarget(float(resolved["a"]), float(resolved["b"]),
                                float(resolved["c"]), float(resolved["d"])),
        w=_weight_config(resolved),
        theta4p=float(resolved["theta4p"]),
        squeezing=SqueezingSpec.from_db(float(resolved["db"])),
        variant=variant,
        n_shots=int(resolved["shots"]),
        seed=int(resolved["seed"]),
        cubic=cubic,
        input_state=InputState(
            mean_x=float(resolved["mean_x"]),
            mean_y=float(resolved["mean_y"]),
            var_x=float(resolved["var_x"]),
            var_y=float(resolved["var_y"]),
        ),
    )
    want_records = resolved["records"] is not None
    summary = run(config, n_workers=workers, record_shots=want_records)
    if want_records:
        rows = [[None if not math.isfinite(v) else v for v in row]
                for row in summary.records.tolist()]
        Path(resolved["records"]).write_text(
            _csv_text(RECORD_COLUMNS, rows))
    _deliver(_dumps(summary.to_dict()), resolved["out"])
    if resolved["out"] is not None:
        _write_manifest(resolved["out"], "simulate", resolved)
    z_gate = float(resolved["z_gate"])
    worst = float(max(np.max(np.abs(summary.z_mean)),
                      np.max(np.abs(summary.z_error_var))))
    if worst > z_gate:
        _emit_error("z-gate-exceeded",
                    f"max |z| = {worst!r} exceeds gate {z_gate!r}")
        return 3
    return 0


# ---------------------------------------------------------------------------
# weight-bound

_WEIGHT_BOUND_DEFAULTS = {"db": None, "g": None, "out": None}


def cmd_weight_bound(args) -> int:
    resolved = _resolve(args, _load_config(args.config),
                        _WEIGHT_BOUND_DEFAULTS)
    _require(resolved, "db")
    db = float(resolved["db"])
    if not math.isfinite(db):
        raise DomainError(f"--db must be finite, got {db!r}")
    bound = max_weight(db)
    weights = resolved["g"] or []
    payload = {
        "db": db,
        "max_weight": bound,
        "weights": [
            {"g": float(g), "admissible": bool(float(g) <= bound)}
            for g in weights
        ],
    }
    _deliver(_dumps(payload), resolved["out"])
    return 0


# ---------------------------------------------------------------------------
# cz-decompose

_CZ_DEFAULTS = {"g": None, "out": None}


def cmd_cz_decompose(args) -> int:
    resolved = _resolve(args, _load_config(args.config), _CZ_DEFAULTS)
    _require(resolved, "g")
    dec = bloch_messiah(float(resolved["g"]))
    payload = {
        "g": dec.g,
        "s": dec.s,
        "r_bs": dec.r_bs,
        "t_bs": dec.t_bs,
        "factors": {
            "phase_left": dec.phase_left,
            "bs_left": dec.bs_left,
            "squeezer": dec.squeezer,
            "bs_right": dec.bs_right,
            "phase_right": dec.phase_right,
        },
        "residual": dec.residual,
    }
    _deliver(_dumps(payload), resolved["out"])
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_config_opt(sp) -> None:
    sp.add_argument("--config", metavar="FILE",
                    help="JSON file supplying defaults for the value flags; "
                         "a run manifest (*.manifest.json) is accepted")


def _add_workers_opt(sp) -> None:
    sp.add_argument("--workers", type=int,
                    help=f"thread count (default: ${WORKERS_ENV} or 1)")


def _add_target_opts(sp) -> None:
    for name in "abcd":
        sp.add_argument(f"--{name}", type=float,
                        help=f"target matrix entry {name}")


def _add_weight_opts(sp, prefix: str = "g", what: str = "cluster") -> None:
    for k in range(1, 5):
        sp.add_argument(f"--{prefix}{k}".replace("_", "-"), type=float,
                        dest=f"{prefix}{k}",
                        help=f"{what} weight g{k}")


def _add_grid_opts(sp) -> None:
    sp.add_argument("--b-min", type=float, help="grid lower bound for b")
    sp.add_argument("--b-max", type=float, help="grid upper bound for b")
    sp.add_argument("--nb", type=int, help="number of b samples")
    sp.add_argument("--d-min", type=float, help="grid lower bound for d")
    sp.add_argument("--d-max", type=float, help="grid upper bound for d")
    sp.add_argument("--nd", type=int, help="number of d samples")


def _add_cubic_opts(sp) -> None:
    sp.add_argument("--gamma", type=float, help="cubic gate strength")
    sp.add_argument("--alpha", type=float,
                    help="displacement before the cubic gate")
    sp.add_argument("--im", type=float,
                    help="photocurrent scale (default 3*gamma*alpha^2)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustergauss",
        description="Design and error analysis of single-mode operations "
                    "on weighted four-node cluster states.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve-phases",
                        help="homodyne phases realising a target operation")
    _add_config_opt(sp)
    _add_target_opts(sp)
    _add_weight_opts(sp)
    sp.add_argument("--theta4p", type=float,
                    help="free phase theta4' in (0, pi); default pi/2")
    sp.add_argument("--degrees", action="store_true",
                    help="interpret angle flags in degrees "
                         "(stored and reported values are radians)")
    sp.add_argument("--out", metavar="FILE", help="write JSON here "
                    "instead of stdout")
    sp.set_defaults(func=cmd_solve_phases)

    sp = sub.add_parser("error-surface",
                        help="closed-form error multipliers on a (b, d) grid")
    _add_config_opt(sp)
    sp.add_argument("--mode", choices=MODES, help="evaluation mode")
    _add_weight_opts(sp)
    _add_grid_opts(sp)
    sp.add_argument("--db", type=float,
                    help="squeezing level in dB (recorded in the manifest; "
                         "surface values are variance multipliers)")
    _add_cubic_opts(sp)
    _add_workers_opt(sp)
    sp.add_argument("--out", metavar="FILE",
                    help="write CSV here (plus a manifest sidecar) "
                         "instead of stdout")
    sp.set_defaults(func=cmd_error_surface)

    sp = sub.add_parser("simulate",
                        help="Monte Carlo run cross-checked against the "
                             "closed-form error model")
    _add_config_opt(sp)
    sp.add_argument("--variant", choices=VARIANTS, help="protocol variant")
    _add_target_opts(sp)
    _add_weight_opts(sp)
    sp.add_argument("--theta4p", type=float,
                    help="free phase theta4' in (0, pi); default pi/2")
    sp.add_argument("--degrees", action="store_true",
                    help="interpret angle flags in degrees "
                         "(stored and reported values are radians)")
    sp.add_argument("--db", type=float, help="squeezing level in dB")
    sp.add_argument("--shots", type=int, help="number of shots")
    sp.add_argument("--seed", type=int, help="RNG seed")
    _add_cubic_opts(sp)
    sp.add_argument("--mean-x", type=float, help="input mean of x")
    sp.add_argument("--mean-y", type=float, help="input mean of y")
    sp.add_argument("--var-x", type=float, help="input variance of x")
    sp.add_argument("--var-y", type=float, help="input variance of y")
    sp.add_argument("--z-gate", type=float,
                    help="max |z| before exit code 3 (default 5)")
    _add_workers_opt(sp)
    sp.add_argument("--records", metavar="FILE",
                    help="also write per-shot records as CSV")
    sp.add_argument("--out", metavar="FILE",
                    help="write the JSON summary here (plus a manifest "
                         "sidecar) instead of stdout")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("gain-surface",
                        help="correction-failure probability ratio surface")
    _add_config_opt(sp)
    sp.add_argument("--db", type=float, help="squeezing level in dB")
    _add_weight_opts(sp, prefix="base_g", what="baseline")
    sp.add_argument("--base-mode", choices=MODES, help="baseline mode")
    _add_weight_opts(sp, prefix="opt_g", what="optimized")
    sp.add_argument("--opt-mode", choices=MODES, help="optimized mode")
    _add_grid_opts(sp)
    _add_cubic_opts(sp)
    _add_workers_opt(sp)
    sp.add_argument("--out", metavar="FILE", required=False,
                    help="write CSV here (required; a manifest sidecar "
                         "is written next to it)")
    sp.set_defaults(func=cmd_gain_surface)

    sp = sub.add_parser("weight-bound",
                        help="largest admissible weight for a squeezing level")
    _add_config_opt(sp)
    sp.add_argument("--db", type=float, help="squeezing level in dB")
    sp.add_argument("--g", type=float, action="append",
                    help="weight to test for admissibility (repeatable)")
    sp.add_argument("--out", metavar="FILE", help="write JSON here "
                    "instead of stdout")
    sp.set_defaults(func=cmd_weight_bound)

    sp = sub.add_parser("cz-decompose",
                        help="decompose a weighted CZ gate into linear "
                             "optics and one squeezer")
    _add_config_opt(sp)
    sp.add_argument("--g", type=float, help="CZ weight (nonnegative)")
    sp.add_argument("--out", metavar="FILE", help="write JSON here "
                    "instead of stdout")
    sp.set_defaults(func=cmd_cz_decompose)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        _emit_error(_slug(exc), str(exc))
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        _emit_error("invalid-config", str(exc))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
