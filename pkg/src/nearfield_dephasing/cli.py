"""Command line runner: ``nfdephase <command> --config run.json``.

A run is described by one JSON document::

    {
      "material": {"kind": "conductor", "sigma_si": 1.0},
      "beam": {"L": 10, "beta": 1e-4, "a": 0.01},
      "T": 300,
      "fixed": {"d": 0.5, "omega": 1e9},
      "sweep": {"axis": "d", "start": 1, "stop": 1e4, "points": 20},
      "tol": 1e-5,
      "threads": 1
    }

``sweep`` may give ``values`` instead of a log range. Command line flags
override the matching config fields. Exit codes: 0 success, 1 validation
failure, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .beams import BeamPair
from .checks import reproduce_table, run_validate
from .constants import SIGMA_SI_TO_CGS
from .dephasing import (
    DEPHASING_SPEC,
    K_asymptotic,
    K_dipole,
    K_full,
    Scenario,
    classify_regime,
    crossover_d,
    enhancement,
    predicted_minimum,
)
from .errors import (
    DivergenceError,
    QuadratureError,
    ResolutionError,
    SingularityError,
    UnsupportedMaterialError,
)
from .kernels import neg_im_g
from .materials import Conductor, Dielectric, Material, is_ideal, material_from_dict
from .numerics import QuadratureSpec
from .spectra import SPECTRUM_SPEC, S_asymptotic, S_ideal_closed, spectral_density

__all__ = ["RunConfig", "SweepSpec", "ConfigError", "load_config", "main", "COLUMNS"]

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = ("spectrum", "kernel", "dephase", "regimes", "reproduce", "validate")

COLUMNS = {
    "spectrum": ["omega", "d", "S_p", "S_e", "S_ideal", "S_asymptotic", "regime_tag", "err_p", "err_e"],
    "kernel": ["omega", "k", "d", "neg_im_gl", "neg_im_gt", "domain"],
    "dephase": ["d", "K_full", "K_dipole", "K_asymptotic", "kappa", "regime", "d_cross", "err", "beta", "sigma"],
    "regimes": ["beta", "sigma", "regime", "lower_B", "zeta_bar", "gamma", "eta", "d_cross", "d_min", "kappa_min"],
}

_AXES = {
    "spectrum": ("d", "omega"),
    "kernel": ("k",),
    "dephase": ("d", "v", "sigma"),
    "regimes": ("v", "sigma"),
}

_NUMERIC_ERRORS = (QuadratureError, ResolutionError, DivergenceError, SingularityError, ArithmeticError)


class ConfigError(ValueError):
    """The run description is malformed or inconsistent."""


@dataclass(frozen=True)
class SweepSpec:
    """Values along one axis: a log range or an explicit list."""

    axis: str
    values: tuple

    @classmethod
    def from_dict(cls, spec: dict) -> "SweepSpec":
        if not isinstance(spec, dict) or "axis" not in spec:
            raise ConfigError("sweep needs an 'axis'")
        axis = str(spec["axis"])
        if "values" in spec:
            vals = tuple(float(x) for x in spec["values"])
            if not vals:
                raise ConfigError("sweep values are empty")
        else:
            try:
                start, stop, n = float(spec["start"]), float(spec["stop"]), int(spec["points"])
            except KeyError as exc:
                raise ConfigError(f"sweep is missing {exc.args[0]!r}") from None
            if not (0 < start and math.isfinite(stop) and n >= 1):
                raise ConfigError("sweep range must be positive with at least one point")
            if n > 1 and not start < stop:
                raise ConfigError("sweep range must be ordered, start < stop")
            vals = tuple(np.geomspace(start, stop, n).tolist()) if n > 1 else (start,)
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ConfigError("sweep values must be finite and non-negative")
        if str(spec.get("unit", "cgs")).lower() == "si":
            if axis != "sigma":
                raise ConfigError("the 'si' unit applies to a sigma sweep only")
            vals = tuple(v * SIGMA_SI_TO_CGS for v in vals)
        return cls(axis, vals)


@dataclass(frozen=True)
class RunConfig:
    """Everything a single command needs."""

    command: str
    material: Material | None = None
    beam: dict = field(default_factory=dict)
    T: float = 300.0
    high_temperature: bool = False
    fixed: dict = field(default_factory=dict)
    sweep: SweepSpec | None = None
    sweep2: SweepSpec | None = None
    methods: tuple = ("full", "dipole", "asymptotic")
    out: str | None = None
    tol: float | None = None
    threads: int = 1

    def quad_spec(self, default: QuadratureSpec) -> QuadratureSpec:
        return default if self.tol is None else default.with_rel_tol(self.tol)

    def beam_pair(self, beta: float | None = None) -> BeamPair:
        b = self.beam
        try:
            L, a = float(b["L"]), float(b["a"])
        except KeyError as exc:
            raise ConfigError(f"beam is missing {exc.args[0]!r}") from None
        d = float(self.fixed.get("d", b.get("d", 0.0)))
        if beta is not None:
            return BeamPair.from_velocity(L, beta, a, d)
        if "beta" in b and "tau" in b:
            raise ConfigError("give either beam.beta or beam.tau, not both")
        if "beta" in b:
            return BeamPair.from_velocity(L, float(b["beta"]), a, d)
        if "tau" in b:
            return BeamPair(L, float(b["tau"]), a, d)
        raise ConfigError("beam needs 'beta' or 'tau'")


_KNOWN_KEYS = {
    "command", "material", "beam", "T", "high_temperature", "fixed", "sweep",
    "sweep2", "methods", "out", "tol", "threads",
}


def load_config(doc: dict, command: str, overrides: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "command" in doc and doc["command"] != command:
        raise ConfigError(f"config is for {doc['command']!r}, not {command!r}")
    material = material_from_dict(doc["material"]) if "material" in doc else None
    sweep = SweepSpec.from_dict(doc["sweep"]) if "sweep" in doc else None
    sweep2 = SweepSpec.from_dict(doc["sweep2"]) if "sweep2" in doc else None
    methods = tuple(doc.get("methods", RunConfig.methods))
    if not set(methods) <= {"full", "dipole", "asymptotic"}:
        raise ConfigError(f"unknown methods in {methods}")
    cfg = RunConfig(
        command=command,
        material=material,
        beam=dict(doc.get("beam", {})),
        T=float(doc.get("T", 300.0)),
        high_temperature=bool(doc.get("high_temperature", False)),
        fixed={k: float(v) for k, v in doc.get("fixed", {}).items()},
        sweep=sweep,
        sweep2=sweep2,
        methods=methods,
        out=doc.get("out"),
        tol=None if doc.get("tol") is None else float(doc["tol"]),
        threads=int(doc.get("threads", 1)),
    )
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    cfg = replace(cfg, **overrides)
    if cfg.tol is not None and not (0 < cfg.tol < 1):
        raise ConfigError("tol must lie in (0, 1)")
    if cfg.threads < 1:
        raise ConfigError("threads must be at least 1")
    for s in (cfg.sweep, cfg.sweep2):
        if s is not None and command in _AXES and s.axis not in _AXES[command]:
            raise ConfigError(f"{command} cannot sweep {s.axis!r}; use one of {_AXES[command]}")
    return cfg


def _need(cfg: RunConfig, *what):
    for w in what:
        if w == "material" and cfg.material is None:
            raise ConfigError("config needs a material")
        if w == "sweep" and cfg.sweep is None:
            raise ConfigError("config needs a sweep")
        if w in ("d", "omega") and w not in cfg.fixed:
            raise ConfigError(f"config needs fixed.{w}")


def _pmap(fn, items, threads):
    """Ordered map; rows come back in sweep order whatever the finish order."""
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _rows_spectrum(cfg: RunConfig):
    _need(cfg, "material", "sweep")
    spec = cfg.quad_spec(SPECTRUM_SPEC)
    m = cfg.material
    axis = cfg.sweep.axis
    _need(cfg, "omega" if axis == "d" else "d")

    def row(x):
        omega = x if axis == "omega" else cfg.fixed["omega"]
        d = x if axis == "d" else cfg.fixed["d"]
        s = spectral_density(m, omega, d, spec)
        if isinstance(m, (Conductor, Dielectric)):
            asym = S_asymptotic(m, omega, d)
            sa, tag = asym.value, asym.tag
        else:
            sa, tag = math.nan, "ideal" if is_ideal(m) else "vacuum"
        return [omega, d, s.S_p, s.S_e, S_ideal_closed(omega, d), sa, tag, s.err_p, s.err_e]

    return _pmap(row, cfg.sweep.values, cfg.threads)


def _rows_kernel(cfg: RunConfig):
    _need(cfg, "material", "sweep", "omega", "d")
    omega, d = cfg.fixed["omega"], cfg.fixed["d"]

    def row(k):
        v = neg_im_g(cfg.material, omega, k, d)
        return [omega, k, d, v.neg_im_gl, v.neg_im_gt, v.domain]

    return _pmap(row, cfg.sweep.values, cfg.threads)


def _scenario(cfg: RunConfig, axis: str, x: float) -> Scenario:
    m = cfg.material
    beta = x if axis == "v" else None
    bp = cfg.beam_pair(beta)
    if axis == "d":
        bp = bp.at_height(x)
    if axis == "sigma":
        if not isinstance(m, Conductor):
            raise ConfigError("a sigma sweep needs a conductor")
        m = Conductor(x, m.eps0)
    return Scenario(m, bp, cfg.T, cfg.quad_spec(DEPHASING_SPEC), cfg.high_temperature)


def _rows_dephase(cfg: RunConfig):
    _need(cfg, "material", "sweep")
    scenarios = [_scenario(cfg, cfg.sweep.axis, x) for x in cfg.sweep.values]

    def row(sc: Scenario):
        full = K_full(sc) if "full" in cfg.methods else None
        dip = K_dipole(sc) if "dipole" in cfg.methods else None
        asym = None
        if "asymptotic" in cfg.methods and isinstance(sc.material, (Conductor, Dielectric)):
            asym = K_asymptotic(sc)
        ref = full or dip or asym
        sigma = sc.material.sigma if isinstance(sc.material, Conductor) else math.nan
        if ref is None:
            return [sc.d, math.nan, math.nan, math.nan, math.nan, "", math.nan, math.nan, sc.beam.beta, sigma]
        return [
            sc.d,
            full.K if full else math.nan,
            dip.K if dip else math.nan,
            asym.K if asym else math.nan,
            ref.kappa, ref.regime, ref.d_cross, ref.error, sc.beam.beta, sigma,
        ]

    return _pmap(row, scenarios, cfg.threads)


def _rows_regimes(cfg: RunConfig):
    _need(cfg, "material", "sweep")
    if not isinstance(cfg.material, Conductor):
        raise ConfigError("regimes need a conductor")
    grid = [(x, None) for x in cfg.sweep.values]
    if cfg.sweep2 is not None:
        if cfg.sweep2.axis == cfg.sweep.axis:
            raise ConfigError("sweep and sweep2 must use different axes")
        grid = [(x, y) for x in cfg.sweep.values for y in cfg.sweep2.values]

    def build(pair):
        x = dict(zip((cfg.sweep.axis, cfg.sweep2.axis if cfg.sweep2 else None), pair))
        m = cfg.material if "sigma" not in x else Conductor(x["sigma"], cfg.material.eps0)
        return Scenario(m, cfg.beam_pair(x.get("v")), cfg.T, cfg.quad_spec(DEPHASING_SPEC), cfg.high_temperature)

    rows = []
    for sc in (build(p) for p in grid):
        info = classify_regime(sc)
        dmin, kmin = predicted_minimum(sc)
        rows.append([
            sc.beam.beta, sc.material.sigma, info.regime, info.lower_B, info.zeta_bar,
            info.gamma, enhancement(sc).eta, crossover_d(sc), dmin, kmin,
        ])
    return rows


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")  # + 0.0 drops the sign of -0
    return str(x)


def write_csv(header, rows) -> str:
    """CSV text with LF endings and 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def cmd_validate(cfg: RunConfig) -> int:
    results = run_validate()
    ok = all(r.passed for r in results)
    report = {"passed": ok, "checks": [r.to_dict() for r in results]}
    _emit(json.dumps(_json_safe(report), indent=2) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_reproduce(cfg: RunConfig) -> int:
    rows = reproduce_table()
    ok = all(r.passed for r in rows)
    report = {"passed": ok, "rows": [r.to_dict() for r in rows]}
    _emit(json.dumps(_json_safe(report), indent=2) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_VALIDATION


_TABLE_COMMANDS = {
    "spectrum": _rows_spectrum,
    "kernel": _rows_kernel,
    "dephase": _rows_dephase,
    "regimes": _rows_regimes,
}


def run(cfg: RunConfig) -> int:
    """Execute a parsed configuration and return the exit code."""
    if cfg.command == "validate":
        return cmd_validate(cfg)
    if cfg.command == "reproduce":
        return cmd_reproduce(cfg)
    rows = _TABLE_COMMANDS[cfg.command](cfg)
    _emit(write_csv(COLUMNS[cfg.command], rows), cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nfdephase",
        description="Dephasing of electron interference by thermal fields near a surface.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="JSON run description")
        p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--tol", metavar="REL", type=float, help="relative quadrature tolerance")
        p.add_argument("--threads", metavar="N", type=int, help="worker threads for sweeps")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        doc = {}
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh)
        elif args.command not in ("validate", "reproduce"):
            raise ConfigError(f"{args.command} needs --config")
        cfg = load_config(doc, args.command, {"out": args.out, "tol": args.tol, "threads": args.threads})
        return run(cfg)
    except (ValueError, UnsupportedMaterialError, OSError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
