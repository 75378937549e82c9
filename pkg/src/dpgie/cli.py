"""``dp-gie`` command-line front end.

Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import comparator, criticality, entanglement, verification
from .dynamics import AmplitudePair, build_initial, dp_series
from .errors import DomainError, NumericError
from .params import GEOMETRIES, ExperimentParams, PhysicalConstants

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3

SWEEPABLE = ("d", "L", "sigma", "mass")


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    geometry: str = "horizontal"
    sigma: float = 50e-6
    L: float = 23e-6
    d: float = 24e-6
    mass: float = 1e-15
    t_max: float = 2e5
    steps: int = 2001
    format: str = "csv"
    out: str | None = None
    dimensionless: bool = False
    spacing: str = "uniform"

    def validate(self) -> RunConfig:
        if self.geometry not in GEOMETRIES:
            raise InputError(f"geometry must be one of {GEOMETRIES}")
        for name in ("sigma", "L", "d", "mass", "t_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise InputError(f"{name} must be a positive number, got {v!r}")
        if not (isinstance(self.steps, int) and self.steps >= 2):
            raise InputError(f"steps must be an integer >= 2, got {self.steps!r}")
        if self.format not in ("csv", "json"):
            raise InputError("format must be csv or json")
        if self.spacing not in ("uniform", "log"):
            raise InputError("spacing must be uniform or log")
        return self

    @property
    def consts(self) -> PhysicalConstants:
        return PhysicalConstants.dimensionless() if self.dimensionless else PhysicalConstants()

    def experiment(self, **overrides) -> ExperimentParams:
        vals = dict(sigma=self.sigma, mass=self.mass, L=self.L, d=self.d,
                    geometry=self.geometry, consts=self.consts)
        vals.update(overrides)
        return ExperimentParams(**vals)

    def echo(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k != "out"}


# reduced defaults: lengths in units of sigma, G = hbar = m = 1
DIMENSIONLESS_DEFAULTS = dict(sigma=1.0, mass=1.0, L=0.125, d=0.375, t_max=1e4)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _csv(header, rows, metadata=None) -> str:
    buf = io.StringIO()
    if metadata:
        for k, v in metadata.items():
            buf.write(f"# {k}={_fmt(v)}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(payload) -> str:
    def conv(o):
        if isinstance(o, np.ndarray):
            return [conv(v) for v in o.tolist()]
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, dict):
            return {k: conv(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [conv(v) for v in o]
        return o

    return json.dumps(conv(payload), indent=2, sort_keys=False) + "\n"


def _table(cfg, header, rows, metadata):
    if cfg.format == "json":
        cols = {h: [r[i] for r in rows] for i, h in enumerate(header)}
        return _json({"metadata": metadata, **cols})
    return _csv(header, rows, metadata)


def _emit(cfg, text, stdout):
    if cfg.out is None:
        stdout.write(text)
        return
    try:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {cfg.out}: {exc.strerror or exc}") from exc


def cmd_negativity_series(cfg: RunConfig, args) -> str:
    exp = cfg.experiment()
    basis = exp.basis()
    rho0 = build_initial(AmplitudePair.uniform(), basis)
    series = dp_series(rho0, cfg.t_max, cfg.steps, basis, exp.dp_params, exp.consts,
                       spacing=cfg.spacing)
    rows = list(zip(series.times, series.dp_min_eig))
    return _table(cfg, ["t", "dp_min_eig"], rows, cfg.echo())


def cmd_compare(cfg: RunConfig, args) -> str:
    exp = cfg.experiment()
    series = comparator.compare_series(exp.basis(), exp.dp_params, exp.consts,
                                       cfg.t_max, cfg.steps, spacing=cfg.spacing)
    meta = cfg.echo()
    if cfg.geometry == "horizontal":
        meta["unitary_period"] = comparator.oscillation_period(
            cfg.L, cfg.d, exp.dp_params.masses, exp.consts)
    rows = list(zip(series.times, series.dp_min_eig, series.unitary_min_eig))
    return _table(cfg, ["t", "dp_min_eig", "unitary_min_eig"], rows, meta)


def cmd_critical_distance(cfg: RunConfig, args) -> str:
    geometry = args.geometry_pos or cfg.geometry
    res = criticality.critical_distance(geometry, cfg.sigma)
    header = ["geometry", "sigma", "d_c", "d_c_over_sigma", "residual", "iterations"]
    row = [geometry, cfg.sigma, res.d_c, res.d_c_over_sigma, res.residual, res.iterations]
    if cfg.format == "json":
        return _json(dict(zip(header, row)))
    return _csv(header, [row])


E_HEADER = ["geometry", "sigma", "L", "d", "mass", "e_plus", "e_minus", "nu",
            "e_minus_reduced", "entangled"]


def _e_row(exp: ExperimentParams):
    pc = entanglement.perturbative_coeffs(exp.L, exp.d, exp.dp_params, exp.consts, exp.geometry)
    return [exp.geometry, exp.sigma, exp.L, exp.d, exp.mass, pc.e_plus, pc.e_minus, pc.nu,
            pc.e_minus / exp.rate_unit, pc.e_minus < 0.0]


def cmd_e_minus(cfg: RunConfig, args) -> str:
    row = _e_row(cfg.experiment())
    if cfg.format == "json":
        return _json(dict(zip(E_HEADER, row)))
    return _csv(E_HEADER, [row])


def cmd_scan(cfg: RunConfig, args) -> str:
    if args.sweep is None or args.range is None:
        raise InputError("scan needs --sweep NAME and --range LO HI")
    if args.sweep not in SWEEPABLE:
        raise InputError(f"cannot sweep {args.sweep!r}; choose from {SWEEPABLE}")
    lo, hi = args.range
    if args.points < 2:
        raise InputError("--points must be at least 2")
    values = np.linspace(lo, hi, args.points)
    try:
        rows = [_e_row(cfg.experiment(**{args.sweep: float(v)})) for v in values]
    except DomainError as exc:
        raise InputError(str(exc)) from exc
    meta = cfg.echo()
    meta.update(sweep=args.sweep, range_lo=lo, range_hi=hi, points=args.points)
    return _table(cfg, E_HEADER, rows, meta)


def cmd_verify(cfg: RunConfig, args):
    reports = verification.run_all()
    lines = [verification.REPORT_HEADER] + [r.as_row() for r in reports]
    return "\n".join(lines) + "\n", all(r.passed for r in reports)


COMMANDS = {
    "negativity-series": cmd_negativity_series,
    "critical-distance": cmd_critical_distance,
    "e-minus": cmd_e_minus,
    "scan": cmd_scan,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dp-gie",
        description="Diosi-Penrose gravitationally induced entanglement toolkit")
    parser.add_argument("command", choices=list(COMMANDS))
    parser.add_argument("geometry_pos", nargs="?", choices=GEOMETRIES, default=None,
                        metavar="GEOMETRY", help="geometry (critical-distance shorthand)")
    parser.add_argument("--config", help="JSON file with keys matching the flag names")
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--L", type=float)
    parser.add_argument("--d", type=float)
    parser.add_argument("--mass", type=float)
    parser.add_argument("--t-max", dest="t_max", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--geometry", choices=GEOMETRIES)
    parser.add_argument("--dimensionless", action="store_true", default=None,
                        help="G = hbar = 1; defaults sigma = mass = 1")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--out")
    parser.add_argument("--log-time", dest="spacing", action="store_const", const="log",
                        help="log-spaced time grid")
    parser.add_argument("--sweep", help=f"scan parameter, one of {', '.join(SWEEPABLE)}")
    parser.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    parser.add_argument("--points", type=int, default=50)
    return parser


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def load_config(args) -> RunConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if values.get("dimensionless"):
        for k, v in DIMENSIONLESS_DEFAULTS.items():
            values.setdefault(k, v)
    for key in ("sigma", "L", "d", "mass", "t_max"):
        if key in values and isinstance(values[key], int) and not isinstance(values[key], bool):
            values[key] = float(values[key])
    try:
        return replace(RunConfig(), **values).validate()
    except TypeError as exc:
        raise InputError(str(exc)) from exc


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = load_config(args)
        result = COMMANDS[args.command](cfg, args)
        ok = True
        if isinstance(result, tuple):
            result, ok = result
        _emit(cfg, result, stdout)
        return EXIT_OK if ok else EXIT_NUMERIC
    except (InputError, DomainError) as exc:
        stderr.write(f"dp-gie: invalid input: {exc}\n")
        return EXIT_INPUT
    except OSError as exc:
        stderr.write(f"dp-gie: {exc}\n")
        return EXIT_IO
    except (NumericError, ArithmeticError) as exc:
        stderr.write(f"dp-gie: numeric failure: {exc}\n")
        return EXIT_NUMERIC


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
