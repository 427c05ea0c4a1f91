"""Command-line interface.

Commands: ``croc``, ``sweep-snr``, ``calibrate``, ``simulate``,
``min-samples`` and ``selftest``. Results are written as CSV (see
:func:`emit_csv`). A ``--config`` file holds ``key=value`` lines using the
long flag names without dashes prefix (``snr-db=-5``); flags given on the
command line override it.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass

from . import experiments as ex
from .analytic import AnalyticMode, performance_point
from .detectors import DetectorKind
from .errors import DomainError, InfeasibleError
from .model import SensingParams, db_to_linear, theta_from_pilot_offset_db
from .selftest import run_selftest

COMMANDS = ("croc", "sweep-snr", "calibrate", "simulate", "min-samples", "selftest")

CSV_HEADER = ("detector", "mode", "theta", "snr_db", "n_samples", "p_fa_target", "threshold",
              "p_md_analytic", "p_md_empirical", "ci_low", "ci_high", "trials", "seed")
_PROBABILITY_COLUMNS = {"p_fa_target", "p_md_analytic", "p_md_empirical", "ci_low", "ci_high"}

_DETECTORS = {d.value: d for d in DetectorKind}
_MODES = {"paper": (AnalyticMode.PAPER,), "exact": (AnalyticMode.EXACT,),
          "both": (AnalyticMode.PAPER, AnalyticMode.EXACT)}

# Flag defaults. Entries keyed by command override the generic value.
DEFAULTS = {
    "theta": "0.1",
    "snr-db": "-5",
    "snr-grid-db": "-20:0:1",
    "samples": {"sweep-snr": "100,1000", None: "100"},
    "trials-h0": {"simulate": "20000", None: "0"},
    "trials-h1": {"simulate": "20000", None: "0"},
    "pfa": {"sweep-snr": "0.1,0.001", None: "0.1"},
    "pfa-grid": "0.001:0.5:30",
    "pmd": "0.1",
    "seed": "0",
    "pilot-seed": "0",
    "mode": "both",
    "detector": "all",
    "out": "-",
    "confidence": "0.95",
    "noise-variance": "1.0",
    "workers": "1",
}

_HELP = {
    "theta": "pilot power fraction in [0, 1)",
    "pilot-offset-db": "pilot power below data power in dB; alternative to --theta",
    "snr-db": "SNR P/sigma^2 in dB",
    "snr-grid-db": "SNR grid lo:hi:step in dB (sweep-snr)",
    "samples": "samples per block N; comma list for sweep-snr",
    "trials-h0": "Monte Carlo blocks under H0; 0 disables simulation",
    "trials-h1": "Monte Carlo blocks under H1; 0 disables simulation",
    "pfa": "target false-alarm probabilities, comma list",
    "pfa-grid": "CROC grid lo:hi:points, log spaced (croc)",
    "pmd": "target miss probability (min-samples)",
    "seed": "master Monte Carlo seed",
    "pilot-seed": "seed of the pilot sign pattern",
    "mode": "analytic mode: paper, exact or both",
    "detector": "np, pilot, energy, all, or a comma list",
    "out": "output CSV path, '-' for stdout",
    "confidence": "confidence level of Wilson intervals",
    "noise-variance": "noise power sigma^2",
    "workers": "worker threads for Monte Carlo",
}


class UsageError(Exception):
    """Invalid or conflicting command-line input (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_text(key: str) -> str:
    value = DEFAULTS[key]
    if isinstance(value, dict):
        special = ", ".join(f"{v} for {k}" for k, v in value.items() if k)
        return f"{value[None]}; {special}"
    return value


_METAVARS = {"snr-grid-db": "LO:HI:STEP", "pfa-grid": "LO:HI:POINTS", "samples": "N[,N...]",
             "pfa": "P[,P...]", "pilot-offset-db": "DB", "snr-db": "DB", "trials-h0": "COUNT",
             "trials-h1": "COUNT", "pilot-seed": "SEED", "detector": "KIND[,KIND...]",
             "out": "PATH", "noise-variance": "SIGMA2", "confidence": "LEVEL"}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pilotsense", description="Pilot-aided spectrum sensing toolkit.")
    parser.add_argument("command", choices=COMMANDS)
    for key, text in _HELP.items():
        default = f" (default: {_default_text(key)})" if key in DEFAULTS else ""
        parser.add_argument(f"--{key}", dest=key.replace("-", "_"), default=None,
                            metavar=_METAVARS.get(key, key.upper()), help=text + default)
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="key=value file with the same keys as the long flags")
    return parser


@dataclass(frozen=True)
class RunPlan:
    command: str
    theta: float
    snr_db: float
    snr_grid_db: tuple[float, ...]
    samples: tuple[int, ...]
    trials_h0: int
    trials_h1: int
    pfa: tuple[float, ...]
    pfa_grid: tuple[float, ...]
    pmd: float
    seed: int
    pilot_seed: int
    modes: tuple[AnalyticMode, ...]
    detectors: tuple[DetectorKind, ...]
    out: str
    confidence: float
    noise_variance: float
    workers: int

    def params(self, n_samples: int | None = None, snr_db: float | None = None) -> SensingParams:
        return SensingParams(self.theta, db_to_linear(self.snr_db if snr_db is None else snr_db),
                             self.noise_variance,
                             self.samples[0] if n_samples is None else n_samples)

    def montecarlo(self) -> ex.MonteCarloSettings | None:
        if self.trials_h1 == 0 and self.trials_h0 == 0:
            return None
        if self.trials_h1 < 1 or (self.command == "simulate" and self.trials_h0 < 1):
            raise UsageError("Monte Carlo needs trials-h1 >= 1 (and trials-h0 >= 1 for simulate)")
        return ex.MonteCarloSettings(max(self.trials_h0, 1), self.trials_h1, self.seed,
                                     self.pilot_seed, self.confidence, self.workers)


def read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in _HELP:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _number(text: str, key: str, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise UsageError(f"--{key}: cannot parse {text!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(value):
        raise UsageError(f"--{key} must be finite")
    return value


def _list(text: str, key: str, kind=float) -> tuple:
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError(f"--{key} must not be empty")
    return tuple(_number(t.strip(), key, kind) for t in items)


def _triple(text: str, key: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--{key} expects lo:hi:third, got {text!r}")
    return tuple(_number(p, key) for p in parts)


def _snr_grid(text: str) -> tuple[float, ...]:
    lo, hi, step = _triple(text, "snr-grid-db")
    if step <= 0 or hi < lo:
        raise UsageError("--snr-grid-db needs step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return tuple(round(lo + i * step, 10) for i in range(count))


def _pfa_grid(text: str) -> tuple[float, ...]:
    lo, hi, points = _triple(text, "pfa-grid")
    if not (0.0 < lo < hi < 1.0):
        raise UsageError("pfa must lie in (0, 1): --pfa-grid needs 0 < lo < hi < 1")
    if points != int(points) or points < 2:
        raise UsageError("--pfa-grid needs an integer point count >= 2")
    ratio = (hi / lo) ** (1.0 / (int(points) - 1))
    grid = [lo * ratio ** i for i in range(int(points))]
    grid[-1] = hi
    return tuple(grid)


def _detectors(text: str) -> tuple[DetectorKind, ...]:
    if text.strip() == "all":
        return tuple(DetectorKind)
    names = [t.strip() for t in text.split(",") if t.strip()]
    unknown = [n for n in names if n not in _DETECTORS]
    if unknown or not names:
        raise UsageError(f"--detector: unknown detector(s) {unknown}; use np, pilot, energy or all")
    return tuple(d for d in DetectorKind if d.value in names)


def parse_command(argv: list[str]) -> RunPlan:
    """Resolve ``argv`` (and an optional config file) into a validated plan."""
    ns = build_parser().parse_args(argv)
    command = ns.command
    cli = {k: v for k, v in vars(ns).items()
           if v is not None and k not in ("command", "config")}
    cli = {k.replace("_", "-"): v for k, v in cli.items()}
    config = read_config(ns.config) if ns.config else {}

    for layer in (config, cli):
        if "theta" in layer and "pilot-offset-db" in layer:
            raise UsageError("--theta and --pilot-offset-db are mutually exclusive")
    if "pilot-offset-db" in cli or ("pilot-offset-db" in config and "theta" not in cli):
        source = cli if "pilot-offset-db" in cli else config
        theta = theta_from_pilot_offset_db(_number(source["pilot-offset-db"], "pilot-offset-db"))
        config.pop("theta", None)
        cli.pop("theta", None)
    else:
        theta = None

    def get(key: str) -> str:
        if key in cli:
            return cli[key]
        if key in config:
            return config[key]
        default = DEFAULTS[key]
        return default.get(command, default[None]) if isinstance(default, dict) else default

    if theta is None:
        theta = _number(get("theta"), "theta")
    if not theta < 1.0:
        raise UsageError(f"theta must be < 1 (got {theta})")
    if not theta >= 0.0:
        raise UsageError(f"theta must be >= 0 (got {theta})")

    samples = _list(get("samples"), "samples", int)
    if any(n < 1 for n in samples):
        raise UsageError("samples must be >= 1")
    if command != "sweep-snr" and len(samples) != 1:
        raise UsageError(f"{command} takes a single --samples value")

    pfa = _list(get("pfa"), "pfa")
    if any(not 0.0 < p < 1.0 for p in pfa):
        raise UsageError(f"pfa must lie in (0, 1) (got {get('pfa')})")
    pmd = _number(get("pmd"), "pmd")
    if not 0.0 < pmd < 1.0:
        raise UsageError(f"pmd must lie in (0, 1) (got {pmd})")
    confidence = _number(get("confidence"), "confidence")
    if not 0.0 < confidence < 1.0:
        raise UsageError(f"confidence must lie in (0, 1) (got {confidence})")
    noise_variance = _number(get("noise-variance"), "noise-variance")
    if not noise_variance > 0.0:
        raise UsageError(f"noise-variance must be > 0 (got {noise_variance})")
    trials_h0 = _number(get("trials-h0"), "trials-h0", int)
    trials_h1 = _number(get("trials-h1"), "trials-h1", int)
    if trials_h0 < 0 or trials_h1 < 0:
        raise UsageError("trial counts must be >= 0")
    workers = _number(get("workers"), "workers", int)
    if workers < 1:
        raise UsageError("workers must be >= 1")
    mode = get("mode").strip()
    if mode not in _MODES:
        raise UsageError(f"--mode must be paper, exact or both (got {mode!r})")

    return RunPlan(
        command=command,
        theta=theta,
        snr_db=_number(get("snr-db"), "snr-db"),
        snr_grid_db=_snr_grid(get("snr-grid-db")),
        samples=samples,
        trials_h0=trials_h0,
        trials_h1=trials_h1,
        pfa=tuple(sorted(set(pfa))),
        pfa_grid=_pfa_grid(get("pfa-grid")),
        pmd=pmd,
        seed=_number(get("seed"), "seed", int),
        pilot_seed=_number(get("pilot-seed"), "pilot-seed", int),
        modes=_MODES[mode],
        detectors=_detectors(get("detector")),
        out=get("out"),
        confidence=confidence,
        noise_variance=noise_variance,
        workers=workers,
    )


def _format(column: str, value) -> str:
    if value is None:
        return ""
    if isinstance(value, (DetectorKind, AnalyticMode)):
        return value.value
    if column in _PROBABILITY_COLUMNS:
        return format(value, ".10g")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(table: ex.CurveTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in table:
        writer.writerow([_format(c, getattr(row, c)) for c in CSV_HEADER])
    return buf.getvalue()


def emit_csv(table: ex.CurveTable, destination) -> int:
    """Write ``table`` as CSV to a path, ``'-'`` (stdout) or a text stream.

    Returns the number of bytes written.
    """
    text = format_csv(table)
    data = text.encode("utf-8")
    if destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "wb") as fh:
            fh.write(data)
    return len(data)


def parse_csv(text: str) -> ex.CurveTable:
    """Inverse of :func:`format_csv`."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        def opt(key, kind=float):
            return kind(rec[key]) if rec[key] != "" else None
        rows.append(ex.CurveRow(
            detector=DetectorKind(rec["detector"]),
            mode=AnalyticMode(rec["mode"]),
            theta=float(rec["theta"]),
            snr_db=float(rec["snr_db"]),
            n_samples=int(rec["n_samples"]),
            p_fa_target=float(rec["p_fa_target"]),
            threshold=float(rec["threshold"]),
            p_md_analytic=float(rec["p_md_analytic"]),
            p_md_empirical=opt("p_md_empirical"),
            ci_low=opt("ci_low"),
            ci_high=opt("ci_high"),
            trials=opt("trials", int),
            seed=opt("seed", int),
        ))
    return ex.CurveTable(rows)


def _min_samples_table(plan: RunPlan) -> ex.CurveTable:
    snr = db_to_linear(plan.snr_db)
    rows = []
    for detector in plan.detectors:
        for mode in plan.modes:
            for target in plan.pfa:
                n = ex.min_samples_for_targets(detector, plan.theta, snr, plan.noise_variance,
                                               target, plan.pmd, mode)
                point = performance_point(detector, plan.params(n_samples=n), target, mode)
                rows.append(ex.CurveRow(detector, mode, plan.theta, plan.snr_db, n, target,
                                        point.threshold, point.p_md))
    return ex.CurveTable(rows)


def execute(plan: RunPlan) -> int:
    if plan.command == "selftest":
        return 0 if run_selftest() else 1

    if plan.command == "croc":
        table = ex.run_croc(ex.CrocSpec(plan.params(), plan.detectors, plan.pfa_grid,
                                        plan.modes, plan.montecarlo()))
    elif plan.command == "sweep-snr":
        table = ex.run_pmd_vs_snr(ex.SweepSpec(plan.theta, plan.snr_grid_db, plan.pfa,
                                               plan.samples, plan.noise_variance, plan.detectors,
                                               plan.modes, plan.montecarlo()))
    elif plan.command == "calibrate":
        table = ex.run_croc(ex.CrocSpec(plan.params(), plan.detectors, plan.pfa, plan.modes,
                                        plan.montecarlo()))
    elif plan.command == "simulate":
        table, false_alarms = ex.run_simulation(plan.params(), plan.detectors, plan.modes,
                                                plan.pfa, plan.montecarlo())
        for (detector, mode, target), est in false_alarms.items():
            print(f"{detector.value}/{mode.value} target P_FA={target:g}: empirical "
                  f"{est.proportion:.5f} [{est.ci_low:.5f}, {est.ci_high:.5f}] "
                  f"({est.successes}/{est.trials})", file=sys.stderr)
    else:
        table = _min_samples_table(plan)
    emit_csv(table, plan.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse_command(argv)
        return execute(plan)
    except (UsageError, DomainError) as exc:
        print(f"pilotsense: error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"pilotsense: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"pilotsense: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
