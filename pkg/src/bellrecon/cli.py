"""Command-line front end.

Every option can come from a flag, an environment variable
(``BELLRECON_`` + upper-cased flag name, dashes as underscores) or a flat
``key = value`` config file given with ``--config``. Flags beat the
environment, which beats the file.

Exit codes: 0 success, 2 usage, 3 invalid configuration, 4 runtime failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    ControlParams,
    HamiltonianParams,
    distort_analytic,
    fidelity_do_nothing,
    reconstruct,
)
from .measurement import builtin_set, helstrom, optimal_povm
from .pipeline import MEASUREMENTS, run_pipeline, theta_delta_grid
from .qstate import BELL, PureState, concurrence, fidelity_pure, make_initial, trace_distance
from . import ratapprox

ENV_PREFIX = "BELLRECON_"
COMMANDS = ("evolve", "reconstruct", "discriminate", "pipeline", "sweep-theta-delta", "sweep-j")

EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 2, 3, 4


class ConfigError(Exception):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# name -> (type, default)
OPTIONS = {
    "command": (str, None),
    "j": (float, 1.0),
    "b1": (float, 0.3),
    "b2": (float, -0.2),
    "theta": (float, math.pi / 4),
    "t": (float, 1.0),
    "n": (int, 1),
    "m": (int, None),
    "s": (int, None),
    "k-digits": (int, 5),
    "n-max": (int, None),
    "measurement": (str, "mbprime"),
    "samples": (int, 10000),
    "seed": (int, 0),
    "out": (str, None),
    "format": (str, "json"),
    "degrees": (bool, False),
    "theta-steps": (int, 31),
    "delta-steps": (int, 31),
    "workers": (int, 1),
}


def _key(name: str) -> str:
    return name.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bellrecon",
        description="Distortion, reconstruction, discrimination and repreparation of Bell pairs.",
    )
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--command", choices=COMMANDS)
    ap.add_argument("--j", type=float, help="exchange coupling J")
    ap.add_argument("--b1", type=float, help="z field on qubit 1")
    ap.add_argument("--b2", type=float, help="z field on qubit 2")
    ap.add_argument("--theta", type=float, help="state parameter, radians unless --degrees")
    ap.add_argument("--t", type=float, help="dimensionless distortion time t' = R t")
    ap.add_argument("--n", type=int, help="loop integer n")
    ap.add_argument("--m", type=int, help="field integer m (default: smallest |delta b+|)")
    ap.add_argument("--s", type=int, help="numerator s of Q(j) = s/2n (default: round(2 n j))")
    ap.add_argument("--k-digits", type=int, help="known decimals of j (sweep-j)")
    ap.add_argument("--n-max", type=int, help="largest n scanned (sweep-j, default 10^k)")
    ap.add_argument("--measurement", choices=tuple(MEASUREMENTS))
    ap.add_argument("--samples", type=int, help="number of random j values (sweep-j)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output path (default stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--degrees", action="store_const", const=True, default=None,
                    help="read --theta in degrees")
    ap.add_argument("--theta-steps", type=int)
    ap.add_argument("--delta-steps", type=int)
    ap.add_argument("--workers", type=int, help="processes for sweep-j")
    return ap


def _coerce(name: str, raw: str, source: str):
    typ = OPTIONS[name][0]
    if typ is bool:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off", ""):
            return False
        raise ConfigError([f"{source}: {name}={raw!r} is not a boolean"])
    try:
        return typ(raw.strip())
    except ValueError:
        raise ConfigError([f"{source}: {name}={raw!r} is not a valid {typ.__name__}"]) from None


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError([f"cannot read config file {path!r}: {exc.strerror}"]) from None
    out, problems = {}, []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"{path}:{lineno}: expected key=value")
            continue
        key, val = (x.strip() for x in line.split("=", 1))
        name = key.lstrip("-").replace("_", "-")
        if name not in OPTIONS:
            problems.append(f"{path}:{lineno}: unknown key {key!r}")
            continue
        try:
            out[name] = _coerce(name, val, f"{path}:{lineno}")
        except ConfigError as exc:
            problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return out


def resolve_options(args: argparse.Namespace, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    merged = {name: default for name, (_, default) in OPTIONS.items()}
    problems = []
    if args.config:
        try:
            merged.update(read_config_file(args.config))
        except ConfigError as exc:
            problems.extend(exc.problems)
    for name in OPTIONS:
        var = ENV_PREFIX + _key(name).upper()
        if var in environ:
            try:
                merged[name] = _coerce(name, environ[var], var)
            except ConfigError as exc:
                problems.extend(exc.problems)
    for name in OPTIONS:
        val = getattr(args, _key(name))
        if val is not None:
            merged[name] = val
    if problems:
        raise ConfigError(problems)
    return merged


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    physics: HamiltonianParams | None
    control: ControlParams | None
    theta: float
    t: float
    measurement: str
    out: str | None
    format: str
    seed: int
    samples: int
    k_digits: int
    n_max: int | None
    n: int
    theta_steps: int
    delta_steps: int
    workers: int

    def echo(self) -> dict:
        d = {
            "command": self.command,
            "theta": self.theta,
            "t": self.t,
            "measurement": self.measurement,
            "seed": self.seed,
        }
        if self.physics is not None:
            d["physics"] = {"J": self.physics.J, "B1": self.physics.B1, "B2": self.physics.B2,
                            "R": self.physics.R, "j": self.physics.j,
                            "b_plus": self.physics.b_plus, "b_minus": self.physics.b_minus}
        if self.control is not None:
            d["control"] = {"n": self.control.n, "m": self.control.m, "s": self.control.s,
                            "t": self.control.t, "T": self.control.T,
                            "delta": self.control.delta(self.physics),
                            "delta_b_plus": self.control.delta_b_plus(self.physics)}
        if self.command == "sweep-j":
            d.update(samples=self.samples, k_digits=self.k_digits, n_max=self.n_max)
        if self.command == "sweep-theta-delta":
            d.update(n=self.n, theta_steps=self.theta_steps, delta_steps=self.delta_steps)
        return d


def validate(opts: dict) -> ExperimentConfig:
    """Check every field and collect all problems before raising."""
    problems = []
    cmd = opts["command"]
    if cmd is None:
        problems.append("no command given (--command)")
    elif cmd not in COMMANDS:
        problems.append(f"unknown command {cmd!r}")
    theta = opts["theta"]
    if opts["degrees"]:
        theta = math.radians(theta)
    if not (0.0 <= theta <= math.pi / 2 + 1e-15):
        problems.append(f"theta={theta!r} rad outside [0, pi/2]")
    theta = min(max(theta, 0.0), math.pi / 2)
    if opts["measurement"] not in MEASUREMENTS:
        problems.append(f"unknown measurement {opts['measurement']!r}")
    if opts["format"] not in ("csv", "json"):
        problems.append(f"format must be csv or json, got {opts['format']!r}")
    if opts["n"] < 1:
        problems.append(f"n={opts['n']} must be >= 1")

    physics = control = None
    if cmd in ("evolve", "reconstruct", "discriminate", "pipeline"):
        try:
            physics = HamiltonianParams(opts["j"], opts["b1"], opts["b2"])
        except ValueError as exc:
            problems.append(f"invalid physics: {exc}")
        if opts["t"] < 0:
            problems.append(f"t={opts['t']} must be non-negative")
        if physics is not None and cmd != "evolve" and opts["n"] >= 1 and opts["t"] >= 0:
            try:
                control = ControlParams.for_params(physics, opts["n"], opts["t"],
                                                   s=opts["s"], m=opts["m"])
                if control.T <= 0:
                    problems.append(f"T = n*pi - t = {control.T:.6g} must be positive (raise n)")
                    control = None
            except ValueError as exc:
                problems.append(f"invalid control: {exc}")
    if cmd == "sweep-j":
        if opts["samples"] < 100:
            problems.append(f"samples={opts['samples']} must be >= 100")
        if not (1 <= opts["k-digits"] <= 12):
            problems.append(f"k-digits={opts['k-digits']} must be in 1..12")
        if opts["n-max"] is not None and opts["n-max"] < 1:
            problems.append(f"n-max={opts['n-max']} must be >= 1")
        if opts["workers"] < 1:
            problems.append("workers must be >= 1")
    if cmd == "sweep-theta-delta":
        for name in ("theta-steps", "delta-steps"):
            if opts[name] < 2:
                problems.append(f"{name}={opts[name]} must be >= 2")
    if problems:
        raise ConfigError(problems)
    return ExperimentConfig(
        command=cmd, physics=physics, control=control, theta=theta, t=opts["t"],
        measurement=opts["measurement"], out=opts["out"], format=opts["format"],
        seed=opts["seed"], samples=opts["samples"], k_digits=opts["k-digits"],
        n_max=opts["n-max"], n=opts["n"], theta_steps=opts["theta-steps"],
        delta_steps=opts["delta-steps"], workers=opts["workers"],
    )


def _amps(s: PureState) -> list[list[float]]:
    return [[float(a.real), float(a.imag)] for a in s.amps]


def _state_block(s: PureState) -> dict:
    return {"basis": s.basis.kind, "amplitudes": _amps(s), "concurrence": concurrence(s)}


# --- commands ---------------------------------------------------------------

def cmd_evolve(cfg: ExperimentConfig) -> dict:
    p, th, t = cfg.physics, cfg.theta, cfg.t
    states = [distort_analytic(p, t, k, th) for k in (1, 2)]
    return {
        "distorted": [_state_block(s) for s in states],
        "trace_distance": trace_distance(states[0].density(), states[1].density()),
        "fidelity_with_source": [fidelity_pure(make_initial(k, th), s)
                                 for k, s in zip((1, 2), states)],
    }


def cmd_reconstruct(cfg: ExperimentConfig) -> dict:
    p, c, th = cfg.physics, cfg.control, cfg.theta
    states = [reconstruct(p, c, k, th) for k in (1, 2)]
    fids = [fidelity_pure(make_initial(k, th), s) for k, s in zip((1, 2), states)]
    return {
        "reconstructed": [_state_block(s) for s in states],
        "fidelity_with_source": fids,
        "average_fidelity": 0.5 * sum(fids),
        "do_nothing_fidelity": fidelity_do_nothing(th, c.n, c.delta(p)),
    }


def cmd_discriminate(cfg: ExperimentConfig) -> dict:
    p, c, th = cfg.physics, cfg.control, cfg.theta
    pre = [reconstruct(p, c, k, th) for k in (1, 2)]
    if cfg.measurement == "optimal":
        ms = optimal_povm(*pre)
    else:
        ms = builtin_set(MEASUREMENTS[cfg.measurement], th)
    res = helstrom(ms, *(b.to(ms.basis) for b in pre))
    return {
        "measurement": ms.label,
        "p_h1": res.p_h1,
        "p_h2": res.p_h2,
        "p_inconclusive": res.p_inconclusive,
        "average_fidelity": res.avg_fidelity,
    }


def cmd_pipeline(cfg: ExperimentConfig) -> dict:
    r = run_pipeline(cfg.physics, cfg.control, cfg.theta, cfg.measurement)
    return {
        "delta": r.delta,
        "reconstructed": [_state_block(s) for s in r.reconstructed],
        "outcome_probabilities": r.outcome_probabilities,
        "per_state_fidelity": list(r.per_state_fidelity),
        "average_fidelity": r.average_fidelity,
        "do_nothing_fidelity": r.do_nothing_fidelity,
    }


THETA_DELTA_COLUMNS = ("theta", "n", "delta", "f_c", "f_bprime", "f_n")
SWEEP_J_COLUMNS = ("j_true", "j_known", "n", "s", "delta", "one_minus_f_max", "omega")


def cmd_sweep_theta_delta(cfg: ExperimentConfig) -> list[tuple]:
    return list(theta_delta_grid(cfg.n, cfg.theta_steps, cfg.delta_steps))


def cmd_sweep_j(cfg: ExperimentConfig) -> list[tuple]:
    records, om = ratapprox.sweep(cfg.samples, cfg.k_digits, cfg.n_max, cfg.seed, cfg.workers)
    return [
        (r.j_true, r.j_known, r.best.n, r.best.s, r.best.delta, r.one_minus_f_max, float(o))
        for r, o in zip(records, om)
    ]


# --- output -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render_rows(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, obj))


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=1) + "\n"
    rows: list = []
    _flatten("", report, rows)
    return render_rows(("key", "value"), rows, "csv")


def _check_probabilities(report) -> None:
    """Every probability and fidelity in a report must lie in [0, 1]."""
    bad = []

    def walk(path, obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                walk(f"{path}.{k}", v)
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                walk(f"{path}[{i}]", v)
        elif isinstance(obj, float) and any(w in path for w in ("fidelity", "p_", "probabilit")):
            if not (-1e-12 <= obj <= 1 + 1e-12):
                bad.append(f"{path}={obj}")

    walk("", report)
    if bad:
        raise RuntimeError("out-of-range probabilities: " + ", ".join(bad))


def run(cfg: ExperimentConfig) -> tuple[str, dict]:
    """Execute a validated config; returns the rendered output and the report."""
    start = time.perf_counter()
    if cfg.command in ("sweep-theta-delta", "sweep-j"):
        if cfg.command == "sweep-j":
            cols, rows = SWEEP_J_COLUMNS, cmd_sweep_j(cfg)
        else:
            cols, rows = THETA_DELTA_COLUMNS, cmd_sweep_theta_delta(cfg)
        text = render_rows(cols, rows, cfg.format)
        report = {"config": cfg.echo(), "rows": len(rows)}
    else:
        body = {
            "evolve": cmd_evolve,
            "reconstruct": cmd_reconstruct,
            "discriminate": cmd_discriminate,
            "pipeline": cmd_pipeline,
        }[cfg.command](cfg)
        report = {"config": cfg.echo(), "results": body}
        _check_probabilities(report)
        text = render_report(report, cfg.format)
    report["duration_s"] = time.perf_counter() - start
    return text, report


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        opts = resolve_options(args, environ)
        if opts["command"] is not None and opts["command"] not in COMMANDS:
            print(f"bellrecon: unknown command {opts['command']!r}", file=sys.stderr)
            return EXIT_USAGE
        cfg = validate(opts)
    except ConfigError as exc:
        print("bellrecon: invalid configuration:", file=sys.stderr)
        for p in exc.problems:
            print(f"  - {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text, report = run(cfg)
        if cfg.out:
            with open(cfg.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 4
        print(f"bellrecon: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"bellrecon: {cfg.command} done in {report['duration_s']:.3f} s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
