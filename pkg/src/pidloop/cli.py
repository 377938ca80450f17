"""``pidloop`` command line: run, sweep and validate.

Exit status is 0 on success, 1 on usage or I/O errors, and 2 when a run
diverges or a validation check fails.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

from . import validation
from .control import Gains, ReferenceSignal
from .simloop import (
    DEFAULT_BAND_PCT,
    Classification,
    DegenerateStepError,
    IntegralMode,
    ResponseMetrics,
    SimConfig,
    compute_metrics,
    gain_sweep,
    simulate,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

TRAJECTORY_HEADER = ("t", "x", "e", "v")
SWEEP_HEADER = ("value",) + ResponseMetrics.FIELDS

# Config-file key -> argparse dest (config keys are long flag names).
CONFIG_KEYS = {
    "kp": "kp", "ki": "ki", "kd": "kd", "h": "h", "t-end": "t_end",
    "x0": "x0", "ref": "ref", "vmax": "vmax", "integral-mode": "integral_mode",
    "out": "out", "axis": "axis", "values": "values", "band": "band",
    "workers": "workers",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(v):
    """17 significant digits, enough to round-trip a double."""
    return format(v, ".17g")


def _finite(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _positive(text):
    v = _finite(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _nonneg(text):
    v = _finite(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


def _value_list(text):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("value list is empty")
    return [_finite(p) for p in parts]


def _workers(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return n


TYPES = {
    "kp": _finite, "ki": _finite, "kd": _finite, "h": _positive,
    "t_end": _positive, "x0": _finite, "ref": _finite, "vmax": _positive,
    "integral_mode": str, "out": str, "axis": str, "values": _value_list,
    "band": _positive, "workers": _workers,
}


def _sim_flags(p):
    p.add_argument("--config", metavar="PATH", help="key=value file; flags override it")
    p.add_argument("--kp", type=_finite)
    p.add_argument("--ki", type=_finite)
    p.add_argument("--kd", type=_finite)
    p.add_argument("--h", type=_positive, help="step size in s (default 0.01)")
    p.add_argument("--t-end", dest="t_end", type=_positive, help="horizon in s (default 10)")
    p.add_argument("--x0", type=_finite, help="initial position in m (default 0)")
    p.add_argument("--ref", type=_finite, help="constant setpoint in m (default 1)")
    p.add_argument("--vmax", type=_positive, help="symmetric velocity clamp (default off)")
    p.add_argument("--integral-mode", dest="integral_mode",
                   choices=[m.value for m in IntegralMode])
    p.add_argument("--band", type=_positive,
                   help=f"settling band in percent of the step (default {DEFAULT_BAND_PCT:g})")
    p.add_argument("--out", metavar="PATH")


def build_parser():
    parser = _Parser(prog="pidloop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="{run,sweep,validate}")
    sub.required = True

    run = sub.add_parser("run", help="simulate once and write the trajectory CSV")
    _sim_flags(run)

    sweep = sub.add_parser("sweep", help="vary one gain and write a metrics CSV")
    _sim_flags(sweep)
    sweep.add_argument("--axis", choices=["kp", "ki", "kd"])
    sweep.add_argument("--values", type=_value_list, help="comma-separated gain values")
    sweep.add_argument("--workers", type=_workers, help="parallel runs (default 1)")

    val = sub.add_parser("validate", help="check the stencils against sin(x)")
    val.add_argument("--h", type=_positive, help="sampling step for the sin checks")
    val.add_argument("--tol", type=_nonneg, help="absolute tolerance for both checks")

    return parser


def read_config(path):
    """Parse a flat ``key=value`` file into argparse dest names."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().lstrip("-").replace("_", "-")
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: bad config line {raw.strip()!r}")
            dest = CONFIG_KEYS[key]
            try:
                out[dest] = TYPES[dest](value.strip())
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{path}:{lineno}: {key}: {exc}")
    return out


def _merged(args):
    opts = {}
    if getattr(args, "config", None):
        try:
            opts.update(read_config(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}")
    opts.update({k: v for k, v in vars(args).items() if v is not None})
    return opts


def _require(opts, *names):
    missing = [n for n in names if opts.get(n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def config_from(opts, need_gains=True):
    if need_gains:
        _require(opts, "kp", "ki", "kd")
    base = SimConfig()
    mode = opts.get("integral_mode", base.integral_mode.value)
    if mode not in [m.value for m in IntegralMode]:
        raise UsageError(f"unknown integral mode {mode!r}")
    try:
        return SimConfig(
            gains=Gains(opts.get("kp", base.gains.kp), opts.get("ki", base.gains.ki),
                        opts.get("kd", base.gains.kd)),
            h=opts.get("h", base.h),
            t_end=opts.get("t_end", base.t_end),
            x0=opts.get("x0", base.x0),
            reference=ReferenceSignal.constant(opts.get("ref", 1.0)),
            v_max=opts.get("vmax"),
            integral_mode=mode,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _open_out(path):
    try:
        return open(path, "w", newline="", encoding="ascii")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}")


def write_trajectory(traj, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRAJECTORY_HEADER)
    for row in traj.rows():
        w.writerow([fmt(v) for v in row])


def write_sweep(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for value, m in rows:
        w.writerow([fmt(value)] + [fmt(c) if isinstance(c, float) else c
                                   for c in m.as_row()])


def format_metrics(m):
    return "\n".join([
        f"overshoot_pct      {m.overshoot_pct:.6g}",
        f"settling_time      {m.settling_time:.6g}",
        f"steady_state_error {m.steady_state_error:.6g}",
        f"rise_time          {m.rise_time:.6g}",
        f"classification     {m.classification.value}",
    ])


def cmd_run(opts, stdout):
    _require(opts, "out")
    config = config_from(opts)
    traj = simulate(config)
    try:
        metrics = compute_metrics(traj, config.reference, opts.get("band", DEFAULT_BAND_PCT))
    except DegenerateStepError:
        metrics = None
    with _open_out(opts["out"]) as fh:
        write_trajectory(traj, fh)
    print(f"wrote {len(traj)} samples to {opts['out']}", file=stdout)
    if metrics is None:
        print("metrics undefined: x0 equals the setpoint", file=stdout)
        return EXIT_FAIL if traj.diverged else EXIT_OK
    print(format_metrics(metrics), file=stdout)
    return EXIT_FAIL if metrics.classification is Classification.DIVERGED else EXIT_OK


def cmd_sweep(opts, stdout):
    _require(opts, "axis", "values", "out")
    if opts["axis"] not in ("kp", "ki", "kd"):
        raise UsageError(f"unknown axis {opts['axis']!r}")
    base = config_from(opts, need_gains=False)
    try:
        rows = gain_sweep(base, opts["axis"], opts["values"],
                          band_pct=opts.get("band", DEFAULT_BAND_PCT),
                          workers=opts.get("workers", 1))
    except DegenerateStepError as exc:
        raise UsageError(str(exc))
    with _open_out(opts["out"]) as fh:
        write_sweep(rows, fh)
    for value, m in rows:
        print(f"{opts['axis']}={value:g}  {m.classification.value}  "
              f"overshoot={m.overshoot_pct:.4g}%  settling={m.settling_time:.4g}s", file=stdout)
    return EXIT_OK


def cmd_validate(opts, stdout):
    checks = validation.run_checks(h=opts.get("h"), tol=opts.get("tol"))
    for c in checks:
        print(c.line(), file=stdout)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        opts = _merged(args)
        return COMMANDS[args.command](opts, stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
