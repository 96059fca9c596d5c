"""Command-line front end.

Subcommands:

* ``eval``    -- point evaluation: reduced parameters, regime, the three
                 fidelities, tuning parameters and photon bookkeeping
* ``sweep``   -- one-axis parameter sweep written as CSV (or JSON)
* ``verify``  -- the self-verification suite (``fast`` or ``full``)
* ``photons`` -- photon bookkeeping table for one protocol
* ``regimes`` -- the gain thresholds and regime map of the reduced task

Exit codes: 0 success, 2 usage, 3 domain error, 4 I/O failure,
5 verification failure.

All output is deterministic given the flags (and the verify seed); the
only non-reproducible bytes -- per-check wall times -- go to stderr.
Tables round to 5 significant digits, CSV to 10.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, formulas, verify
from .errors import AmpurifyError, DomainError
from .params import (
    MultimodeTask,
    NoisyEnsemble,
    classify,
    is_pure_input,
    photon_book,
    reduce,
    thresholds,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IO = 4
EXIT_VERIFY = 5

#: CSV column order; the header line is part of the CLI contract
CSV_HEADER = "axis_value,g_prime,f_det,f_prob,f_cft,regime,cosh_r,y,cos_theta,z"

_AXIS_DEST = {"g": "g", "lambda": "lam", "mu": "mu", "n": "n", "m": "m"}
_INT_AXES = ("n", "m")


class _UsageError(Exception):
    """Flag combinations argparse cannot catch on its own."""


@dataclass(frozen=True)
class SweepSpec:
    """One-axis sweep: ``axis`` runs over [start, stop] in ``steps`` points.

    ``fixed`` supplies every non-swept task field (its value on the swept
    axis is a placeholder).  Integer axes must land on integers.
    """

    axis: str
    start: float
    stop: float
    steps: int
    fixed: MultimodeTask

    def __post_init__(self) -> None:
        if self.axis not in _AXIS_DEST:
            raise DomainError(f"unknown sweep axis {self.axis!r}")
        if not self.start < self.stop:
            raise DomainError(
                f"sweep needs start < stop, got [{self.start!r}, {self.stop!r}]"
            )
        if self.steps < 2:
            raise DomainError(f"sweep needs steps >= 2, got {self.steps!r}")

    def values(self) -> list[float]:
        raw = np.linspace(self.start, self.stop, self.steps)
        if self.axis in _INT_AXES:
            for v in raw:
                if abs(v - round(v)) > 1e-9 * max(1.0, abs(v)):
                    raise DomainError(
                        f"axis {self.axis!r} is integer-valued but the grid hits "
                        f"{float(v)!r}; choose start/stop/steps on integers"
                    )
            return [float(round(v)) for v in raw]
        return [float(v) for v in raw]

    def task_at(self, value: float) -> MultimodeTask:
        fields = {
            "lam": self.fixed.lam,
            "mu": self.fixed.mu,
            "g": self.fixed.g,
            "n_in": self.fixed.n_in,
            "m_out": self.fixed.m_out,
        }
        dest = _AXIS_DEST[self.axis]
        key = {"lam": "lam", "mu": "mu", "g": "g", "n": "n_in", "m": "m_out"}[dest]
        fields[key] = int(value) if self.axis in _INT_AXES else value
        return MultimodeTask(**fields)


# ---------------------------------------------------------------------------
# rendering helpers
# ---------------------------------------------------------------------------


def _f5(v: float) -> str:
    return format(float(v), ".5g")


def _f10(v: float) -> str:
    return format(float(v), ".10g")


def _opt10(v: float | None) -> str:
    return "" if v is None else _f10(v)


def _regime_label(ens: NoisyEnsemble) -> str:
    reg = classify(ens)
    if ens.g_prime <= 1.0:
        return reg.tag.value
    return f"{reg.tag.value}+{reg.prob_tag.value}"


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _envelope(command: str, params: dict, result: dict) -> dict:
    return {
        "tool": "ampurify",
        "version": __version__,
        "command": command,
        "params": params,
        "result": result,
    }


def _task_params(task: MultimodeTask) -> dict:
    ens = reduce(task)
    return {
        "lambda": task.lam,
        "mu": task.mu,
        "g": task.g,
        "n": task.n_in,
        "m": task.m_out,
        "lambda_prime": ens.lambda_prime,
        "g_prime": ens.g_prime,
    }


def _task_from_args(args: argparse.Namespace) -> MultimodeTask:
    return MultimodeTask(lam=args.lam, mu=args.mu, g=args.g, n_in=args.n, m_out=args.m)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> int:
    task = _task_from_args(args)
    ens = reduce(task)
    book = photon_book(ens)
    report = formulas.fidelity_report(ens)
    tuning = formulas.tune(ens)
    det_thr, prob_thr = thresholds(ens)

    if args.json:
        result = {
            "regime": _regime_label(ens),
            "thresholds": {"det": det_thr, "prob": prob_thr},
            "fidelities": {"det": report.det, "prob": report.prob, "cft": report.cft},
            "tuning": {
                "cosh_r": tuning.cosh_r,
                "y": tuning.y,
                "cos_theta": tuning.cos_theta,
                "z": tuning.z,
                "plateau": tuning.plateau,
            },
            "photons": {
                "n_c": book.n_c,
                "n_t": book.n_t,
                "s": book.total,
                "pure_input": is_pure_input(ens),
            },
        }
        _print_json(_envelope("eval", _task_params(task), result))
        return EXIT_OK

    print(
        f"task: lambda={_f5(task.lam)} mu={_f5(task.mu)} g={_f5(task.g)} "
        f"n={task.n_in} m={task.m_out}"
    )
    print(f"reduced: lambda'={_f5(ens.lambda_prime)} mu={_f5(ens.mu)} g'={_f5(ens.g_prime)}")
    print(
        f"regime: {_regime_label(ens)} "
        f"(amplify threshold {_f5(det_thr)}, filter plateau {_f5(prob_thr)})"
    )
    if is_pure_input(ens):
        print("note: mu at or above the pure-input sentinel; input treated as pure")
    print(
        f"fidelities: det={_f5(report.det)} prob={_f5(report.prob)} cft={_f5(report.cft)}"
    )
    cosh_r = "-" if tuning.cosh_r is None else _f5(tuning.cosh_r)
    y = "-" if tuning.y is None else _f5(tuning.y)
    cos_theta = "-" if tuning.cos_theta is None else _f5(tuning.cos_theta)
    plateau = " (plateau)" if tuning.plateau else ""
    print(
        f"tuning: cosh_r={cosh_r} y={y}{plateau} cos_theta={cos_theta} z={_f5(tuning.z)}"
    )
    print(f"photons: N_C={_f5(book.n_c)} N_T={_f5(book.n_t)} S={_f5(book.total)}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    dest = _AXIS_DEST[args.axis]
    if getattr(args, dest) is not None:
        raise _UsageError(
            f"--{args.axis} cannot be fixed while sweeping --axis {args.axis}"
        )
    fields = {"lam": args.lam, "mu": args.mu, "g": args.g}
    fields[dest] = 1.0  # placeholder on the swept axis; rows overwrite it
    for name, value in fields.items():
        if value is None:
            flag = "lambda" if name == "lam" else name
            raise _UsageError(f"--{flag} is required when sweeping --axis {args.axis}")
    n_in = 1 if args.n is None else args.n
    m_out = 1 if args.m is None else args.m
    if dest == "n":
        n_in = 1
    if dest == "m":
        m_out = 1
    fixed = MultimodeTask(
        lam=fields["lam"], mu=fields["mu"], g=fields["g"], n_in=n_in, m_out=m_out
    )
    try:
        # Bad start/stop/steps come straight from the flags, so they are
        # usage errors (exit 2), not domain errors.
        spec = SweepSpec(
            axis=args.axis, start=args.start, stop=args.stop, steps=args.steps,
            fixed=fixed,
        )
        values = spec.values()
    except DomainError as exc:
        raise _UsageError(str(exc)) from exc
    if args.out is None and not args.json:
        raise _UsageError("sweep needs --out PATH and/or --json")

    rows = []
    for value in values:
        task = spec.task_at(value)
        ens = reduce(task)
        report = formulas.fidelity_report(ens)
        tuning = formulas.tune(ens)
        rows.append((value, ens, report, tuning))

    if args.out is not None:
        lines = [CSV_HEADER]
        for value, ens, report, tuning in rows:
            lines.append(
                ",".join(
                    (
                        _f10(value),
                        _f10(ens.g_prime),
                        _f10(report.det),
                        _f10(report.prob),
                        _f10(report.cft),
                        _regime_label(ens),
                        _opt10(tuning.cosh_r),
                        _opt10(tuning.y),
                        _opt10(tuning.cos_theta),
                        _f10(tuning.z),
                    )
                )
            )
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")

    if args.json:
        result = {
            "axis": spec.axis,
            "rows": [
                {
                    "axis_value": value,
                    "g_prime": ens.g_prime,
                    "f_det": report.det,
                    "f_prob": report.prob,
                    "f_cft": report.cft,
                    "regime": _regime_label(ens),
                    "cosh_r": tuning.cosh_r,
                    "y": tuning.y,
                    "cos_theta": tuning.cos_theta,
                    "z": tuning.z,
                }
                for value, ens, report, tuning in rows
            ],
        }
        params = _task_params(spec.fixed)
        params.update(
            {"axis": spec.axis, "start": spec.start, "stop": spec.stop, "steps": spec.steps}
        )
        _print_json(_envelope("sweep", params, result))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify.run_suite(level=args.level, seed=args.seed, dim=args.dim)
    if args.json:
        params = {"level": args.level, "seed": args.seed, "dim": args.dim}
        _print_json(_envelope("verify", params, report.to_json_dict()))
    else:
        print(report.render())
    print(report.render_timings(), file=sys.stderr)
    return EXIT_OK if report.all_passed else EXIT_VERIFY


def cmd_photons(args: argparse.Namespace) -> int:
    task = _task_from_args(args)
    ens = reduce(task)
    book = photon_book(ens)
    n_single_in = book.n_t
    n_total_in = task.n_in * n_single_in

    notes = []
    if args.mode == "det":
        n_total_out, n_single_out = formulas.photon_output_det(task)
        extra = {}
        cosh_r = ens.g_prime * book.n_c / (1.0 + book.total)
        if cosh_r <= 1.0:
            notes.append("identity channel (g' below the amplify threshold)")
    else:
        tuning = formulas.tune(ens)
        if tuning.y is None:
            raise DomainError(
                f"probabilistic bookkeeping needs g' >= 1, got {ens.g_prime!r}"
            )
        n_t_out, n_total_out, n_single_out = formulas.photon_output_prob(task, tuning.y)
        extra = {"y": tuning.y, "n_t_out": n_t_out}
        if tuning.y == 1.0:
            notes.append("no change (passive filter, y = 1)")
    if n_single_out < n_single_in:
        notes.append("net purification (N'_single < N_single)")

    if args.json:
        result = {
            "mode": args.mode,
            "n_single": n_single_in,
            "n_total": n_total_in,
            "n_single_out": n_single_out,
            "n_total_out": n_total_out,
            "notes": notes,
        }
        for key, value in extra.items():
            result[key] = value
        _print_json(_envelope("photons", _task_params(task), result))
        return EXIT_OK

    print(f"photon bookkeeping ({'deterministic' if args.mode == 'det' else 'probabilistic'} protocol)")
    if "y" in extra:
        print(f"filter ratio y = {_f5(extra['y'])}")
        print(f"N_T        = {_f5(book.n_t)}")
        print(f"N'_T       = {_f5(extra['n_t_out'])}")
    print(f"N_single   = {_f5(n_single_in)}")
    print(f"N_total    = {_f5(n_total_in)}")
    print(f"N'_single  = {_f5(n_single_out)}")
    print(f"N'_total   = {_f5(n_total_out)}")
    for note in notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_regimes(args: argparse.Namespace) -> int:
    task = _task_from_args(args)
    ens = reduce(task)
    book = photon_book(ens)
    det_thr, prob_thr = thresholds(ens)
    tangency = book.total / book.n_c

    if args.json:
        result = {
            "regime": _regime_label(ens),
            "unit_gain": 1.0,
            "passive_filter_gain": tangency,
            "prob_threshold": prob_thr,
            "det_threshold": det_thr,
            "pure_input": is_pure_input(ens),
        }
        _print_json(_envelope("regimes", _task_params(task), result))
        return EXIT_OK

    print(f"reduced: lambda'={_f5(ens.lambda_prime)} mu={_f5(ens.mu)} g'={_f5(ens.g_prime)}")
    print("gain landmarks:")
    print("  1          purification ends; amplification begins")
    print(
        f"  {_f5(tangency):<10} passive-filter gain S/N_C "
        "(probabilistic advantage vanishes here)"
    )
    print(f"  {_f5(prob_thr):<10} filter plateau threshold sqrt(S(S+1))/N_C")
    print(f"  {_f5(det_thr):<10} amplify threshold (S+1)/N_C")
    print(f"current regime: {_regime_label(ens)}")
    if is_pure_input(ens):
        print("note: mu at or above the pure-input sentinel; input treated as pure")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be a non-negative integer, got {text!r}")
    return value


def _add_task_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    default_int = 1 if required else None
    p.add_argument("--lambda", dest="lam", type=float, required=required,
                   default=None, help="prior concentration lambda > 0")
    p.add_argument("--mu", type=float, required=required, default=None,
                   help="thermal-noise parameter mu > 0 (N_T = 1/mu)")
    p.add_argument("--g", type=float, required=required, default=None,
                   help="target amplitude gain g > 0")
    p.add_argument("--n", type=_positive_int, default=default_int,
                   help="input copies N (default 1)")
    p.add_argument("--m", type=_positive_int, default=default_int,
                   help="output copies M (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ampurify",
        description="Optimal fidelities for amplifying and purifying "
        "Gaussian-modulated noisy coherent states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one task")
    _add_task_flags(p_eval)
    p_eval.add_argument("--json", action="store_true", help="emit a JSON envelope")

    p_sweep = sub.add_parser("sweep", help="sweep one axis to CSV/JSON")
    p_sweep.add_argument("--axis", choices=sorted(_AXIS_DEST), required=True)
    p_sweep.add_argument("--start", type=float, required=True)
    p_sweep.add_argument("--stop", type=float, required=True)
    p_sweep.add_argument("--steps", type=_positive_int, required=True)
    p_sweep.add_argument("--out", default=None, help="CSV output path")
    _add_task_flags(p_sweep, required=False)
    p_sweep.add_argument("--json", action="store_true", help="emit a JSON envelope")

    p_verify = sub.add_parser("verify", help="run the self-verification suite")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")
    p_verify.add_argument("--seed", type=_nonneg_int, default=7)
    p_verify.add_argument("--dim", type=_positive_int, default=64,
                          help="Fock cutoff for the compact numeric checks")
    p_verify.add_argument("--json", action="store_true", help="emit a JSON envelope")

    p_photons = sub.add_parser("photons", help="photon bookkeeping for one protocol")
    p_photons.add_argument("--mode", choices=("det", "prob"), required=True)
    _add_task_flags(p_photons)
    p_photons.add_argument("--json", action="store_true", help="emit a JSON envelope")

    p_regimes = sub.add_parser("regimes", help="gain thresholds of the reduced task")
    _add_task_flags(p_regimes)
    p_regimes.add_argument("--json", action="store_true", help="emit a JSON envelope")

    return parser


_DISPATCH = {
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "photons": cmd_photons,
    "regimes": cmd_regimes,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AmpurifyError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
