"""Command-line front end.

Subcommands: ``classify``, ``limits``, ``trace``, ``oracle``.  Reports are
JSON on stdout (numbers rounded to 12 significant digits) and traces are
CSV; identical inputs and seed produce byte-identical output.  Exit codes:
0 success, 2 input/load error, 3 internal failure, 4 no convergence,
5 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .errors import CapExceeded, ModelLoadError, NoConvergence, SchemaViolation
from .ergodicity import ITER_CAP, full_report
from .graph import classify, to_dot
from .model import Gamble, TransitionModel, load_gamble_file, load_model_file
from .operator import UpperTransitionOperator, average_recursion, average_trace, iterate_lower, iterate_upper
from .oracle import ENUM_CAP, SAMPLE_COUNT, ci_upper_average_bruteforce, ri_upper_average

EXIT_OK = 0
EXIT_LOAD = 2
EXIT_INTERNAL = 3
EXIT_NO_CONVERGENCE = 4
EXIT_CAP = 5


@dataclass
class RunConfig:
    tol_eig: float = 1e-9
    iter_cap: int = ITER_CAP
    k_trace: int = 1
    oracle_cap: int = ENUM_CAP
    seed: int = 0

    def __post_init__(self):
        if self.tol_eig <= 0 or self.iter_cap <= 0 or self.k_trace <= 0:
            raise ValueError("tolerances, caps and horizons must be positive")
        if self.oracle_cap <= 0 or self.seed < 0:
            raise ValueError("oracle cap must be positive and seed nonnegative")


def _round12(obj):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") + 0.0
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def _emit_json(report: dict) -> None:
    sys.stdout.write(json.dumps(_round12(report), indent=2) + "\n")


def _load_inputs(args) -> tuple[TransitionModel, Gamble | None]:
    model = load_model_file(args.model)
    gamble = None
    if getattr(args, "gamble", None):
        gamble = load_gamble_file(args.gamble, model.states)
    elif getattr(args, "f", None):
        gamble = _parse_inline_gamble(args.f, model)
    return model, gamble


def _parse_inline_gamble(text: str, model: TransitionModel) -> Gamble:
    values = {}
    for part in text.split(","):
        if "=" not in part:
            raise SchemaViolation(f"bad inline gamble entry {part!r}; expected label=value")
        lab, _, raw = part.partition("=")
        try:
            values[lab.strip()] = float(raw)
        except ValueError:
            raise SchemaViolation(f"bad number {raw!r} in inline gamble") from None
    return Gamble.from_dict(model.states, values)


def cmd_classify(args) -> int:
    model, _ = _load_inputs(args)
    report = classify(model)
    dec = report.decomposition
    labels = model.states.labels
    witness: dict = {}
    if dec.top_class is None:
        witness["reason"] = "no top class"
    if dec.top_class is not None and not report.tcr:
        witness["period"] = report.period
    if report.confining_set is not None:
        witness["confining_set"] = [labels[i] for i in report.confining_set]
    out = {
        "classes": [[labels[i] for i in comp] for comp in dec.classes],
        "top_class": (
            [labels[i] for i in dec.classes[dec.top_class]]
            if dec.top_class is not None
            else None
        ),
        "closed": list(dec.closed),
        "tcr": report.tcr,
        "tca": report.tca,
        "ergodic": report.tcr and report.tca,
        "weakly_ergodic": report.tca,
        "witness": witness or None,
    }
    _emit_json(out)
    if args.emit_dot:
        with open(args.emit_dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(model, report.graph))
    return EXIT_OK


def cmd_limits(args) -> int:
    model, gamble = _load_inputs(args)
    if gamble is None:
        raise SchemaViolation("limits requires a gamble (--gamble FILE or --f ...)")
    cfg = RunConfig(tol_eig=args.tol, iter_cap=args.iter_cap)
    op = UpperTransitionOperator(model)
    report = full_report(op, gamble, tol=cfg.tol_eig, iter_cap=cfg.iter_cap)
    out: dict = {}
    if report.limit_upper is not None:
        out["limit_upper"] = report.limit_upper
    if report.limit_lower is not None:
        out["limit_lower"] = report.limit_lower
    if report.limit_avg_upper is not None:
        out["limit_avg_upper"] = report.limit_avg_upper
    if report.limit_avg_lower is not None:
        out["limit_avg_lower"] = report.limit_avg_lower
    out["per_class_limits"] = {
        ",".join(key): val for key, val in report.per_class_limits.items()
    }
    out["residuals"] = {
        key: diag["residual"] for key, diag in report.diagnostics["eigen"].items()
    }
    _emit_json(out)
    return EXIT_OK


def cmd_trace(args) -> int:
    model, gamble = _load_inputs(args)
    if gamble is None:
        raise SchemaViolation("trace requires a gamble (--gamble FILE or --f ...)")
    cfg = RunConfig(k_trace=args.k)
    op = UpperTransitionOperator(model)
    upper_states = average_trace(op, gamble, cfg.k_trace)
    lower_states = average_trace(op, -gamble, cfg.k_trace)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "state", "m_bar_upper", "m_bar_lower", "u_k_upper", "u_k_lower"])
    u_up = gamble.values.copy()
    u_lo = gamble.values.copy()
    for j in range(cfg.k_trace):
        if j > 0:
            u_up = iterate_upper(op, u_up, 1).values
            u_lo = iterate_lower(op, u_lo, 1).values
        m_up = upper_states[j].m_bar.values
        m_lo = -lower_states[j].m_bar.values
        for x, lab in enumerate(model.states.labels):
            writer.writerow(
                [
                    j + 1,
                    lab,
                    f"{m_up[x]:.12g}",
                    f"{m_lo[x]:.12g}",
                    f"{u_up[x]:.12g}",
                    f"{u_lo[x]:.12g}",
                ]
            )
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_oracle(args) -> int:
    model, gamble = _load_inputs(args)
    if gamble is None:
        raise SchemaViolation("oracle requires a gamble (--gamble FILE or --f ...)")
    cfg = RunConfig(k_trace=args.k, oracle_cap=args.oracle_cap, seed=args.seed)
    x = model.states.index(args.x) if args.x else 0
    op = UpperTransitionOperator(model)
    ci = ci_upper_average_bruteforce(model, gamble, x, cfg.k_trace, cap=cfg.oracle_cap)
    rec = average_recursion(op, gamble, cfg.k_trace)
    rec_value = float(rec.m_bar.values[x])
    ri = ri_upper_average(
        model, gamble, x, cfg.k_trace,
        samples=args.samples, seed=cfg.seed, cap=cfg.oracle_cap,
    )
    out = {
        "ci_bruteforce": ci.value,
        "recursion_value": rec_value,
        "ri_vertex_max": ri.vertex_value,
        "ri_sampled_max": ri.sampled_value,
        "agree": bool(abs(ci.value - rec_value) <= 1e-9),
    }
    _emit_json(out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imcergo",
        description="Analyze upper/lower expected time averages of imprecise Markov chains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser("classify", help="accessibility classification")
    p_classify.add_argument("model")
    p_classify.add_argument("--emit-dot", metavar="PATH", default=None)
    p_classify.set_defaults(func=cmd_classify)

    def add_gamble_opts(p):
        p.add_argument("--gamble", metavar="FILE", default=None)
        p.add_argument("--f", metavar="a=0,b=1", default=None, help="inline gamble")

    p_limits = sub.add_parser("limits", help="limit expectations and time averages")
    p_limits.add_argument("model")
    add_gamble_opts(p_limits)
    p_limits.add_argument("--tol", type=float, default=1e-9)
    p_limits.add_argument("--iter-cap", type=int, default=ITER_CAP)
    p_limits.set_defaults(func=cmd_limits)

    p_trace = sub.add_parser("trace", help="CSV trace of the recursions")
    p_trace.add_argument("model")
    add_gamble_opts(p_trace)
    p_trace.add_argument("--k", type=int, required=True)
    p_trace.set_defaults(func=cmd_trace)

    p_oracle = sub.add_parser("oracle", help="brute-force cross-checks")
    p_oracle.add_argument("model")
    add_gamble_opts(p_oracle)
    p_oracle.add_argument("--k", type=int, required=True)
    p_oracle.add_argument("--x", default=None, help="start state (default: first)")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--samples", type=int, default=SAMPLE_COUNT)
    p_oracle.add_argument("--oracle-cap", type=int, default=ENUM_CAP)
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelLoadError, FileNotFoundError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except NoConvergence as exc:
        print(
            f"error: {exc} (iterations={exc.iterations}, residual={exc.residual})",
            file=sys.stderr,
        )
        return EXIT_NO_CONVERGENCE
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
