"""Command-line interface.

Subcommands: classify, classes, chain, series, threshold, sweep, mc,
concat.  JSON goes to stdout by default; sweep and mc can emit CSV.  Every
payload embeds a run manifest (command, parameters, fault-model hash, tool
version).  Output is byte-deterministic for fixed flags and seed: the
manifest timestamp is null unless SOURCE_DATE_EPOCH is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .correction_circuits import DEFAULT_FAULT_MODEL, FaultModel, select_step, DONE, ABORT
from .erasure_model import (
    Model,
    ModelParams,
    build_classes,
    classify,
    enumerate_patterns,
    format_pattern,
    infer_model,
    initial_distribution,
    parse_pattern,
    pattern_counts,
    pattern_weight,
)
from .markov_engine import (
    build_chain,
    encoded_failure_at,
    recursion_series,
)
from .montecarlo import compare, simulate
from .threshold_solver import (
    BreakEvenCondition,
    NoSignChange,
    REFERENCE_SERIES_IDEAL,
    REFERENCE_SERIES_LOSSY,
    REFERENCE_THRESHOLDS,
    chain_recursion,
    concat_projection,
    default_bracket,
    measurement_recursion,
    polynomial_recursion,
    solve_break_even,
)


class CliError(Exception):
    pass


def _timestamp() -> Optional[str]:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is None:
        return None
    return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()


def _manifest(args: argparse.Namespace, config: FaultModel) -> dict:
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("func", "command") and v is not None
    }
    return {
        "command": args.command,
        "parameters": {k: str(v) for k, v in sorted(params.items())},
        "circuit_config_hash": config.config_hash(),
        "tool_version": __version__,
        "timestamp": _timestamp(),
    }


def _load_config(path: Optional[str]) -> FaultModel:
    if path is None:
        return DEFAULT_FAULT_MODEL
    with open(path, "r", encoding="utf-8") as fh:
        return FaultModel.from_json(json.load(fh))


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"invalid rational {text!r}: {exc}") from None


def _parse_grid(text: str) -> List[Fraction]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError("grid range must be lo:hi:step")
        lo, hi, step = (_parse_fraction(p) for p in parts)
        if step <= 0:
            raise CliError("grid step must be positive")
        grid = []
        x = lo
        while x <= hi:
            grid.append(x)
            x += step
        return grid
    return [_parse_fraction(p) for p in text.split(",") if p]


def _model_params(model: str, eps=None, delta=None) -> ModelParams:
    if model == "ideal":
        return ModelParams.ideal(eps)
    if model == "lossy":
        if delta is None:
            delta = eps
        return ModelParams.lossy(eps, delta)
    raise CliError(f"unknown model {model!r}")


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_classify(args, config: FaultModel) -> dict:
    pattern = parse_pattern(args.pattern)
    try:
        model = infer_model(pattern)
        mixed = False
    except ValueError:
        model, mixed = None, True
    result = classify(pattern)
    step = select_step(pattern)
    if step is DONE:
        action = "done"
    elif step is ABORT:
        action = "abort"
    else:
        action = {
            "kind": step.kind.value,
            "target": step.target,
            "helpers": list(step.helpers),
        }
    m, n, k = pattern_counts(pattern)
    if mixed:
        label = None
    else:
        table = build_classes(model or Model.IDEAL, config=config)
        label = table.classes[table.class_of(pattern)].label
    return {
        "pattern": format_pattern(pattern),
        "model": "mixed" if mixed else (model.value if model else None),
        "weight": pattern_weight(pattern),
        "full_erasures": m,
        "z_erasures": n,
        "z_measurements": k,
        "classification": result.value,
        "class_label": label,
        "next_step": action,
    }


def cmd_classes(args, config: FaultModel) -> dict:
    model = Model(args.model)
    table = build_classes(model, config=config)
    census = enumerate_patterns(model)
    payload = table.to_json()
    payload["pattern_total"] = census.total
    payload["correctable_patterns"] = census.correctable
    payload["procedure_fail_patterns"] = census.procedure_fail
    return payload


def cmd_chain(args, config: FaultModel) -> dict:
    params = _model_params(args.model)
    chain = build_chain(params, config=config)
    return chain.to_json()


def cmd_series(args, config: FaultModel) -> dict:
    model = Model(args.model)
    params = ModelParams.ideal() if model is Model.IDEAL else ModelParams.lossy()
    series = recursion_series(params, args.order, config=config)
    reference = (
        REFERENCE_SERIES_IDEAL if model is Model.IDEAL else REFERENCE_SERIES_LOSSY
    )
    return {
        "model": model.value,
        "order": args.order,
        "series": series.to_json(),
        "series_text": str(series),
        "reference_coefficients": {
            f"eps^{k}": str(reference.coefficient(k)) for k in range(3, 7)
        },
        "computed_coefficients": {
            f"eps^{k}": str(series.coefficient(k)) for k in range(min(args.order, 6) + 1)
        },
    }


def cmd_threshold(args, config: FaultModel) -> dict:
    tol = _parse_fraction(args.tol)
    if args.model == "measurement":
        condition = BreakEvenCondition.MEASUREMENT
        recursion = measurement_recursion
        provenance = "binomial measurement recursion"
    elif args.fixture == "ideal-ref":
        condition = BreakEvenCondition.IDEAL_GATE
        recursion = polynomial_recursion(REFERENCE_SERIES_IDEAL)
        provenance = "reference truncated series (ideal)"
    elif args.fixture == "lossy-ref":
        condition = BreakEvenCondition.LOSSY_GATE
        recursion = polynomial_recursion(REFERENCE_SERIES_LOSSY)
        provenance = "reference truncated series (lossy)"
    else:
        condition = (
            BreakEvenCondition.IDEAL_GATE
            if args.model == "ideal"
            else BreakEvenCondition.LOSSY_GATE
        )
        recursion = chain_recursion(args.model, config=config)
        provenance = "full absorbing chain"

    bracket = default_bracket(condition)
    if args.bracket:
        lo, hi = (_parse_fraction(p) for p in args.bracket.split(","))
        bracket = (lo, hi)

    try:
        result = solve_break_even(recursion, condition, bracket, tol)
    except NoSignChange as exc:
        samples = {}
        lo, hi = bracket
        for k in range(5):
            x = lo + (hi - lo) * Fraction(k, 4)
            samples[f"{float(x):.6g}"] = float(recursion(x) - condition.target(x))
        raise CliError(
            json.dumps(
                {
                    "error": "no_sign_change",
                    "detail": str(exc),
                    "bracket": [str(bracket[0]), str(bracket[1])],
                    "samples_of_recursion_minus_condition": samples,
                }
            )
        ) from None

    reference = REFERENCE_THRESHOLDS.get(args.model)
    payload = result.to_json()
    payload["model"] = args.model
    payload["recursion_provenance"] = provenance
    if reference is not None:
        payload["reference_value"] = reference
        payload["reference_note"] = (
            "commonly quoted value, shown for comparison; computed root is "
            "reported unrounded"
        )
        if abs(float(result.root) - reference) > 0.001:
            payload["reference_differs"] = True
    return payload


def cmd_sweep(args, config: FaultModel) -> dict:
    grid = _parse_grid(args.grid)
    for x in grid:
        if not 0 <= x <= Fraction(1, 2):
            raise CliError("grid values must lie in [0, 0.5]")
    model = Model(args.model)
    params = ModelParams.ideal() if model is Model.IDEAL else ModelParams.lossy()
    chain = build_chain(params, config=config)
    initial = initial_distribution(params, chain.table)

    rows = []
    for x in grid:
        delta = Fraction(0) if model is Model.IDEAL else x
        exact = encoded_failure_at(chain, x, delta, initial)
        row = {
            "eps": float(x),
            "encoded_failure_exact": float(exact),
        }
        if args.trials:
            numeric = (
                ModelParams.ideal(x)
                if model is Model.IDEAL
                else ModelParams.lossy(x, delta)
            )
            est = simulate(numeric, args.trials, seed=args.seed, config=config)
            row["mc_mean"] = est.mean
            row["mc_stderr"] = est.stderr
        else:
            row["mc_mean"] = None
            row["mc_stderr"] = None
        rows.append(row)
    return {"model": model.value, "rows": rows}


def cmd_mc(args, config: FaultModel) -> dict:
    eps = _parse_fraction(args.eps)
    delta = _parse_fraction(args.delta) if args.delta else None
    model = Model(args.model)
    if model is Model.IDEAL:
        numeric = ModelParams.ideal(eps)
        symbolic = ModelParams.ideal()
        d = Fraction(0)
    else:
        d = delta if delta is not None else eps
        numeric = ModelParams.lossy(eps, d)
        symbolic = ModelParams.lossy()
    est = simulate(numeric, args.trials, seed=args.seed, config=config)
    chain = build_chain(symbolic, config=config)
    exact = encoded_failure_at(chain, eps, d)
    report = compare(exact, est)
    return {
        "model": model.value,
        "eps": float(eps),
        "delta": float(d),
        "trials": args.trials,
        "seed": args.seed,
        "mean": est.mean,
        "stderr": est.stderr,
        "z_vs_exact": report.z,
        "exact": float(exact),
        "passed": report.passed,
    }


def cmd_concat(args, config: FaultModel) -> dict:
    eps0 = _parse_fraction(args.eps0)
    if args.levels > 10:
        raise CliError("levels must be <= 10")
    if args.model == "measurement":
        recursion = measurement_recursion
    else:
        recursion = chain_recursion(args.model, config=config)
    rates = concat_projection(recursion, eps0, args.levels)
    return {
        "model": args.model,
        "eps0": float(eps0),
        "levels": [
            {"level": k + 1, "rate": float(r)} for k, r in enumerate(rates)
        ],
    }


# ----------------------------------------------------------------------
# CSV rendering
# ----------------------------------------------------------------------

def _csv_sweep(payload: dict, manifest: dict) -> str:
    lines = [f"# manifest: {json.dumps(manifest, sort_keys=True)}"]
    lines.append("eps,encoded_failure_exact,mc_mean,mc_stderr")
    for row in payload["rows"]:
        mc_mean = "" if row["mc_mean"] is None else repr(row["mc_mean"])
        mc_stderr = "" if row["mc_stderr"] is None else repr(row["mc_stderr"])
        lines.append(
            f"{row['eps']!r},{row['encoded_failure_exact']!r},{mc_mean},{mc_stderr}"
        )
    return "\n".join(lines) + "\n"


def _csv_mc(payload: dict, manifest: dict) -> str:
    lines = [f"# manifest: {json.dumps(manifest, sort_keys=True)}"]
    lines.append("eps,delta,trials,mean,stderr,z_vs_exact")
    lines.append(
        f"{payload['eps']!r},{payload['delta']!r},{payload['trials']},"
        f"{payload['mean']!r},{payload['stderr']!r},{payload['z_vs_exact']!r}"
    )
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasurechain",
        description="Exact thresholds and Monte Carlo checks for erasure "
        "noise on the [[7,1,3]] code",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--circuit-config", dest="circuit_config", default=None,
                       help="JSON file overriding fault-location counts")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("classify", help="classify a 7-character pattern")
    p.add_argument("pattern", help="e.g. '..M..E.' with . M Z E")
    add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("classes", help="equivalence-class table")
    p.add_argument("--model", choices=("ideal", "lossy"), required=True)
    add_common(p)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("chain", help="export the symbolic transition matrix")
    p.add_argument("--model", choices=("ideal", "lossy"), required=True)
    add_common(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("series", help="encoded failure series in eps")
    p.add_argument("--model", choices=("ideal", "lossy"), required=True)
    p.add_argument("--order", type=int, default=6)
    add_common(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("threshold", help="solve a break-even condition")
    p.add_argument("--model", choices=("ideal", "lossy", "measurement"), required=True)
    p.add_argument("--tol", default="1/1000000")
    p.add_argument("--bracket", default=None, help="lo,hi as rationals")
    p.add_argument(
        "--fixture",
        choices=("full-chain", "ideal-ref", "lossy-ref"),
        default="full-chain",
        help="recursion source: the exact chain or a reference polynomial",
    )
    add_common(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="encoded failure over an eps grid")
    p.add_argument("--model", choices=("ideal", "lossy"), required=True)
    p.add_argument("--grid", required=True, help="comma list or lo:hi:step")
    p.add_argument("--trials", type=int, default=0, help="MC overlay trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None, help="write CSV/JSON to a file")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc", help="Monte Carlo estimate vs the exact chain")
    p.add_argument("--model", choices=("ideal", "lossy"), required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--delta", default=None)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("concat", help="per-level rates under concatenation")
    p.add_argument("--model", choices=("ideal", "lossy", "measurement"), required=True)
    p.add_argument("--eps0", required=True)
    p.add_argument("--levels", type=int, default=3)
    add_common(p)
    p.set_defaults(func=cmd_concat)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(getattr(args, "circuit_config", None))
        payload = args.func(args, config)
        manifest = _manifest(args, config)
        fmt = getattr(args, "format", "json")
        if fmt == "csv":
            if args.command == "sweep":
                text = _csv_sweep(payload, manifest)
            elif args.command == "mc":
                text = _csv_mc(payload, manifest)
            else:
                raise CliError(f"csv output is not defined for {args.command!r}")
        else:
            payload["manifest"] = manifest
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"

        output = getattr(args, "output", None)
        if output:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    except CliError as exc:
        message = str(exc)
        try:
            err = json.loads(message)
        except json.JSONDecodeError:
            err = {"error": message}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(json.dumps({"error": str(exc)}, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
