"""Command line entry point: ``folnar {compile,run,validate,oracle,stats,score,export}``.

Exit codes: 0 ok, 2 FOL parse error (and usage errors), 3 unsupported
pattern, 4 engine unavailable, 5 dataset schema error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shutil
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from . import dataset
from .compiler import CompileUnit, UnsupportedPattern, compile_unit
from .dataset import SchemaError, UnknownId
from .engine import ENGINE_ENV, EngineConfig
from .fol import FolError, parse_fol
from .oracle import OracleError, agreement_check

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_ENGINE, EXIT_SCHEMA = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _num(x):
    return round(x, 6) if isinstance(x, float) else x


def emit(rows: list[dict], fmt: str, out=None) -> None:
    """Print rows as an aligned table or as JSON Lines, with identical values."""
    out = out or sys.stdout
    rows = [{k: _num(v) for k, v in r.items()} for r in rows]
    if fmt == "json-lines":
        for r in rows:
            out.write(json.dumps(r, ensure_ascii=False) + "\n")
        return
    if not rows:
        return
    cols = list(rows[0])
    cells = [["" if r.get(c) is None else str(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


# --------------------------------------------------------------------------
# Inputs


def _read_formulas(args) -> list[str]:
    formulas = list(args.formulas or [])
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            formulas += [ln for ln in fh.read().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    return formulas


def _unit_from_args(args) -> CompileUnit:
    formulas = _read_formulas(args)
    if args.query is not None:
        premises, conclusion = formulas, args.query
    elif formulas:
        premises, conclusion = formulas[:-1], formulas[-1]
    else:
        raise CliError("no formulas given", EXIT_PARSE)
    parsed = []
    for i, text in enumerate(premises):
        try:
            parsed.append(parse_fol(text))
        except FolError as exc:
            raise CliError(f"premise {i}: {exc} (offset {exc.offset} in {text!r})", EXIT_PARSE) from None
    try:
        goal = parse_fol(conclusion)
    except FolError as exc:
        raise CliError(f"conclusion: {exc} (offset {exc.offset} in {conclusion!r})", EXIT_PARSE) from None
    return CompileUnit(tuple(parsed), goal)


def _load(path: str) -> list[dataset.BenchmarkInstance]:
    try:
        return dataset.load(path)
    except SchemaError as exc:
        raise CliError(f"{path}: {exc}", EXIT_SCHEMA) from None
    except OSError as exc:
        raise CliError(str(exc), EXIT_SCHEMA) from None


def _engine_config(args) -> EngineConfig:
    path = args.engine or os.environ.get(ENGINE_ENV)
    extra = tuple(args.engine_arg) if args.engine_arg else ("shell",)
    try:
        return EngineConfig(
            executable_path=path,
            args=extra,
            pre_query_cycles=args.cycles,
            post_query_cycles=args.post_cycles,
            timeout=args.timeout,
            true_threshold=args.true_threshold,
            false_threshold=args.false_threshold,
        )
    except ValueError as exc:
        raise CliError(f"bad engine configuration: {exc}", EXIT_PARSE) from None


def _check_engine(cfg: EngineConfig) -> None:
    path = cfg.executable_path
    if not path:
        raise CliError(f"engine mode needs --engine or ${ENGINE_ENV}", EXIT_ENGINE)
    if shutil.which(path) is None:
        raise CliError(f"engine executable not found: {path}", EXIT_ENGINE)


def _mode_config(args) -> Optional[EngineConfig]:
    if args.mode != "engine":
        return None
    cfg = _engine_config(args)
    _check_engine(cfg)
    return cfg


# --------------------------------------------------------------------------
# Subcommands


def cmd_compile(args) -> int:
    unit = _unit_from_args(args)
    try:
        report = compile_unit(unit)
    except UnsupportedPattern as exc:
        where = f" at offset {exc.offset}" if exc.offset is not None else ""
        raise CliError(f"unsupported{where}: {exc}", EXIT_UNSUPPORTED) from None
    text = report.program.text()
    if args.report:
        text += f"// fallback_used: {str(report.fallback_used).lower()}\n"
        if report.fallback_used:
            text += f"// fallback_subformula: {report.fallback_subformula}\n"
        for premise, lines in report.source_map:
            text += f"// premise {premise} -> lines {','.join(map(str, lines))}\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_run(args) -> int:
    instances = _load(args.instances)
    cfg = _mode_config(args)
    outcomes = dataset.validate(instances, args.mode, cfg, jobs=args.jobs)
    rows = []
    for o in outcomes:
        v = o.verdict
        rows.append({
            "id": o.id,
            "label": o.executed_label.value if o.executed_label else None,
            "frequency": v.frequency if v else None,
            "error": o.error,
        })
    emit(rows, args.format)
    return EXIT_OK


def cmd_validate(args) -> int:
    instances = _load(args.instances)
    cfg = _mode_config(args)
    outcomes = dataset.validate(instances, args.mode, cfg, jobs=args.jobs)
    rows = [
        {
            "id": o.id,
            "gold": o.gold_label.value,
            "executed": o.executed_label.value if o.executed_label else None,
            "retained": o.retained,
            "error": o.error,
        }
        for o in outcomes
    ]
    emit(rows, args.format)
    kept = {o.id for o in outcomes if o.retained}
    if args.format == "table":
        print(f"retained {len(kept)}/{len(outcomes)}")
    if args.output:
        dataset.save([i for i in instances if i.id in kept], args.output)
    return EXIT_OK


def _oracle_row(ident: str, unit: CompileUnit) -> dict:
    row = {"id": ident, "models": None, "chase": None, "agreement": None, "error": None}
    try:
        result = agreement_check(unit)
    except (OracleError, UnsupportedPattern) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row.update(
        models=result.models_label.value if result.models_label else "contradictory",
        chase=result.chase_label.value if result.chase_label else "contradictory",
        agreement=result.kind.value,
    )
    if result.details:
        row["error"] = "; ".join(result.details)
    return row


def cmd_oracle(args) -> int:
    if args.instances:
        instances = _load(args.instances)
        units = []
        for inst in sorted(instances, key=lambda i: i.id):
            try:
                units.append((inst.id, inst.unit()))
            except FolError as exc:
                units.append((inst.id, exc))

        def one(item):
            ident, unit = item
            if isinstance(unit, FolError):
                return {"id": ident, "models": None, "chase": None, "agreement": None, "error": f"{type(unit).__name__}: {unit}"}
            return _oracle_row(ident, unit)

        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            rows = list(pool.map(one, units))
    else:
        unit = _unit_from_args(args)
        try:
            compile_unit(unit)
        except UnsupportedPattern as exc:
            raise CliError(f"unsupported: {exc}", EXIT_UNSUPPORTED) from None
        rows = [_oracle_row("-", unit)]
    emit(rows, args.format)
    return EXIT_OK


def cmd_stats(args) -> int:
    st = dataset.stats(_load(args.instances))
    rows = [
        {"split": name, "easy": e, "medium": m, "hard": h, "total": t}
        for name, e, m, h, t in st.rows()
    ]
    emit(rows, args.format)
    return EXIT_OK


def cmd_score(args) -> int:
    instances = _load(args.instances)
    try:
        preds, flags = dataset.load_predictions(args.predictions)
        report = dataset.score(preds, instances, flags)
    except SchemaError as exc:
        raise CliError(f"{args.predictions}: {exc}", EXIT_SCHEMA) from None
    except UnknownId as exc:
        raise CliError(str(exc.args[0]), EXIT_SCHEMA) from None
    if args.format == "json-lines":
        print(json.dumps({k: _num(v) if not isinstance(v, dict) else {a: _num(b) for a, b in v.items()} for k, v in report.as_dict().items()}))
        return EXIT_OK
    metrics = [
        {"metric": "overall_accuracy", "value": report.overall_accuracy},
        *({"metric": f"accuracy_{d}", "value": v} for d, v in report.accuracy_by_difficulty.items()),
        *({"metric": f"f1_{k.value}", "value": v} for k, v in report.per_class_f1.items()),
        {"metric": "macro_f1", "value": report.macro_f1},
        {"metric": "execution_success_rate", "value": report.execution_success_rate},
    ]
    emit(metrics, "table")
    print()
    labels = [lab.value for lab in dataset.ORDER]
    emit([{"gold \\ predicted": g, **dict(zip(labels, row))} for g, row in zip(labels, report.confusion)], "table")
    if report.missing:
        print(f"\n{len(report.missing)} instance(s) without a prediction scored as Uncertain")
    return EXIT_OK


def cmd_export(args) -> int:
    dataset.export_classification(_load(args.instances), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=dataset.MODES, default="engine")
    g = p.add_argument_group("engine")
    g.add_argument("--engine", metavar="PATH", help=f"engine executable (default ${ENGINE_ENV})")
    g.add_argument("--engine-arg", action="append", metavar="ARG", help="argument passed to the engine (repeatable; default: shell)")
    g.add_argument("--cycles", type=int, default=20, help="cycles before the query")
    g.add_argument("--post-cycles", type=int, default=20, help="cycles after the query")
    g.add_argument("--timeout", type=int, default=10_000, help="per-instance timeout in ms")
    g.add_argument("--true-threshold", type=float, default=0.50)
    g.add_argument("--false-threshold", type=float, default=0.05)
    p.add_argument("--jobs", type=int, default=1)


_ENGINE_ONLY = ("engine", "engine_arg")
_ENGINE_DEFAULTS = {"cycles": 20, "post_cycles": 20, "timeout": 10_000, "true_threshold": 0.50, "false_threshold": 0.05}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="folnar", description="FOL to Narsese compiler and benchmark harness")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def formats(p):
        p.add_argument("--format", choices=("table", "json-lines"), default="table")

    p = sub.add_parser("compile", help="compile FOL premises and a conclusion to Narsese")
    p.add_argument("formulas", nargs="*", help="FOL formulas; the last is the conclusion unless --query is given")
    p.add_argument("-f", "--file", help="file with one FOL formula per line")
    p.add_argument("--query", help="conclusion formula")
    p.add_argument("--report", action="store_true", help="append fallback and source map as // comments")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="execute every instance and print its label")
    p.add_argument("instances")
    _add_engine_flags(p)
    formats(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="keep instances whose executed label matches gold")
    p.add_argument("instances")
    p.add_argument("-o", "--output", help="write retained instances here")
    _add_engine_flags(p)
    formats(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("oracle", help="label units with both reference oracles")
    p.add_argument("formulas", nargs="*")
    p.add_argument("-i", "--instances", help="instance file instead of inline formulas")
    p.add_argument("-f", "--file")
    p.add_argument("--query")
    p.add_argument("--jobs", type=int, default=1)
    formats(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", help="count instances per split and difficulty")
    p.add_argument("instances")
    formats(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("score", help="score predictions against gold labels")
    p.add_argument("instances")
    p.add_argument("--predictions", required=True, help='JSON Lines of {"id", "label", "executed"}')
    formats(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("export", help="write A/B/C classification records")
    p.add_argument("instances")
    p.add_argument("output")
    p.set_defaults(func=cmd_export)
    return parser


def _check_conflicts(parser: argparse.ArgumentParser, args) -> None:
    if getattr(args, "mode", "engine") != "engine":
        used = [f"--{n.replace('_', '-')}" for n in _ENGINE_ONLY if getattr(args, n, None)]
        used += [f"--{n.replace('_', '-')}" for n, d in _ENGINE_DEFAULTS.items() if getattr(args, n, d) != d]
        if used:
            parser.error(f"{', '.join(used)} only apply to --mode engine")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    if args.command == "oracle" and args.instances and (args.formulas or args.file or args.query):
        parser.error("give either --instances or inline formulas, not both")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_conflicts(parser, args)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"folnar: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
