"""Benchmark records: JSON Lines I/O, split statistics, validation and scoring."""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from . import engine, oracle
from .compiler import CompileError, CompileReport, CompileUnit, compile_unit
from .engine import EngineConfig, EngineError, EngineVerdict
from .fol import FolError, parse_fol
from .labels import ORDER, Label
from .narsese import NarseseSyntaxError, Punctuation, parse_narsese

DIFFICULTIES = ("easy", "medium", "hard")
STEP_BANDS = {"easy": range(1, 3), "medium": range(3, 6), "hard": range(6, 10)}
MODES = ("engine", "chase", "models")

FIELDS = (
    "id",
    "split",
    "difficulty",
    "steps",
    "context_nl",
    "claim_nl",
    "fol_premises",
    "fol_conclusion",
    "gold_label",
    "narsese_program",
    "narsese_query",
)
_OPTIONAL = {"split", "narsese_program", "narsese_query"}


class SchemaError(ValueError):
    def __init__(self, line: int, field_name: Optional[str], reason: str):
        where = f"line {line}" + (f", field {field_name!r}" if field_name else "")
        super().__init__(f"{where}: {reason}")
        self.line = line
        self.field = field_name
        self.reason = reason


class UnknownId(KeyError):
    pass


@dataclass
class BenchmarkInstance:
    id: str
    difficulty: str
    steps: int
    context_nl: str
    claim_nl: str
    fol_premises: list[str]
    fol_conclusion: str
    gold_label: Label
    narsese_program: Optional[list[str]] = None
    narsese_query: Optional[str] = None
    split: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def unit(self) -> CompileUnit:
        return CompileUnit.from_text(self.fol_premises, self.fol_conclusion)

    def to_record(self) -> dict[str, Any]:
        record = {}
        for name in FIELDS:
            value = getattr(self, name)
            if name in _OPTIONAL and value is None:
                continue
            record[name] = value.value if isinstance(value, Label) else value
        record.update(self.extra)
        return record

    @classmethod
    def from_record(cls, record: Mapping[str, Any], line: int = 0) -> "BenchmarkInstance":
        def need(name, kind):
            if name not in record:
                raise SchemaError(line, name, "missing")
            value = record[name]
            if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
                raise SchemaError(line, name, f"expected {kind.__name__}, got {type(value).__name__}")
            return value

        if not isinstance(record, Mapping):
            raise SchemaError(line, None, "record is not a JSON object")
        ident = need("id", str)
        if not ident:
            raise SchemaError(line, "id", "empty")
        difficulty = need("difficulty", str)
        if difficulty not in STEP_BANDS:
            raise SchemaError(line, "difficulty", f"must be one of {', '.join(DIFFICULTIES)}")
        steps = need("steps", int)
        if steps < 1:
            raise SchemaError(line, "steps", "must be positive")
        if steps not in STEP_BANDS[difficulty]:
            band = STEP_BANDS[difficulty]
            raise SchemaError(line, "steps", f"{steps} steps is outside the {difficulty} band {band.start}-{band.stop - 1}")
        premises = need("fol_premises", list)
        if not all(isinstance(p, str) for p in premises):
            raise SchemaError(line, "fol_premises", "every premise must be a string")
        try:
            gold = Label.parse(need("gold_label", str))
        except ValueError as exc:
            raise SchemaError(line, "gold_label", str(exc)) from None

        program = record.get("narsese_program")
        if program is not None:
            if not isinstance(program, list) or not all(isinstance(s, str) for s in program):
                raise SchemaError(line, "narsese_program", "expected a list of strings")
            for k, text in enumerate(program):
                try:
                    parse_narsese(text)
                except NarseseSyntaxError as exc:
                    raise SchemaError(line, "narsese_program", f"line {k}: {exc}") from None
        query = record.get("narsese_query")
        if query is not None:
            if not isinstance(query, str):
                raise SchemaError(line, "narsese_query", "expected a string")
            try:
                if parse_narsese(query).punctuation is not Punctuation.QUESTION:
                    raise SchemaError(line, "narsese_query", "query must end with '?'")
            except NarseseSyntaxError as exc:
                raise SchemaError(line, "narsese_query", str(exc)) from None
        split = record.get("split")
        if split is not None and not isinstance(split, str):
            raise SchemaError(line, "split", "expected a string")

        return cls(
            id=ident,
            difficulty=difficulty,
            steps=steps,
            context_nl=need("context_nl", str),
            claim_nl=need("claim_nl", str),
            fol_premises=list(premises),
            fol_conclusion=need("fol_conclusion", str),
            gold_label=gold,
            narsese_program=program,
            narsese_query=query,
            split=split,
            extra={k: v for k, v in record.items() if k not in FIELDS},
        )


def load(path: str | Path) -> list[BenchmarkInstance]:
    instances = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(n, None, f"invalid JSON: {exc.msg}") from None
            inst = BenchmarkInstance.from_record(record, n)
            if inst.id in seen:
                raise SchemaError(n, "id", f"duplicate id {inst.id!r}")
            seen.add(inst.id)
            instances.append(inst)
    return instances


def dumps(instances: Iterable[BenchmarkInstance]) -> str:
    return "".join(json.dumps(i.to_record(), ensure_ascii=False) + "\n" for i in instances)


def save(instances: Iterable[BenchmarkInstance], path: str | Path) -> None:
    Path(path).write_text(dumps(instances), encoding="utf-8")


# --------------------------------------------------------------------------
# Statistics


@dataclass
class SplitStats:
    counts: dict[str, dict[str, int]]

    @property
    def totals(self) -> dict[str, int]:
        return {d: sum(row[d] for row in self.counts.values()) for d in DIFFICULTIES}

    @property
    def total(self) -> int:
        return sum(self.totals.values())

    def rows(self) -> list[tuple[str, int, int, int, int]]:
        out = [(name, *(row[d] for d in DIFFICULTIES), sum(row.values())) for name, row in self.counts.items()]
        totals = self.totals
        out.append(("Total", *(totals[d] for d in DIFFICULTIES), self.total))
        return out


def stats(instances: Iterable[BenchmarkInstance]) -> SplitStats:
    counts: dict[str, dict[str, int]] = {}
    for inst in instances:
        name = (inst.split or "all").capitalize()
        row = counts.setdefault(name, dict.fromkeys(DIFFICULTIES, 0))
        row[inst.difficulty] += 1
    return SplitStats(counts)


# --------------------------------------------------------------------------
# Validation


@dataclass
class ValidationOutcome:
    id: str
    gold_label: Label
    executed_label: Optional[Label]
    retained: bool
    mode: str
    verdict: Optional[EngineVerdict] = None
    report: Optional[CompileReport] = None
    error: Optional[str] = None

    @property
    def executed(self) -> bool:
        """The pipeline produced a verdict (whatever its label)."""
        return self.executed_label is not None


def execute_instance(inst: BenchmarkInstance, mode: str, cfg: Optional[EngineConfig] = None) -> ValidationOutcome:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    report = None
    try:
        unit = inst.unit()
        report = compile_unit(unit)
        verdict = None
        if mode == "engine":
            cfg = cfg or EngineConfig()
            verdict = engine.execute(report.program, cfg)
            label = engine.map_label(verdict, cfg)
        elif mode == "chase":
            label = oracle.chase_compiled(report.program, unit.constants())
        else:
            label = oracle.entail_models(unit)
    except (FolError, CompileError, oracle.OracleError, EngineError) as exc:
        return ValidationOutcome(inst.id, inst.gold_label, None, False, mode, report=report, error=f"{type(exc).__name__}: {exc}")
    return ValidationOutcome(inst.id, inst.gold_label, label, label is inst.gold_label, mode, verdict, report)


def validate(
    instances: Sequence[BenchmarkInstance],
    mode: str,
    cfg: Optional[EngineConfig] = None,
    jobs: int = 1,
) -> list[ValidationOutcome]:
    """Compile and execute every instance; keep it iff the executed label matches gold.

    Failures are recorded per instance. Outcomes are ordered by id.
    """
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda i: execute_instance(i, mode, cfg), instances))
    else:
        outcomes = [execute_instance(i, mode, cfg) for i in instances]
    return sorted(outcomes, key=lambda o: o.id)


# --------------------------------------------------------------------------
# Scoring


@dataclass
class ScoreReport:
    overall_accuracy: float
    accuracy_by_difficulty: dict[str, float]
    macro_f1: float
    per_class_f1: dict[Label, float]
    confusion: list[list[int]]  # rows gold, columns predicted, both in ORDER
    execution_success_rate: float
    missing: list[str] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        return {
            "overall_accuracy": self.overall_accuracy,
            "accuracy_by_difficulty": self.accuracy_by_difficulty,
            "macro_f1": self.macro_f1,
            "per_class_f1": {k.value: v for k, v in self.per_class_f1.items()},
            "confusion": self.confusion,
            "labels": [lab.value for lab in ORDER],
            "execution_success_rate": self.execution_success_rate,
            "missing": self.missing,
        }


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def score(
    predictions: Mapping[str, Label],
    gold: Sequence[BenchmarkInstance],
    exec_flags: Optional[Mapping[str, bool]] = None,
) -> ScoreReport:
    """Accuracy, macro-F1 over the three labels, confusion and execution rate.

    Missing predictions count as Uncertain and are listed in ``missing``.
    Missing execution flags count as failures.
    """
    ids = {inst.id for inst in gold}
    unknown = sorted(set(predictions) - ids)
    if unknown:
        raise UnknownId(f"predictions for unknown ids: {', '.join(unknown)}")
    exec_flags = exec_flags or {}
    index = {lab: k for k, lab in enumerate(ORDER)}
    confusion = [[0, 0, 0] for _ in ORDER]
    correct_by = Counter()
    count_by = Counter()
    missing = []
    executed = 0
    for inst in gold:
        if inst.id not in predictions:
            missing.append(inst.id)
        pred = Label(predictions.get(inst.id, Label.UNCERTAIN))
        confusion[index[inst.gold_label]][index[pred]] += 1
        count_by[inst.difficulty] += 1
        correct_by[inst.difficulty] += pred is inst.gold_label
        executed += bool(exec_flags.get(inst.id, False))

    per_class = {}
    for lab, k in index.items():
        tp = confusion[k][k]
        precision = _ratio(tp, sum(row[k] for row in confusion))
        recall = _ratio(tp, sum(confusion[k]))
        per_class[lab] = _ratio(2 * precision * recall, precision + recall)
    n = len(gold)
    return ScoreReport(
        overall_accuracy=_ratio(sum(confusion[k][k] for k in range(3)), n),
        accuracy_by_difficulty={d: _ratio(correct_by[d], count_by[d]) for d in DIFFICULTIES},
        macro_f1=sum(per_class.values()) / len(per_class),
        per_class_f1=per_class,
        confusion=confusion,
        execution_success_rate=_ratio(executed, n),
        missing=missing,
    )


def load_predictions(path: str | Path) -> tuple[dict[str, Label], dict[str, bool]]:
    """Read ``{"id", "label", "executed"?}`` JSON Lines; ``executed`` defaults to true."""
    preds, flags = {}, {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                preds[record["id"]] = Label.parse(record["label"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SchemaError(n, None, f"bad prediction record: {exc}") from None
            flags[record["id"]] = bool(record.get("executed", True))
    return preds, flags


def export_classification(instances: Iterable[BenchmarkInstance], path: str | Path) -> None:
    """Write ``context_nl``/``claim_nl`` with letter labels A/B/C for classifier training."""
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            record = {"id": inst.id, "context_nl": inst.context_nl, "claim_nl": inst.claim_nl, "label": inst.gold_label.letter}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
