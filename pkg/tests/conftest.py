import sys

import pytest

from folnar.engine import EngineConfig

GOLDEN_PREMISES = [
    "fact1: values_creativity(Jasiah)",
    "rule1: ∀x(loves_drawings(x) ∧ values_creativity(x) → artistic(x))",
    "fact2: loves_drawings(Jones)",
    "fact3: loves_drawings(Jasiah)",
]
GOLDEN_CONCLUSION = "¬innovative(Jasiah)"
GOLDEN_NARSESE = [
    "<{Jasiah} --> values_creativity>.",
    "<<($1 --> loves_drawings) && ($1 --> values_creativity)> ==> <$1 --> artistic>>.",
    "<{Jones} --> loves_drawings>.",
    "<{Jasiah} --> loves_drawings>.",
    "(-- <{Jasiah} --> innovative>)?",
]
GOLDEN_RECORD = {
    "id": "golden-1",
    "difficulty": "easy",
    "steps": 1,
    "context_nl": "Jasiah values creativity. Anyone who loves drawings and values creativity is artistic. "
    "Jones loves drawings. Jasiah loves drawings.",
    "claim_nl": "Jasiah is not innovative.",
    "fol_premises": GOLDEN_PREMISES,
    "fol_conclusion": GOLDEN_CONCLUSION,
    "gold_label": "Uncertain",
    "narsese_program": GOLDEN_NARSESE[:-1],
    "narsese_query": GOLDEN_NARSESE[-1],
}


def mock_engine_config(*extra, **kw) -> EngineConfig:
    """Config that runs the bundled stand-in engine as a real child process."""
    return EngineConfig(executable_path=sys.executable, args=("-m", "folnar.mock_engine", *extra), **kw)


_results = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    ok = call.excinfo is None
    prev = _results.get(number, (title, True))
    _results[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, ok = _results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
    terminalreporter.write_line("criterion 8: N/A   no quantitative model results to reproduce")
