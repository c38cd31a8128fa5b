"""Run compiled programs in an external NARS engine over its stdin/stdout shell.

Protocol per program, one fresh process each:

    <judgment 1>
    ...
    20                 (cycle command: run N inference cycles)
    <query>?
    20
    <EOF>

Output is read until the process exits or the timeout expires. Lines of the
form ``Answer: <stmt>. ... Truth: frequency=F, confidence=C`` carry answers;
``Answer: None.`` means the engine had nothing to say.
"""

from __future__ import annotations

import enum
import logging
import os
import re
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .labels import Label
from .narsese import NarseseProgram

log = logging.getLogger(__name__)

ENGINE_ENV = "NARS_ENGINE_PATH"


class EngineError(Exception):
    pass


class EngineSpawnError(EngineError):
    pass


class EngineProtocolError(EngineError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    executable_path: Optional[str] = None
    args: tuple[str, ...] = ("shell",)
    pre_query_cycles: int = 20
    post_query_cycles: int = 20
    timeout: int = 10_000  # ms
    true_threshold: float = 0.50
    false_threshold: float = 0.05

    def __post_init__(self):
        if self.pre_query_cycles < 1 or self.post_query_cycles < 1:
            raise ValueError("cycle counts must be positive")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not (0.0 <= self.false_threshold < self.true_threshold <= 1.0):
            raise ValueError("need 0 <= false_threshold < true_threshold <= 1")

    def resolved_path(self) -> str:
        path = self.executable_path or os.environ.get(ENGINE_ENV)
        if not path:
            raise EngineSpawnError(f"no engine executable given and ${ENGINE_ENV} is unset")
        return path


@dataclass
class EngineVerdict:
    answered: bool
    frequency: Optional[float] = None
    confidence: Optional[float] = None
    raw_lines: list[str] = field(default_factory=list)
    wall_time: float = 0.0  # ms
    timed_out: bool = False
    answer_line: Optional[str] = None


# --------------------------------------------------------------------------
# Protocol


def protocol_lines(program: NarseseProgram, cfg: EngineConfig) -> list[str]:
    lines = program.lines()
    return lines[:-1] + [str(cfg.pre_query_cycles), lines[-1], str(cfg.post_query_cycles)]


_ANSWER = re.compile(r"^\s*Answer:\s*(?P<rest>.*)$")
_TRUTH = re.compile(r"Truth:\s*frequency=(?P<f>[^\s,]+)\s*,?\s*confidence=(?P<c>[^\s,]+)")
_NONE = re.compile(r"^None\.?\s*$")


def parse_answers(lines: Sequence[str]) -> list[tuple[float, float, str]]:
    """Extract ``(frequency, confidence, line)`` for every answer line."""
    answers = []
    for line in lines:
        m = _ANSWER.match(line)
        if not m:
            continue
        rest = m.group("rest")
        if _NONE.match(rest):
            continue
        truth = _TRUTH.search(rest)
        if truth is None:
            raise EngineProtocolError(f"answer without truth annotation: {line!r}")
        try:
            f, c = float(truth.group("f")), float(truth.group("c"))
        except ValueError:
            raise EngineProtocolError(f"unparseable truth annotation: {line!r}") from None
        if not (0.0 <= f <= 1.0 and 0.0 <= c <= 1.0):
            raise EngineProtocolError(f"truth values out of range: {line!r}")
        answers.append((f, c, line))
    return answers


def verdict_from_output(lines: Sequence[str], wall_time: float = 0.0, timed_out: bool = False) -> EngineVerdict:
    answers = parse_answers(lines)
    verdict = EngineVerdict(False, raw_lines=list(lines), wall_time=wall_time, timed_out=timed_out)
    if not answers:
        return verdict
    best = answers[0]
    for ans in answers[1:]:
        if ans[1] >= best[1]:  # ties go to the later line
            best = ans
    verdict.answered = True
    verdict.frequency, verdict.confidence, verdict.answer_line = best
    return verdict


def map_label(v: EngineVerdict, cfg: EngineConfig = EngineConfig()) -> Label:
    if not v.answered or v.frequency is None:
        return Label.UNCERTAIN
    if v.frequency >= cfg.true_threshold:
        return Label.TRUE
    if v.frequency <= cfg.false_threshold:
        return Label.FALSE
    return Label.UNCERTAIN


# --------------------------------------------------------------------------
# Sessions


class SessionState(enum.Enum):
    IDLE = "idle"
    RUNNING = "running"
    CLOSED = "closed"


class EngineSession:
    """One engine process, used for exactly one program."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.lines_sent = 0
        self.state = SessionState.IDLE
        self._output: list[str] = []
        path = cfg.resolved_path()
        try:
            self.proc = subprocess.Popen(
                [path, *cfg.args],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            self.state = SessionState.CLOSED
            raise EngineSpawnError(f"cannot start engine {path!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self):
        for line in self.proc.stdout:
            self._output.append(line.rstrip("\r\n"))

    def run(self, program: NarseseProgram) -> EngineVerdict:
        if self.state is not SessionState.IDLE:
            raise EngineError(f"session is {self.state.value}; sessions are single-use")
        self.state = SessionState.RUNNING
        started = time.monotonic()
        deadline = started + self.cfg.timeout / 1000
        timed_out = False
        try:
            for line in protocol_lines(program, self.cfg):
                self.proc.stdin.write(line + "\n")
                self.lines_sent += 1
            self.proc.stdin.flush()
            self.proc.stdin.close()
        except (BrokenPipeError, OSError) as exc:
            log.warning("engine closed its input early: %s", exc)
        try:
            self.proc.wait(timeout=max(0.0, deadline - time.monotonic()))
        except subprocess.TimeoutExpired:
            timed_out = True
            self.proc.kill()
            self.proc.wait()
        self._reader.join(timeout=1.0)
        self.close()
        wall = (time.monotonic() - started) * 1000
        lines = list(self._output)
        if timed_out:
            return EngineVerdict(False, raw_lines=lines, wall_time=wall, timed_out=True)
        return verdict_from_output(lines, wall)

    def close(self):
        if self.state is SessionState.CLOSED:
            return
        if self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait()
        self.state = SessionState.CLOSED


def execute(program: NarseseProgram, cfg: EngineConfig = EngineConfig()) -> EngineVerdict:
    """Run ``program`` in a fresh engine process and extract its answer."""
    session = EngineSession(cfg)
    try:
        return session.run(program)
    finally:
        session.close()


def execute_with_mock(program: NarseseProgram, script: Sequence[str], cfg: EngineConfig = EngineConfig()) -> EngineVerdict:
    """Same answer extraction as :func:`execute`, fed from a fixed transcript."""
    protocol_lines(program, cfg)  # program must be well formed for the protocol
    return verdict_from_output(list(script))
