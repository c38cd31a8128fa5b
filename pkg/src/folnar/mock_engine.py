"""A boolean stand-in for a NARS shell, for running the pipeline without ONA.

Reads Narsese lines on stdin. Judgments are remembered, numeric lines are
accepted as cycle commands, and each question is answered from a forward
chase of the judgments seen so far::

    Answer: <{a} --> p>. Truth: frequency=1.000000, confidence=0.900000

or ``Answer: None.`` when the chase is undecided. With ``--script FILE`` the
engine ignores its input and prints FILE instead.

    python -m folnar.mock_engine [shell] [--script F] [--transcript F] [--sleep S]
"""

from __future__ import annotations

import argparse
import sys
import time

from .labels import Label
from .narsese import NarseseProgram, Punctuation, parse_narsese, serialize
from .oracle import Chase, OracleError, program_constants


def answer(judgments, question) -> str:
    program = NarseseProgram(tuple(judgments), question)
    try:
        chase = Chase([s.statement for s in judgments], program_constants(program))
        label = chase.label(question.statement)
    except OracleError:
        return "Answer: None."
    if label is Label.UNCERTAIN:
        return "Answer: None."
    freq = 1.0 if label is Label.TRUE else 0.0
    return f"Answer: {serialize(question.statement)}. Truth: frequency={freq:.6f}, confidence=0.900000"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("mode", nargs="?", default="shell")
    ap.add_argument("--script", help="print this transcript instead of reasoning")
    ap.add_argument("--transcript", help="append every received line to this file")
    ap.add_argument("--sleep", type=float, default=0.0, help="stall this long before exiting")
    args = ap.parse_args(argv)

    received = []
    judgments = []
    for raw in sys.stdin:
        line = raw.rstrip("\n")
        received.append(line)
        if args.script or not line.strip() or line.strip().isdigit():
            continue
        try:
            sentence = parse_narsese(line)
        except ValueError as exc:
            print(f"Parsing error: {exc}", flush=True)
            continue
        print(f"Input: {line}", flush=True)
        if sentence.punctuation is Punctuation.QUESTION:
            print(answer(judgments, sentence), flush=True)
        else:
            judgments.append(sentence)

    if args.transcript:
        with open(args.transcript, "a", encoding="utf-8") as fh:
            fh.writelines(line + "\n" for line in received)
    if args.script:
        with open(args.script, encoding="utf-8") as fh:
            sys.stdout.write(fh.read())
        sys.stdout.flush()
    if args.sleep:
        time.sleep(args.sleep)
    return 0


if __name__ == "__main__":
    sys.exit(main())
