"""Deterministic toy corpus of rule chains, labelled by model enumeration.

Each instance is a chain ``p0(c), ∀x(p0(x) → p1(x)), ..., ∀x(p[k-1](x) → pk(x))``
of ``k`` steps. The claim is ``pk(c)`` (True), the chain's last rule negated
(False), or a predicate the premises never mention (Uncertain).
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Optional

from .dataset import BenchmarkInstance
from .fol import parse_fol
from .labels import ORDER, Label
from .oracle import model_labels

ADJECTIVES = [
    "curious", "brave", "patient", "honest", "careful", "generous", "calm",
    "diligent", "kind", "witty", "loyal", "humble", "bold", "gentle",
]
NAMES = ["Alice", "Bruno", "Chen", "Dara", "Emeka", "Farah", "Goran", "Hana"]
STEPS = {"easy": (1, 2), "medium": (3, 5), "hard": (6, 9)}

BUNDLED = Path(__file__).parent / "data" / "synthetic30.jsonl"


def _instance(ident: str, difficulty: str, steps: int, kind: Label, rng: random.Random) -> BenchmarkInstance:
    preds = rng.sample(ADJECTIVES, steps + 2)
    chain, stray = preds[: steps + 1], preds[-1]
    who, other = rng.sample(NAMES, 2)

    premises = [f"fact1: {chain[0]}({who})"]
    context = [f"{who} is {chain[0]}."]
    if difficulty != "hard":
        premises.append(f"fact2: {chain[0]}({other})")
        context.append(f"{other} is {chain[0]}.")
    for k in range(steps):
        last = k == steps - 1
        neg = kind is Label.FALSE and last
        premises.append(f"rule{k + 1}: ∀x({chain[k]}(x) → {'¬' if neg else ''}{chain[k + 1]}(x))")
        context.append(f"Everyone who is {chain[k]} is {'not ' if neg else ''}{chain[k + 1]}.")
    rng.shuffle(premises)

    target = stray if kind is Label.UNCERTAIN else chain[-1]
    conclusion = f"{target}({who})"
    return BenchmarkInstance(
        id=ident,
        difficulty=difficulty,
        steps=steps,
        context_nl=" ".join(context),
        claim_nl=f"{who} is {target}.",
        fol_premises=premises,
        fol_conclusion=conclusion,
        gold_label=kind,
    )


def make_corpus(per_difficulty: int = 10, flips: int = 2, seed: int = 7, test_share: float = 0.3) -> list[BenchmarkInstance]:
    """Build the corpus; ``flips`` instances get a wrong gold label and ``corrupted: true``."""
    rng = random.Random(seed)
    out = []
    for difficulty, (lo, hi) in STEPS.items():
        n_test = round(per_difficulty * test_share)
        for k in range(per_difficulty):
            kind = ORDER[k % 3]
            inst = _instance(f"syn-{difficulty}-{k:02d}", difficulty, rng.randint(lo, hi), kind, rng)
            inst.split = "test" if k >= per_difficulty - n_test else "train"
            out.append(inst)
    for inst in out:
        label = model_labels([parse_fol(p) for p in inst.fol_premises], [parse_fol(inst.fol_conclusion)])[0]
        if label is not inst.gold_label:
            raise RuntimeError(f"{inst.id}: generator meant {inst.gold_label}, models say {label}")
    for inst in rng.sample(out, flips):
        inst.gold_label = ORDER[(ORDER.index(inst.gold_label) + 1) % 3]
        inst.extra["corrupted"] = True
    return out


def main(path: Optional[str] = None) -> None:
    from .dataset import save

    save(make_corpus(), path or BUNDLED)


if __name__ == "__main__":
    main()
