"""Reference evaluators for small units.

``entail_models`` grounds the FOL premises over the unit's constants and
enumerates every truth assignment of the resulting ground atoms.
``chase_compiled`` instantiates the compiled Narsese program over the same
constants and forward-chains signed literals to a fixpoint. The first is
classical and complete; the second mirrors what the compiled program can
derive by rule application alone.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import fol
from .compiler import CompileUnit, compile_unit, is_strengthening
from .fol import And, Atom, Constant, FolFormula, ForAll, Implies, Not, Or, Xor
from .labels import Label
from .narsese import (
    Conjunction,
    Implication,
    Individual,
    Inheritance,
    NarseseProgram,
    NarseseStatement,
    Negation,
    Product,
    Var,
    iter_terms,
)

MAX_BASE = 24
_CHUNK = 1 << 16


class OracleError(Exception):
    pass


class DomainTooLarge(OracleError):
    def __init__(self, size: int, limit: int = MAX_BASE):
        super().__init__(f"{size} ground atoms exceeds the limit of {limit}")
        self.size = size


class ContradictoryPremises(OracleError):
    pass


class ContradictoryDerivation(OracleError):
    def __init__(self, atoms: list["GroundAtom"]):
        super().__init__("both signs derived for " + ", ".join(map(str, atoms)))
        self.atoms = atoms


@dataclass(frozen=True, order=True)
class GroundAtom:
    predicate: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"


@dataclass(frozen=True, order=True)
class SignedLiteral:
    atom: GroundAtom
    positive: bool = True

    def flipped(self) -> "SignedLiteral":
        return SignedLiteral(self.atom, not self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else f"¬{self.atom}"


# --------------------------------------------------------------------------
# Model enumeration


class _Grounder:
    """Turns formulas into nested tuples over a shared atom index."""

    def __init__(self, domain: Sequence[str]):
        self.domain = domain
        self.atoms: dict[GroundAtom, int] = {}

    def ground(self, f: FolFormula, env: dict[str, str]):
        if isinstance(f, Atom):
            args = tuple(env[t.name] if not isinstance(t, Constant) else t.name for t in f.args)
            atom = GroundAtom(f.predicate, args)
            return ("atom", self.atoms.setdefault(atom, len(self.atoms)))
        if isinstance(f, Not):
            return ("not", self.ground(f.inner, env))
        if isinstance(f, ForAll):
            parts = [self.ground(f.body, {**env, f.var: c}) for c in self.domain]
            return ("all", parts)
        tag = {And: "and", Or: "or", Xor: "xor", Implies: "imp"}[type(f)]
        left, right = fol.children(f)
        return (tag, self.ground(left, env), self.ground(right, env))


def _evaluate(g, cols, size: int) -> np.ndarray:
    tag = g[0]
    if tag == "atom":
        return cols(g[1])
    if tag == "not":
        return ~_evaluate(g[1], cols, size)
    if tag == "all":
        out = np.ones(size, dtype=bool)
        for part in g[1]:
            out &= _evaluate(part, cols, size)
        return out
    a, b = _evaluate(g[1], cols, size), _evaluate(g[2], cols, size)
    if tag == "and":
        return a & b
    if tag == "or":
        return a | b
    if tag == "xor":
        return a ^ b
    return ~a | b


def model_labels(
    premises: Sequence[FolFormula],
    conclusions: Sequence[FolFormula],
    domain: Optional[Iterable[str]] = None,
) -> list[Label]:
    """Label several conclusions against one premise set by enumeration."""
    consts = set(domain or ())
    for f in itertools.chain(premises, conclusions):
        consts |= fol.constants(f)
    grounder = _Grounder(sorted(consts))
    ground_premises = [grounder.ground(p, {}) for p in premises]
    ground_conclusions = [grounder.ground(c, {}) for c in conclusions]
    n = len(grounder.atoms)
    if n > MAX_BASE:
        raise DomainTooLarge(n)

    total = 1 << n
    satisfiable = False
    can_be_true = [False] * len(conclusions)
    can_be_false = [False] * len(conclusions)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        size = len(idx)
        cache: dict[int, np.ndarray] = {}

        def cols(k: int) -> np.ndarray:
            if k not in cache:
                cache[k] = ((idx >> k) & 1).astype(bool)
            return cache[k]

        mask = np.ones(size, dtype=bool)
        for g in ground_premises:
            mask &= _evaluate(g, cols, size)
        if not mask.any():
            continue
        satisfiable = True
        for i, g in enumerate(ground_conclusions):
            value = _evaluate(g, cols, size)[mask]
            can_be_true[i] |= bool(value.any())
            can_be_false[i] |= bool((~value).any())
    if not satisfiable:
        raise ContradictoryPremises("no assignment satisfies every premise")
    labels = []
    for t, f in zip(can_be_true, can_be_false):
        labels.append(Label.TRUE if not f else Label.FALSE if not t else Label.UNCERTAIN)
    return labels


def entail_models(unit: CompileUnit, domain: Optional[Iterable[str]] = None) -> Label:
    """Classical three-valued entailment over the closed constant domain."""
    return model_labels(unit.premises, [unit.conclusion], domain)[0]


# --------------------------------------------------------------------------
# Forward chaining over compiled programs


def _literals(s: NarseseStatement, binding: dict[int, str]) -> list[SignedLiteral]:
    if isinstance(s, Conjunction):
        return [lit for part in s.parts for lit in _literals(part, binding)]
    if isinstance(s, Negation):
        return [_literals(s.inner, binding)[0].flipped()]
    if not isinstance(s, Inheritance):
        raise OracleError("nested implication cannot be chased")
    subject = s.subject
    names = [subject.left, subject.right] if isinstance(subject, Product) else [subject]
    args = []
    for t in names:
        if isinstance(t, Individual):
            args.append(t.name)
        elif isinstance(t, Var):
            args.append(binding[t.index])
        else:
            raise OracleError(f"cannot ground subject term {t!r}")
    return [SignedLiteral(GroundAtom(s.predicate.name, tuple(args)))]


def _instances(s: NarseseStatement, domain: Sequence[str]) -> list[dict[int, str]]:
    indices = sorted({t.index for t in iter_terms(s) if isinstance(t, Var)})
    return [dict(zip(indices, combo)) for combo in itertools.product(domain, repeat=len(indices))]


def _fixpoint(facts: set[SignedLiteral], rules) -> set[SignedLiteral]:
    facts = set(facts)
    changed = True
    while changed:
        changed = False
        for ante, cons in rules:
            if all(a in facts for a in ante):
                for c in cons:
                    if c not in facts:
                        facts.add(c)
                        changed = True
    return facts


def _conflicts(facts: set[SignedLiteral]) -> list[GroundAtom]:
    return sorted(lit.atom for lit in facts if lit.positive and lit.flipped() in facts)


class Chase:
    """Fixpoint of one compiled program over a closed domain."""

    def __init__(self, judgments: Sequence[NarseseStatement], domain: Iterable[str]):
        self.domain = sorted(set(domain))
        seeds: set[SignedLiteral] = set()
        self.rules: list[tuple[tuple[SignedLiteral, ...], tuple[SignedLiteral, ...]]] = []
        for s in judgments:
            for binding in _instances(s, self.domain):
                if isinstance(s, Implication):
                    ante = tuple(_literals(s.antecedent, binding))
                    cons = tuple(_literals(s.consequent, binding))
                    self.rules.append((ante, cons))
                else:
                    seeds.update(_literals(s, binding))
        atoms = {lit.atom for lit in seeds}
        for ante, cons in self.rules:
            atoms.update(lit.atom for lit in ante + cons)
        self.atoms = atoms
        if len(atoms) > MAX_BASE:
            raise DomainTooLarge(len(atoms))
        self.facts = _fixpoint(seeds, self.rules)
        conflicts = _conflicts(self.facts)
        if conflicts:
            raise ContradictoryDerivation(conflicts)

    def _literal_label(self, lit: SignedLiteral, facts) -> Label:
        if lit in facts:
            return Label.TRUE
        if lit.flipped() in facts:
            return Label.FALSE
        return Label.UNCERTAIN

    def _ground_label(self, s: NarseseStatement, binding: dict[int, str]) -> Label:
        if isinstance(s, Implication):
            ante = _literals(s.antecedent, binding)
            cons = _literals(s.consequent, binding)
            hypothetical = _fixpoint(self.facts | set(ante), self.rules)
            if _conflicts(hypothetical) or all(c in hypothetical for c in cons):
                return Label.TRUE
            if all(a in self.facts for a in ante) and any(c.flipped() in self.facts for c in cons):
                return Label.FALSE
            return Label.UNCERTAIN
        labels = [self._literal_label(lit, self.facts) for lit in _literals(s, binding)]
        if all(lab is Label.TRUE for lab in labels):
            return Label.TRUE
        if any(lab is Label.FALSE for lab in labels):
            return Label.FALSE
        return Label.UNCERTAIN

    def label(self, query: NarseseStatement) -> Label:
        """Variables in a query are read universally over the domain."""
        labels = [self._ground_label(query, b) for b in _instances(query, self.domain)]
        if all(lab is Label.TRUE for lab in labels):
            return Label.TRUE
        if any(lab is Label.FALSE for lab in labels):
            return Label.FALSE
        return Label.UNCERTAIN


def program_constants(program: NarseseProgram) -> set[str]:
    names = set()
    for s in (*program.judgments, program.query):
        names.update(t.name for t in iter_terms(s) if isinstance(t, Individual))
    return names


def chase_compiled(program: NarseseProgram, domain: Optional[Iterable[str]] = None) -> Label:
    """Boolean forward chaining of ``program``; domain defaults to its individuals."""
    consts = program_constants(program) | set(domain or ())
    chase = Chase([s.statement for s in program.judgments], consts)
    return chase.label(program.query.statement)


# --------------------------------------------------------------------------
# Cross-check


class AgreementKind(enum.Enum):
    AGREE = "agree"
    STRENGTHENED_DIVERGENCE = "strengthened_divergence"
    INCOMPLETE_DIVERGENCE = "incomplete_divergence"
    CONTRADICTION = "contradiction"


@dataclass
class Agreement:
    kind: AgreementKind
    models_label: Optional[Label]
    chase_label: Optional[Label]
    details: list[str] = field(default_factory=list)


def _has_negation(unit: CompileUnit) -> bool:
    return any(isinstance(n, (Not, Xor)) for p in unit.premises for n in fol.preorder(p))


def agreement_check(unit: CompileUnit, domain: Optional[Iterable[str]] = None) -> Agreement:
    """Compare both oracles on ``unit`` and classify any disagreement.

    A contradictory side is reported as a ``None`` label. Divergence is
    expected when the compilation strengthens a premise (``∨`` consequent,
    ``⊕`` antecedent) or the query fell back to a subformula; it is also
    expected when premises contain negation, since forward chaining cannot
    reason by contraposition or by cases. Anything else means a compiler bug.
    """
    report = compile_unit(unit)
    consts = unit.constants() | set(domain or ())
    details = []
    try:
        m = entail_models(unit, consts)
    except ContradictoryPremises as exc:
        m = None
        details.append(f"models: {exc}")
    try:
        c = chase_compiled(report.program, consts)
    except ContradictoryDerivation as exc:
        c = None
        details.append(f"chase: {exc}")

    if m == c:
        return Agreement(AgreementKind.AGREE, m, c, details)
    strengthening = [i for i, p in enumerate(unit.premises) if is_strengthening(p)]
    if strengthening or report.fallback_used:
        if strengthening:
            details.append(f"strengthening premises: {strengthening}")
        if report.fallback_used:
            details.append(f"query fell back to {report.fallback_subformula}")
        return Agreement(AgreementKind.STRENGTHENED_DIVERGENCE, m, c, details)
    if c is Label.UNCERTAIN and _has_negation(unit):
        details.append("chase lacks contraposition over negated premises")
        return Agreement(AgreementKind.INCOMPLETE_DIVERGENCE, m, c, details)
    if m is None and c is not None and _has_negation(unit):
        details.append("inconsistency needs case analysis the chase cannot do")
        return Agreement(AgreementKind.INCOMPLETE_DIVERGENCE, m, c, details)
    return Agreement(AgreementKind.CONTRADICTION, m, c, details)
