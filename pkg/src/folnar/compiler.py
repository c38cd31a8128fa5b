"""Deterministic FOL to Narsese compilation.

Premise shapes, after stripping any outer chain of universal quantifiers:

    p(a) / p(x) / r(a,b)        one judgment
    ¬p(a)                       one negated judgment
    a ∧ b ∧ ...                 one judgment per conjunct
    A → B                       one rule per (antecedent alternative, consequent literal)

Antecedents are expanded to disjunctive normal form; each conjunction of
literals becomes one ``&&`` antecedent. Consequents are flattened to their
literals, which is exact for ``∧`` and a strengthening for ``∨``. An
antecedent ``a ⊕ b`` emits the two exclusivity rules ``a ==> ¬b`` and
``b ==> ¬a`` before the consequence rules for ``a`` and ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import fol
from .fol import And, Atom, Constant, FolFormula, ForAll, Implies, Not, Or, Variable, Xor
from .narsese import (
    Conjunction,
    Implication,
    Individual,
    Inheritance,
    NarseseProgram,
    NarseseSentence,
    NarseseStatement,
    Negation,
    Predicate,
    Product,
    Punctuation,
    Var,
)


class CompileError(Exception):
    pass


class UnsupportedPattern(CompileError):
    def __init__(self, node: FolFormula, reason: str, premise_index: Optional[int] = None):
        self.node = node
        self.reason = reason
        self.premise_index = premise_index
        where = f"premise {premise_index}: " if premise_index is not None else ""
        super().__init__(f"{where}{reason}: {fol.to_text(node)}")

    @property
    def offset(self) -> Optional[int]:
        return self.node.span.start_offset if self.node.span else None


class UnsupportedArity(CompileError):
    pass


class NoQueryableSubformula(CompileError):
    pass


@dataclass(frozen=True)
class CompileUnit:
    premises: tuple[FolFormula, ...]
    conclusion: FolFormula

    @classmethod
    def from_text(cls, premises, conclusion: str) -> "CompileUnit":
        return cls(tuple(fol.parse_fol(p) for p in premises), fol.parse_fol(conclusion))

    def constants(self) -> set[str]:
        out = fol.constants(self.conclusion)
        for p in self.premises:
            out |= fol.constants(p)
        return out


@dataclass
class CompileReport:
    program: NarseseProgram
    fallback_used: bool = False
    fallback_subformula: Optional[str] = None
    source_map: list[tuple[int, list[int]]] = field(default_factory=list)


# --------------------------------------------------------------------------
# Atoms and literals


def compile_term(t, env: dict[str, int]):
    if isinstance(t, Constant):
        return Individual(t.name)
    if t.name not in env:
        env[t.name] = len(env) + 1
    return Var(env[t.name])


def compile_atom(f: Atom, env: dict[str, int]) -> Inheritance:
    """Map an atom to an inheritance; ``env`` numbers variables on first use."""
    if len(f.args) == 1:
        return Inheritance(compile_term(f.args[0], env), Predicate(f.predicate))
    if len(f.args) == 2:
        left = compile_term(f.args[0], env)
        right = compile_term(f.args[1], env)
        return Inheritance(Product(left, right), Predicate(f.predicate))
    raise UnsupportedArity(f"{f.predicate} has arity {len(f.args)}")


def _literal(f: FolFormula, env: dict[str, int]) -> NarseseStatement:
    if isinstance(f, Atom):
        return compile_atom(f, env)
    return Negation(compile_atom(f.inner, env))


def _negate(f: FolFormula) -> FolFormula:
    return f.inner if isinstance(f, Not) else Not(f)


def _strip_quantifiers(f: FolFormula) -> FolFormula:
    while isinstance(f, ForAll):
        f = f.body
    return f


def _require_literal(f: FolFormula, where: str):
    if isinstance(f, Not) and not isinstance(f.inner, Atom):
        raise UnsupportedPattern(f, "negation over a non-atomic formula")
    if isinstance(f, ForAll):
        raise UnsupportedPattern(f, f"quantifier nested inside {where}")
    if isinstance(f, Implies):
        raise UnsupportedPattern(f, f"implication nested inside {where}")
    if not fol.is_literal(f):
        raise UnsupportedPattern(f, f"{type(f).__name__.lower()} not allowed in {where}")


# --------------------------------------------------------------------------
# Shape analysis


def _flatten_and(f: FolFormula) -> list[FolFormula]:
    if isinstance(f, And):
        return _flatten_and(f.left) + _flatten_and(f.right)
    return [f]


def antecedent_alternatives(f: FolFormula) -> list[list[FolFormula]]:
    """Disjunctive normal form of an antecedent, as lists of literals."""
    if isinstance(f, Or):
        return antecedent_alternatives(f.left) + antecedent_alternatives(f.right)
    if isinstance(f, And):
        return [a + b for a in antecedent_alternatives(f.left) for b in antecedent_alternatives(f.right)]
    _require_literal(f, "a rule antecedent")
    return [[f]]


def consequent_literals(f: FolFormula) -> list[FolFormula]:
    if isinstance(f, (And, Or)):
        return consequent_literals(f.left) + consequent_literals(f.right)
    if isinstance(f, Xor):
        raise UnsupportedPattern(f, "exclusive or is only supported as a rule antecedent")
    _require_literal(f, "a rule consequent")
    return [f]


def is_strengthening(f: FolFormula) -> bool:
    """True when compiling ``f`` entails more than ``f`` itself."""
    body = _strip_quantifiers(f)
    if not isinstance(body, Implies):
        return False
    if isinstance(body.antecedent, Xor):
        return True
    return any(isinstance(n, Or) for n in fol.preorder(body.consequent))


# --------------------------------------------------------------------------
# Premises


def _rule(antecedent: list[FolFormula], consequent: FolFormula) -> NarseseSentence:
    env: dict[str, int] = {}
    parts = [_literal(lit, env) for lit in antecedent]
    ante = parts[0] if len(parts) == 1 else Conjunction(tuple(parts))
    return NarseseSentence(Implication(ante, _literal(consequent, env)))


def compile_premise(f: FolFormula) -> list[NarseseSentence]:
    body = _strip_quantifiers(f)
    if fol.is_literal(body):
        return [NarseseSentence(_literal(body, {}))]
    if isinstance(body, And):
        conjuncts = _flatten_and(body)
        for c in conjuncts:
            if isinstance(c, Or):
                raise UnsupportedPattern(c, "disjunctive fact")
            if isinstance(c, Xor):
                raise UnsupportedPattern(c, "exclusive-or fact")
            _require_literal(c, "a conjunctive fact")
        return [NarseseSentence(_literal(c, {})) for c in conjuncts]
    if isinstance(body, Or):
        raise UnsupportedPattern(body, "disjunctive fact")
    if isinstance(body, Xor):
        raise UnsupportedPattern(body, "exclusive-or fact")
    if isinstance(body, Not):
        raise UnsupportedPattern(body, "negation over a non-atomic formula")
    if not isinstance(body, Implies):
        raise UnsupportedPattern(body, "unsupported premise shape")

    consequents = consequent_literals(body.consequent)
    ante = body.antecedent
    if isinstance(ante, Xor):
        a, b = ante.left, ante.right
        _require_literal(a, "an exclusive-or operand")
        _require_literal(b, "an exclusive-or operand")
        rules = [_rule([a], _negate(b)), _rule([b], _negate(a))]
        rules += [_rule([alt], c) for alt in (a, b) for c in consequents]
        return rules
    if any(isinstance(n, Xor) for n in fol.preorder(ante)):
        raise UnsupportedPattern(ante, "exclusive or nested inside a rule antecedent")
    return [_rule(alt, c) for alt in antecedent_alternatives(ante) for c in consequents]


# --------------------------------------------------------------------------
# Queries


def _single_statement(f: FolFormula) -> Optional[NarseseStatement]:
    body = _strip_quantifiers(f)
    try:
        if isinstance(body, And):
            conjuncts = _flatten_and(body)
            if all(fol.is_literal(c) for c in conjuncts):
                env: dict[str, int] = {}
                return Conjunction(tuple(_literal(c, env) for c in conjuncts))
            return None
        if isinstance(body, Implies) and not isinstance(body.antecedent, Xor):
            alternatives = antecedent_alternatives(body.antecedent)
            consequents = consequent_literals(body.consequent)
            if len(alternatives) == 1 and len(consequents) == 1:
                return _rule(alternatives[0], consequents[0]).statement
    except UnsupportedPattern:
        return None
    return None


def compile_query(f: FolFormula) -> tuple[NarseseSentence, bool, Optional[str]]:
    """Compile the conclusion as a question.

    Returns ``(question, fallback_used, fallback_subformula)``. When the
    conclusion has no single-statement form, the first literal met in a
    left-to-right preorder walk becomes the question instead.
    """
    body = _strip_quantifiers(f)
    if fol.is_literal(body):
        return NarseseSentence(_literal(body, {}), Punctuation.QUESTION), False, None
    statement = _single_statement(f)
    if statement is not None:
        return NarseseSentence(statement, Punctuation.QUESTION), False, None
    for node in fol.preorder(f):
        if fol.is_literal(node):
            return NarseseSentence(_literal(node, {}), Punctuation.QUESTION), True, fol.to_text(node)
    raise NoQueryableSubformula(fol.to_text(f))


def compile_unit(unit: CompileUnit) -> CompileReport:
    judgments: list[NarseseSentence] = []
    source_map = []
    for i, premise in enumerate(unit.premises):
        try:
            lines = compile_premise(premise)
        except UnsupportedPattern as exc:
            raise UnsupportedPattern(exc.node, exc.reason, premise_index=i) from None
        source_map.append((i, list(range(len(judgments), len(judgments) + len(lines)))))
        judgments.extend(lines)
    query, fallback_used, fallback = compile_query(unit.conclusion)
    return CompileReport(NarseseProgram(tuple(judgments), query), fallback_used, fallback, source_map)


def compile_text(premises, conclusion: str) -> CompileReport:
    return compile_unit(CompileUnit.from_text(premises, conclusion))
