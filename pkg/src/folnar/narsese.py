"""Narsese intermediate representation with byte-exact serialization.

Grammar of the emitted subset::

    <{Jasiah} --> values_creativity>.
    <({a} * {b}) --> r>.
    (-- <{Jasiah} --> innovative>)?
    <<$1 --> p> ==> <$1 --> q>>.
    <(<{a} --> p> && <{a} --> q>) ==> <{a} --> r>>.
    <<($1 --> p) && ($1 --> q)> ==> <$1 --> r>>.

The last form is how a conjunctive antecedent is written when the rule
contains variables: the conjunction takes angle brackets and its
inheritance parts take round ones. Conjunctions of three or more parts
nest to the left, ``((a && b) && c)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union


class NarseseSyntaxError(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Individual:
    name: str


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("variable indices start at 1")


@dataclass(frozen=True)
class Product:
    left: "NarseseTerm"
    right: "NarseseTerm"


@dataclass(frozen=True)
class Predicate:
    name: str


NarseseTerm = Union[Individual, Var, Product, Predicate]


# --------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Inheritance:
    subject: NarseseTerm
    predicate: NarseseTerm

    def __post_init__(self):
        if isinstance(self.predicate, Product):
            raise ValueError("a product may only appear as the subject of an inheritance")


@dataclass(frozen=True)
class Negation:
    inner: Inheritance

    def __post_init__(self):
        if not isinstance(self.inner, Inheritance):
            raise ValueError("negation wraps only inheritance statements")


@dataclass(frozen=True)
class Conjunction:
    parts: tuple["NarseseStatement", ...]

    def __post_init__(self):
        if len(self.parts) < 2:
            raise ValueError("a conjunction needs at least two parts")
        for part in self.parts:
            if not isinstance(part, (Inheritance, Negation)):
                raise ValueError("conjunction parts must be (negated) inheritance statements")


@dataclass(frozen=True)
class Implication:
    antecedent: "NarseseStatement"
    consequent: "NarseseStatement"

    def __post_init__(self):
        if isinstance(self.antecedent, Implication) or isinstance(self.consequent, Implication):
            raise ValueError("implications do not nest")


NarseseStatement = Union[Inheritance, Negation, Conjunction, Implication]


class Punctuation(enum.Enum):
    JUDGMENT = "."
    QUESTION = "?"


@dataclass(frozen=True)
class NarseseSentence:
    statement: NarseseStatement
    punctuation: Punctuation = Punctuation.JUDGMENT


@dataclass(frozen=True)
class NarseseProgram:
    judgments: tuple[NarseseSentence, ...]
    query: NarseseSentence

    def __post_init__(self):
        if any(s.punctuation is not Punctuation.JUDGMENT for s in self.judgments):
            raise ValueError("program body must contain judgments only")
        if self.query.punctuation is not Punctuation.QUESTION:
            raise ValueError("program query must be a question")

    def lines(self) -> list[str]:
        return [serialize(s) for s in self.judgments] + [serialize(self.query)]

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


# --------------------------------------------------------------------------
# Helpers over the IR


def iter_terms(node) -> Iterator[NarseseTerm]:
    """Yield terms in serialization order."""
    if isinstance(node, NarseseSentence):
        yield from iter_terms(node.statement)
    elif isinstance(node, Product):
        yield node
        yield from iter_terms(node.left)
        yield from iter_terms(node.right)
    elif isinstance(node, (Individual, Var, Predicate)):
        yield node
    elif isinstance(node, Inheritance):
        yield from iter_terms(node.subject)
        yield from iter_terms(node.predicate)
    elif isinstance(node, Negation):
        yield from iter_terms(node.inner)
    elif isinstance(node, Conjunction):
        for part in node.parts:
            yield from iter_terms(part)
    elif isinstance(node, Implication):
        yield from iter_terms(node.antecedent)
        yield from iter_terms(node.consequent)


def has_variables(node) -> bool:
    return any(isinstance(t, Var) for t in iter_terms(node))


# --------------------------------------------------------------------------
# Serialization


def _term(t: NarseseTerm) -> str:
    if isinstance(t, Individual):
        return "{" + t.name + "}"
    if isinstance(t, Var):
        return f"${t.index}"
    if isinstance(t, Predicate):
        return t.name
    return f"({_term(t.left)} * {_term(t.right)})"


def _inheritance(s: Inheritance, round_: bool = False) -> str:
    body = f"{_term(s.subject)} --> {_term(s.predicate)}"
    return f"({body})" if round_ else f"<{body}>"


def _part(s: NarseseStatement, round_: bool) -> str:
    if isinstance(s, Inheritance):
        return _inheritance(s, round_)
    return _statement(s)


def _conjunction(c: Conjunction, angle: bool = False) -> str:
    acc = _part(c.parts[0], angle)
    for i, part in enumerate(c.parts[1:], start=2):
        body = f"{acc} && {_part(part, angle)}"
        outer_angle = angle and i == len(c.parts)
        acc = f"<{body}>" if outer_angle else f"({body})"
    return acc


def _statement(s: NarseseStatement) -> str:
    if isinstance(s, Inheritance):
        return _inheritance(s)
    if isinstance(s, Negation):
        return f"(-- {_inheritance(s.inner)})"
    if isinstance(s, Conjunction):
        return _conjunction(s)
    if isinstance(s.antecedent, Conjunction):
        ante = _conjunction(s.antecedent, angle=has_variables(s))
    else:
        ante = _statement(s.antecedent)
    return f"<{ante} ==> {_statement(s.consequent)}>"


def serialize(sentence: NarseseSentence | NarseseStatement) -> str:
    """Render a sentence (or a bare statement, without punctuation)."""
    if isinstance(sentence, NarseseSentence):
        return _statement(sentence.statement) + sentence.punctuation.value
    return _statement(sentence)


# --------------------------------------------------------------------------
# Parsing


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise NarseseSyntaxError(self.pos, message)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def startswith(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def eat(self, s: str):
        self.skip_ws()
        if not self.startswith(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            self.error("expected a name")
        return self.text[start : self.pos]

    def element(self):
        """Parse a term or a statement; the two share bracket syntax."""
        self.skip_ws()
        if self.startswith("{"):
            self.pos += 1
            name = self.name()
            self.eat("}")
            return Individual(name)
        if self.startswith("$"):
            self.pos += 1
            start = self.pos
            digits = self.name()
            if not digits.isdigit():
                self.pos = start
                self.error("expected a variable index")
            return Var(int(digits))
        if self.startswith("<"):
            self.pos += 1
            return self.compound(">")
        if self.startswith("("):
            self.pos += 1
            if self.startswith("-- "):
                self.pos += 3
                inner = self.element()
                if not isinstance(inner, Inheritance):
                    self.error("negation must wrap an inheritance statement")
                self.eat(")")
                return Negation(inner)
            return self.compound(")")
        return Predicate(self.name())

    def compound(self, close: str):
        start = self.pos
        left = self.element()
        self.skip_ws()
        if self.startswith("-->"):
            self.pos += 3
            right = self.element()
            result = self.build(Inheritance, left, right, start, terms=True)
        elif self.startswith("==>"):
            self.pos += 3
            right = self.element()
            result = self.build(Implication, left, right, start)
        elif self.startswith("&&"):
            self.pos += 2
            right = self.element()
            parts = []
            for side in (left, right):
                parts.extend(side.parts if isinstance(side, Conjunction) else [side])
            result = self.build(Conjunction, tuple(parts), None, start)
        elif self.startswith("*") and close == ")":
            self.pos += 1
            right = self.element()
            result = self.build(Product, left, right, start, terms=True)
        else:
            self.error("expected a copula")
        self.eat(close)
        return result

    def build(self, cls, a, b, start, terms=False):
        kinds = (Individual, Var, Product, Predicate)
        args = (a,) if b is None else (a, b)
        if terms and not all(isinstance(x, kinds) for x in args):
            self.pos = start
            self.error(f"{cls.__name__.lower()} operands must be terms")
        if not terms and cls is not Conjunction and any(isinstance(x, kinds) for x in args):
            self.pos = start
            self.error(f"{cls.__name__.lower()} operands must be statements")
        try:
            return cls(*args)
        except (ValueError, TypeError) as exc:
            self.pos = start
            self.error(str(exc))


def parse_narsese(line: str) -> NarseseSentence:
    """Parse one serialized sentence; the inverse of :func:`serialize`."""
    reader = _Reader(line.strip())
    statement = reader.element()
    if isinstance(statement, (Individual, Var, Product, Predicate)):
        raise NarseseSyntaxError(0, "expected a statement")
    reader.skip_ws()
    text = reader.text
    if reader.pos >= len(text) or text[reader.pos] not in ".?":
        reader.error("expected '.' or '?'")
    punct = Punctuation(text[reader.pos])
    reader.pos += 1
    if reader.pos != len(text):
        reader.error("unexpected trailing input")
    return NarseseSentence(statement, punct)
