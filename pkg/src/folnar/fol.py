"""First-order logic frontend: normalization, lexing, parsing, printing.

The accepted language is a small FOL subset: unary and binary atoms,
negation, conjunction, disjunction, exclusive or, implication and universal
quantification. Every connective has a Unicode and an ASCII spelling::

    ∀ forall     ¬ ~ !     ∧ & /\\     ∨ | \\/     → ->     ⊕ xor

An identifier inside an atom is a variable exactly when an enclosing
quantifier binds it; everything else is a constant.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class FolError(Exception):
    """Base class for frontend errors; ``offset`` indexes the source text."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(message)
        self.offset = offset


class LexError(FolError):
    def __init__(self, offset: int, snippet: str):
        super().__init__(f"unexpected character {snippet!r} at offset {offset}", offset)
        self.snippet = snippet


class ParseError(FolError):
    def __init__(self, offset: int, expected: str, found: str):
        super().__init__(f"expected {expected} at offset {offset}, found {found}", offset)
        self.expected = expected
        self.found = found


class UnsupportedQuantifier(FolError):
    pass


class UnboundVariable(FolError):
    """A quantified name is also used outside the scope of its quantifier."""

    def __init__(self, name: str, offset: int = 0):
        super().__init__(f"{name!r} is quantified elsewhere but used free at offset {offset}", offset)
        self.name = name


# --------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class SourceSpan:
    start_offset: int
    end_offset: int
    original_text: str


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Constant:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Variable:
    name: str
    span: Optional[SourceSpan] = _span()


FolTerm = Union[Constant, Variable]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[FolTerm, ...]
    span: Optional[SourceSpan] = _span()

    def __post_init__(self):
        if len(self.args) not in (1, 2):
            raise ValueError(f"atom {self.predicate} has arity {len(self.args)}; only 1 or 2 supported")


@dataclass(frozen=True)
class Not:
    inner: "FolFormula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class And:
    left: "FolFormula"
    right: "FolFormula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Or:
    left: "FolFormula"
    right: "FolFormula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Xor:
    left: "FolFormula"
    right: "FolFormula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Implies:
    antecedent: "FolFormula"
    consequent: "FolFormula"
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "FolFormula"
    span: Optional[SourceSpan] = _span()


FolFormula = Union[Atom, Not, And, Or, Xor, Implies, ForAll]
Binary = (And, Or, Xor, Implies)


def children(f: FolFormula) -> tuple[FolFormula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, (Not,)):
        return (f.inner,)
    if isinstance(f, ForAll):
        return (f.body,)
    if isinstance(f, Implies):
        return (f.antecedent, f.consequent)
    return (f.left, f.right)


def preorder(f: FolFormula) -> Iterator[FolFormula]:
    """Yield nodes parent first, left child before right child."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def is_literal(f: FolFormula) -> bool:
    return isinstance(f, Atom) or (isinstance(f, Not) and isinstance(f.inner, Atom))


def constants(f: FolFormula) -> set[str]:
    return {t.name for n in preorder(f) if isinstance(n, Atom) for t in n.args if isinstance(t, Constant)}


def predicates(f: FolFormula) -> set[tuple[str, int]]:
    return {(n.predicate, len(n.args)) for n in preorder(f) if isinstance(n, Atom)}


# --------------------------------------------------------------------------
# Normalization

_LABEL = re.compile(r"[A-Za-z]+[0-9]*\s*:")
_BULLETS = "*•"
_QUOTES = "\"'“”‘’„«»"
_TRAILING = ".;,"


def _normalize_bounds(raw: str) -> tuple[int, int]:
    start, end = 0, len(raw)
    while True:
        before = (start, end)
        while start < end and raw[start].isspace():
            start += 1
        while end > start and raw[end - 1].isspace():
            end -= 1
        if start < end and (raw[start] in _BULLETS or (raw[start] == "-" and raw[start + 1 : start + 2] != ">")):
            start += 1
        if start < end and raw[start] in _QUOTES:
            start += 1
        if end > start and raw[end - 1] in _QUOTES:
            end -= 1
        m = _LABEL.match(raw, start, end)
        if m:
            start = m.end()
        if end > start and raw[end - 1] in _TRAILING:
            end -= 1
        if (start, end) == before:
            return start, end


def normalize(raw: str) -> str:
    """Strip labels like ``fact7:``, bullets, quotes and trailing punctuation.

    The result is always a substring of ``raw``; stripping repeats until
    nothing changes, so the function is idempotent.
    """
    start, end = _normalize_bounds(raw)
    return raw[start:end]


# --------------------------------------------------------------------------
# Lexing


class Tok(enum.Enum):
    IDENT = "IDENT"
    LPAREN = "("
    RPAREN = ")"
    COMMA = ","
    FORALL = "FORALL"
    EXISTS = "EXISTS"
    NOT = "NOT"
    AND = "AND"
    OR = "OR"
    IMPLIES = "IMPLIES"
    XOR = "XOR"
    EOF = "EOF"


@dataclass(frozen=True)
class Token:
    kind: Tok
    text: str
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


_SYMBOLS = [
    ("->", Tok.IMPLIES),
    ("/\\", Tok.AND),
    ("\\/", Tok.OR),
    ("→", Tok.IMPLIES),
    ("∀", Tok.FORALL),
    ("∃", Tok.EXISTS),
    ("¬", Tok.NOT),
    ("~", Tok.NOT),
    ("!", Tok.NOT),
    ("∧", Tok.AND),
    ("&", Tok.AND),
    ("∨", Tok.OR),
    ("|", Tok.OR),
    ("⊕", Tok.XOR),
    ("(", Tok.LPAREN),
    (")", Tok.RPAREN),
    (",", Tok.COMMA),
]
_KEYWORDS = {"forall": Tok.FORALL, "exists": Tok.EXISTS, "xor": Tok.XOR}
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _IDENT.match(text, pos)
        if m:
            word = m.group()
            tokens.append(Token(_KEYWORDS.get(word, Tok.IDENT), word, pos))
            pos = m.end()
            continue
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, pos):
                tokens.append(Token(kind, sym, pos))
                pos += len(sym)
                break
        else:
            raise LexError(pos, text[pos : pos + 10])
    return tokens


# --------------------------------------------------------------------------
# Parsing


class _Parser:
    def __init__(self, tokens: list[Token], source: str):
        self.tokens = tokens
        self.source = source
        self.pos = 0
        self.bound: list[str] = []
        self.quantified: set[str] = set()
        self.free_constants: list[Constant] = []
        self.uses: list[int] = []  # occurrence count per entry of self.bound
        end = len(source) if source else (tokens[-1].end if tokens else 0)
        self.eof = Token(Tok.EOF, "", end)

    def peek(self) -> Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.eof

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, kind: Tok, what: str) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise ParseError(tok.offset, what, _describe(tok))
        return self.advance()

    def span(self, start: int) -> SourceSpan:
        end = self.tokens[self.pos - 1].end if self.pos else start
        return SourceSpan(start, end, self.source[start:end])

    # formula := xor ( '->' formula )?
    def formula(self) -> FolFormula:
        start = self.peek().offset
        left = self.xor()
        if self.peek().kind is Tok.IMPLIES:
            self.advance()
            right = self.formula()
            return Implies(left, right, span=self.span(start))
        return left

    def _left_assoc(self, kind: Tok, node, operand):
        start = self.peek().offset
        left = operand()
        while self.peek().kind is kind:
            self.advance()
            left = node(left, operand(), span=self.span(start))
        return left

    def xor(self) -> FolFormula:
        return self._left_assoc(Tok.XOR, Xor, self.disjunction)

    def disjunction(self) -> FolFormula:
        return self._left_assoc(Tok.OR, Or, self.conjunction)

    def conjunction(self) -> FolFormula:
        return self._left_assoc(Tok.AND, And, self.unary)

    def unary(self) -> FolFormula:
        tok = self.peek()
        if tok.kind is Tok.NOT:
            self.advance()
            inner = self.unary()
            return Not(inner, span=self.span(tok.offset))
        if tok.kind is Tok.FORALL:
            return self.quantified_formula()
        if tok.kind is Tok.EXISTS:
            raise UnsupportedQuantifier(
                f"existential quantifier at offset {tok.offset} is not supported", tok.offset
            )
        if tok.kind is Tok.LPAREN:
            self.advance()
            inner = self.formula()
            self.expect(Tok.RPAREN, "')'")
            return inner
        if tok.kind is Tok.IDENT:
            return self.atom()
        raise ParseError(tok.offset, "formula", _describe(tok))

    def quantified_formula(self) -> FolFormula:
        start = self.advance().offset
        var = self.expect(Tok.IDENT, "variable name").text
        self.bound.append(var)
        self.quantified.add(var)
        self.uses.append(0)
        try:
            body = self.formula()
        finally:
            self.bound.pop()
            uses = self.uses.pop()
        if uses == 0:
            raise ParseError(start, f"an occurrence of {var!r} in the quantifier body", "none")
        return ForAll(var, body, span=self.span(start))

    def term(self) -> FolTerm:
        tok = self.expect(Tok.IDENT, "term")
        span = SourceSpan(tok.offset, tok.end, tok.text)
        if tok.text in self.bound:
            # the innermost binder of this name owns the occurrence
            depth = len(self.bound) - 1 - self.bound[::-1].index(tok.text)
            self.uses[depth] += 1
            return Variable(tok.text, span=span)
        const = Constant(tok.text, span=span)
        self.free_constants.append(const)
        return const

    def atom(self) -> Atom:
        name = self.advance()
        self.expect(Tok.LPAREN, f"'(' after predicate {name.text!r}")
        args = [self.term()]
        while self.peek().kind is Tok.COMMA:
            self.advance()
            args.append(self.term())
        close = self.expect(Tok.RPAREN, "')'")
        if len(args) > 2:
            raise ParseError(name.offset, "arity 1 or 2", f"arity {len(args)}")
        return Atom(name.text, tuple(args), span=SourceSpan(name.offset, close.end, self.source[name.offset : close.end]))


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind is Tok.EOF else repr(tok.text)


def parse(tokens: list[Token], source: str = "") -> FolFormula:
    """Parse a token list into a formula.

    Precedence from tightest: ``¬ ∧ ∨ ⊕ →``. Implication associates to the
    right, the others to the left, and a quantifier body extends as far
    right as possible.
    """
    p = _Parser(tokens, source)
    if not tokens:
        raise ParseError(p.eof.offset, "formula", "end of input")
    result = p.formula()
    if p.peek().kind is not Tok.EOF:
        tok = p.peek()
        raise ParseError(tok.offset, "end of input", _describe(tok))
    for const in p.free_constants:
        if const.name in p.quantified:
            raise UnboundVariable(const.name, const.span.start_offset if const.span else 0)
    return result


def parse_fol(raw: str) -> FolFormula:
    """Normalize, tokenize and parse ``raw``; offsets refer to ``raw``."""
    start, end = _normalize_bounds(raw)
    text = raw[start:end]
    try:
        tokens = [Token(t.kind, t.text, t.offset + start) for t in tokenize(text)]
    except LexError as exc:
        raise LexError(exc.offset + start, exc.snippet) from None
    padded = " " * start + text  # keeps spans aligned with raw
    return parse(tokens, padded)


# --------------------------------------------------------------------------
# Printing

ASCII = {"not": "~", "and": "&", "or": "|", "xor": "xor", "implies": "->", "forall": "forall "}
UNICODE = {"not": "¬", "and": "∧", "or": "∨", "xor": "⊕", "implies": "→", "forall": "∀"}

_PREC = {Implies: 1, Xor: 2, Or: 3, And: 4, Not: 5, Atom: 6, ForAll: 0}
_OPS = {And: "and", Or: "or", Xor: "xor", Implies: "implies"}


def to_text(f: FolFormula, symbols: dict[str, str] = ASCII) -> str:
    """Canonical print: ``forall x (p(x) & q(x) -> r(x))``.

    Parentheses appear only where precedence or associativity needs them,
    plus always around quantifier bodies and around a quantifier nested
    under any other connective.
    """
    if isinstance(f, Atom):
        return f"{f.predicate}({','.join(t.name for t in f.args)})"
    if isinstance(f, ForAll):
        return f"{symbols['forall']}{f.var} ({to_text(f.body, symbols)})"
    if isinstance(f, Not):
        inner = to_text(f.inner, symbols)
        if _PREC[type(f.inner)] < _PREC[Not]:
            inner = f"({inner})"
        return symbols["not"] + inner
    prec = _PREC[type(f)]
    left, right = children(f)
    right_assoc = isinstance(f, Implies)
    ls, rs = to_text(left, symbols), to_text(right, symbols)
    lp, rp = _PREC[type(left)], _PREC[type(right)]
    if lp < prec or (lp == prec and right_assoc):
        ls = f"({ls})"
    if rp < prec or (rp == prec and not right_assoc):
        rs = f"({rs})"
    return f"{ls} {symbols[_OPS[type(f)]]} {rs}"

