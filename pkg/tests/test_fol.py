import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folnar import fol
from folnar.fol import (
    And,
    Atom,
    Constant,
    ForAll,
    Implies,
    LexError,
    Not,
    Or,
    ParseError,
    Tok,
    UnboundVariable,
    UnsupportedQuantifier,
    Variable,
    Xor,
    normalize,
    parse_fol,
    tokenize,
)
from strategies import formulas


def atom(pred, *names, bound=()):
    return Atom(pred, tuple(Variable(n) if n in bound else Constant(n) for n in names))


# -- normalize --------------------------------------------------------------


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("fact1: values_creativity(Jasiah)", "values_creativity(Jasiah)"),
        ("p(a)", "p(a)"),
        ('- "rule1: ∀x(p(x) → q(x))."', "∀x(p(x) → q(x))"),
        ("  • premise: p(a);  ", "p(a)"),
        ("* “q(b)”.", "q(b)"),
        ("rule5 : p(a) -> q(a),", "p(a) -> q(a)"),
        ("-> p(a)", "-> p(a)"),
        ("", ""),
    ],
)
def test_normalize(raw, expected):
    assert normalize(raw) == expected
    assert normalize(expected) == expected


def test_normalize_idempotent_on_fuzz_corpus():
    rng = random.Random(1234)
    decorations = ["- ", "* ", "• ", '"', "'", "“", "”", "fact3: ", "rule12:", "premise : ", " ", ".", ";", ","]
    cores = ["p(a)", "∀x(p(x) → q(x))", "~r(a,b)", "a", "", "xor", "p(a) & q(b)"]
    for _ in range(1000):
        parts = [rng.choice(decorations) for _ in range(rng.randint(0, 4))]
        tail = [rng.choice(decorations) for _ in range(rng.randint(0, 3))]
        s = "".join(parts) + rng.choice(cores) + "".join(tail)
        once = normalize(s)
        assert normalize(once) == once, s
        assert once in s


@given(st.text(max_size=30))
def test_normalize_idempotent_arbitrary_text(s):
    assert normalize(normalize(s)) == normalize(s)


# -- tokenize ---------------------------------------------------------------


def test_tokenize_negated_atom():
    kinds = [(t.kind, t.text) for t in tokenize("¬innovative(Jasiah)")]
    assert kinds == [
        (Tok.NOT, "¬"),
        (Tok.IDENT, "innovative"),
        (Tok.LPAREN, "("),
        (Tok.IDENT, "Jasiah"),
        (Tok.RPAREN, ")"),
    ]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_rejects_outside_alphabet():
    with pytest.raises(LexError) as err:
        tokenize("p(a) @ q(b)")
    assert err.value.offset == 5


@pytest.mark.parametrize("text", ["p(a) ↔ q(a)", "p(a) <-> q(a)", "p(1)", "p(a) - q(a)"])
def test_biconditional_and_strays_are_lex_errors(text):
    with pytest.raises(LexError):
        tokenize(text)


@pytest.mark.parametrize(
    "unicode, ascii_",
    [("∀", "forall"), ("¬", "~"), ("¬", "!"), ("∧", "&"), ("∧", "/\\"), ("∨", "|"), ("∨", "\\/"), ("→", "->"), ("⊕", "xor")],
)
def test_connective_spellings_share_kinds(unicode, ascii_):
    assert tokenize(unicode)[0].kind == tokenize(ascii_)[0].kind


# -- parse ------------------------------------------------------------------


def test_parse_golden_rule():
    got = parse_fol("∀x(loves_drawings(x) ∧ values_creativity(x) → artistic(x))")
    x = ("x",)
    expected = ForAll(
        "x",
        Implies(
            And(atom("loves_drawings", "x", bound=x), atom("values_creativity", "x", bound=x)),
            atom("artistic", "x", bound=x),
        ),
    )
    assert got == expected


def test_parse_single_atom():
    assert parse_fol("p(a)") == Atom("p", (Constant("a"),))


def test_implication_is_right_associative():
    a, b, c = (atom(n, "k") for n in "abc")
    got = parse_fol("a(k) -> b(k) -> c(k)")
    assert got == Implies(a, Implies(b, c))
    assert got != Implies(Implies(a, b), c)


def test_precedence_ladder():
    # ¬ binds tighter than ∧, ∧ than ∨, ∨ than ⊕, ⊕ than →
    got = parse_fol("~p(a) & q(a) | r(a) xor s(a) -> t(a)")
    p, q, r, s, t = (atom(n, "a") for n in "pqrst")
    assert got == Implies(Xor(Or(And(Not(p), q), r), s), t)


def test_left_associativity():
    p, q, r = (atom(n, "a") for n in "pqr")
    assert parse_fol("p(a) & q(a) & r(a)") == And(And(p, q), r)
    assert parse_fol("p(a) xor q(a) xor r(a)") == Xor(Xor(p, q), r)


def test_quantifier_takes_longest_body():
    got = parse_fol("forall x p(x) & q(x) -> r(x)")
    assert isinstance(got, ForAll)
    assert isinstance(got.body, Implies)


def test_parse_fol_disjunctive_antecedent_rule():
    got = parse_fol("∀x(p(x) ∨ q(x) → r(x))")
    assert isinstance(got, ForAll) and isinstance(got.body, Implies)
    assert isinstance(got.body.antecedent, Or)


def test_parse_fol_strips_label():
    assert parse_fol("fact3: loves_drawings(Jasiah)") == Atom("loves_drawings", (Constant("Jasiah"),))


def test_binding_ignores_case():
    got = parse_fol("∀X p(X, a)")
    assert got == ForAll("X", Atom("p", (Variable("X"), Constant("a"))))


def test_nested_quantifiers_and_shadowing():
    got = parse_fol("∀x ∀y r(x, y)")
    assert got == ForAll("x", ForAll("y", Atom("r", (Variable("x"), Variable("y")))))
    with pytest.raises(ParseError):
        parse_fol("∀x ∀x p(x)")  # the outer binder is vacuous


@pytest.mark.parametrize("text", ["∃x p(x)", "exists x (p(x))"])
def test_existential_rejected(text):
    with pytest.raises(UnsupportedQuantifier):
        parse_fol(text)


def test_quantified_name_used_free_is_rejected():
    with pytest.raises(UnboundVariable) as err:
        parse_fol("(∀x p(x)) → q(x)")
    assert err.value.name == "x"


@pytest.mark.parametrize("text", ["p()", "p(a,b,c)", "p(a", "p(a) &", "& p(a)", "p(a) q(a)", "∀x q(a)", ")", ""])
def test_parse_errors_carry_offsets(text):
    with pytest.raises(fol.FolError) as err:
        parse_fol(text)
    assert 0 <= err.value.offset <= len(text)


def test_arity_three_is_a_parse_error():
    with pytest.raises(ParseError) as err:
        parse_fol("p(a,b,c)")
    assert "arity" in err.value.expected


def test_spans_point_into_raw_input():
    raw = "rule1: p(a) -> q(b)."
    f = parse_fol(raw)
    assert f.consequent.span.original_text == "q(b)"
    assert raw[f.consequent.span.start_offset : f.consequent.span.end_offset] == "q(b)"
    with pytest.raises(LexError) as err:
        parse_fol("fact1: p(a) @")
    assert err.value.offset == 12


# -- printing ---------------------------------------------------------------


def test_canonical_ascii_format():
    f = parse_fol("∀x(p(x) ∧ q(x) → r(x))")
    assert fol.to_text(f) == "forall x (p(x) & q(x) -> r(x))"
    assert fol.to_text(parse_fol("¬(p(a) ∨ q(a))")) == "~(p(a) | q(a))"
    assert fol.to_text(parse_fol("(p(a) → q(a)) → r(a)")) == "(p(a) -> q(a)) -> r(a)"


@settings(max_examples=300)
@given(formulas)
def test_round_trip_through_ascii(f):
    text = fol.to_text(f)
    assert parse_fol(text) == f, text


@settings(max_examples=200)
@given(formulas)
def test_unicode_and_ascii_spellings_agree(f):
    assert parse_fol(fol.to_text(f, fol.UNICODE)) == parse_fol(fol.to_text(f, fol.ASCII))
