"""Hypothesis strategies for FOL formulas, supported premises and Narsese ASTs."""

from hypothesis import strategies as st

from folnar import fol
from folnar.fol import And, Atom, Constant, ForAll, Implies, Not, Or, Variable, Xor
from folnar.narsese import (
    Conjunction,
    Implication,
    Individual,
    Inheritance,
    NarseseSentence,
    Negation,
    Predicate,
    Product,
    Punctuation,
    Var,
)

PREDS = ["p", "q", "r", "s"]
CONSTS = ["a", "b", "c"]
VARS = ["x", "y", "z", "u", "v", "w"]

const = st.sampled_from(CONSTS).map(Constant)
atoms = st.builds(
    lambda pred, args: Atom(pred, tuple(args)),
    st.sampled_from(PREDS),
    st.lists(const, min_size=1, max_size=2),
)


def _substitute(f, name, var):
    if isinstance(f, Atom):
        return Atom(f.predicate, tuple(Variable(var) if isinstance(t, Constant) and t.name == name else t for t in f.args))
    if isinstance(f, Not):
        return Not(_substitute(f.inner, name, var))
    if isinstance(f, ForAll):
        return ForAll(f.var, _substitute(f.body, name, var))
    left, right = fol.children(f)
    return type(f)(_substitute(left, name, var), _substitute(right, name, var))


@st.composite
def _quantify(draw, body):
    """Bind one constant of ``body`` under a fresh variable name, if possible."""
    consts = sorted(fol.constants(body))
    taken = {n.var for n in fol.preorder(body) if isinstance(n, ForAll)}
    free = [v for v in VARS if v not in taken]
    if not consts or not free:
        return body
    name = draw(st.sampled_from(consts))
    return ForAll(free[0], _substitute(body, name, free[0]))


def _extend(children):
    binary = st.sampled_from([And, Or, Xor, Implies])
    return st.one_of(
        st.builds(Not, children),
        st.builds(lambda op, a, b: op(a, b), binary, children, children),
        children.flatmap(_quantify),
    )


def depth(f) -> int:
    return 1 + max((depth(c) for c in fol.children(f)), default=0)


formulas = st.recursive(atoms, _extend, max_leaves=12).filter(lambda f: depth(f) <= 6)


# -- supported premise shapes ---------------------------------------------

unary_preds = st.sampled_from(PREDS)


def _lit(var):
    def make(pred, neg):
        a = Atom(pred, (var,))
        return Not(a) if neg else a
    return st.builds(make, unary_preds, st.booleans())


def _tree(leaves, ops, max_leaves=3):
    return st.recursive(leaves, lambda ch: st.builds(lambda op, a, b: op(a, b), st.sampled_from(ops), ch, ch), max_leaves=max_leaves)


@st.composite
def supported_premises(draw, allow_strengthening=True):
    """A premise the compiler accepts, over one variable or one constant."""
    universal = draw(st.booleans())
    term = Variable("x") if universal else Constant(draw(st.sampled_from(CONSTS)))
    lit = _lit(term)
    kind = draw(st.sampled_from(["fact", "conj", "rule", "xor"] if allow_strengthening else ["fact", "conj", "rule"]))
    if kind == "fact":
        body = draw(lit)
    elif kind == "conj":
        body = draw(_tree(lit, [And], 3).filter(lambda f: isinstance(f, And)))
    else:
        cons_ops = [And, Or] if allow_strengthening else [And]
        cons = draw(_tree(lit, cons_ops))
        if kind == "xor":
            ante = Xor(draw(lit), draw(lit))
        else:
            ante = draw(_tree(lit, [And, Or]))
        body = Implies(ante, cons)
    return ForAll("x", body) if universal else body


# -- Narsese ASTs -----------------------------------------------------------

names = st.sampled_from(["a", "b", "Jasiah", "loves_drawings", "p2"])
simple_terms = st.one_of(names.map(Individual), st.integers(1, 4).map(Var), names.map(Predicate))
subjects = st.one_of(simple_terms, st.builds(Product, simple_terms, simple_terms))
inheritance = st.builds(Inheritance, subjects, names.map(Predicate))
literal_statements = st.one_of(inheritance, st.builds(Negation, inheritance))
conjunctions = st.lists(literal_statements, min_size=2, max_size=3).map(lambda ps: Conjunction(tuple(ps)))
narsese_statements = st.one_of(
    literal_statements,
    conjunctions,
    st.builds(Implication, st.one_of(literal_statements, conjunctions), st.one_of(literal_statements, conjunctions)),
)
narsese_sentences = st.builds(NarseseSentence, narsese_statements, st.sampled_from(list(Punctuation)))
