from __future__ import annotations

import itertools

import pytest

from milforget import Symbol, SymbolKind, project, standard_set
from milforget.metarules import (
    ArityMismatchError,
    CHAIN,
    IDENT,
    MetaruleSet,
    format_metarule,
    parse_metarule,
)
from milforget.syntax import format_clause


def dyad(name, kind=SymbolKind.PRIMITIVE):
    return Symbol(name, 2, kind)


def monad(name, kind=SymbolKind.PRIMITIVE):
    return Symbol(name, 1, kind)


def test_standard_set_shape():
    rules = standard_set()
    assert rules.m == 4
    assert rules.j == 2
    assert [r.name for r in rules] == ["ident", "precon", "postcon", "chain"]


def test_chain_schema():
    chain = standard_set()["chain"]
    assert chain.head.predicate_var == "P" and chain.head.args == ("A", "B")
    assert [(b.predicate_var, b.args) for b in chain.body] == [
        ("Q", ("A", "C")),
        ("R", ("C", "B")),
    ]


def test_implicit_arity_annotations():
    rules = standard_set()
    assert rules["precon"].var_arities() == {"P": 2, "Q": 1, "R": 2}
    assert rules["postcon"].var_arities() == {"P": 2, "Q": 2, "R": 1}
    assert rules["ident"].var_arities() == {"P": 2, "Q": 2}


def test_project_chain_family_example():
    gp = Symbol("grandparent", 2, SymbolKind.TARGET)
    parent = Symbol("parent", 2, SymbolKind.FACT)
    clause = project(CHAIN, {"P": gp, "Q": parent, "R": parent})
    assert format_clause(clause) == "grandparent(A,B) :- parent(A,C),parent(C,B)."


def test_project_ident():
    f = Symbol("f", 2, SymbolKind.TARGET)
    up = dyad("up")
    clause = project(IDENT, {"P": f, "Q": up})
    assert format_clause(clause) == "f(A,B) :- up(A,B)."


def test_project_arity_mismatch():
    f = Symbol("f", 2, SymbolKind.TARGET)
    parent = dyad("parent", SymbolKind.FACT)
    up = dyad("up")
    precon = standard_set()["precon"]
    with pytest.raises(ArityMismatchError):
        project(precon, {"P": f, "Q": parent, "R": up})  # Q must be monadic


def test_project_requires_total_binding():
    f = Symbol("f", 2, SymbolKind.TARGET)
    with pytest.raises(ArityMismatchError):
        project(CHAIN, {"P": f, "Q": dyad("up")})


def _count_bindings(rule, symbols):
    slots = [rule.var_arities()[v] for v in rule.predicate_vars()]
    count = 1
    for arity in slots:
        count *= sum(1 for s in symbols if s.arity == arity)
    return count


@pytest.mark.parametrize("n_dyadic,n_monadic", [(1, 0), (2, 1), (3, 1), (2, 2), (4, 0)])
def test_metasubstitution_counts(n_dyadic, n_monadic):
    """Valid metasubstitutions per rule equal the product of matching-arity
    symbol counts, and the total never exceeds m * p^(j+1)."""
    symbols = [dyad(f"d{i}") for i in range(n_dyadic)] + [monad(f"m{i}") for i in range(n_monadic)]
    rules = standard_set()
    total = 0
    for rule in rules:
        predicted = _count_bindings(rule, symbols)
        enumerated = 0
        for combo in itertools.product(symbols, repeat=len(rule.predicate_vars())):
            arities = rule.var_arities()
            if all(
                s.arity == arities[v]
                for v, s in zip(rule.predicate_vars(), combo)
            ):
                enumerated += 1
        assert enumerated == predicted
        total += enumerated
    p = len(symbols)
    assert total <= rules.m * p ** (rules.j + 1)


def test_project_injective_per_rule():
    symbols = [dyad(f"d{i}", SymbolKind.LEARNED) for i in range(3)]
    seen = set()
    for combo in itertools.product(symbols, repeat=3):
        clause = project(CHAIN, dict(zip(("P", "Q", "R"), combo)))
        key = format_clause(clause)
        assert key not in seen
        seen.add(key)
    assert len(seen) == 27


def test_text_format_round_trip():
    for rule in standard_set():
        text = format_metarule(rule)
        assert format_metarule(parse_metarule(text)) == text
    chain_text = "chain: P(A,B) :- Q(A,C), R(C,B)."
    assert format_metarule(parse_metarule(chain_text)) == chain_text
    assert format_metarule(standard_set()["chain"]) == chain_text


def test_parse_metarule_errors():
    with pytest.raises(ValueError):
        parse_metarule("noname P(A,B).")
    with pytest.raises(ValueError):
        parse_metarule("x: P(A,B) :- Q(A,C)")  # missing dot


def test_metarule_set_validation():
    with pytest.raises(ValueError):
        MetaruleSet([])
    with pytest.raises(ValueError):
        MetaruleSet([CHAIN, CHAIN])
