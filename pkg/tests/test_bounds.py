from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from milforget import (
    Atom,
    BoundParams,
    CostParams,
    LearnTask,
    SearchConfig,
    Signature,
    Symbol,
    SymbolKind,
    enumerate_hypotheses,
    expected_costs,
    hspace_size,
    minimal_signature,
    reduction_factor,
    sample_complexity,
    sample_reduction,
)
from milforget.bounds import CapExceededError, iter_candidate_programs
from milforget.domains import ROBOT, robot_state
from milforget.metarules import CHAIN, MetaruleSet, standard_set

REL = 1e-9


def dyads(n):
    return [Symbol(f"d{i}", 2, SymbolKind.LEARNED) for i in range(n)]


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def test_hspace_size_values():
    assert hspace_size(4, 6, 2, 1) == 864
    assert hspace_size(4, 6, 2, 0) == 1
    assert hspace_size(1, 2, 2, 2) == 64


def test_hspace_matches_enumeration_for_chain_only():
    chain_only = MetaruleSet((CHAIN,))
    count = enumerate_hypotheses(chain_only, dyads(2), 1)
    assert count.clauses == 8
    assert count.ordered == 8 == hspace_size(1, 2, 2, 1)
    pairs = enumerate_hypotheses(chain_only, dyads(2), 2)
    assert pairs.ordered == 64 == hspace_size(1, 2, 2, 2)


def test_sample_complexity_against_high_precision_oracle():
    # frozen from a 40-digit evaluation of the closed form
    assert sample_complexity(4, 6, 2, 2, 0.1, 0.05) == pytest.approx(
        165.18877811162102, rel=REL
    )


def test_sample_complexity_degenerate_logs_vanish():
    assert sample_complexity(1, 1, 2, 3, 0.2, 0.05) == pytest.approx(
        math.log(1 / 0.05) / 0.2, rel=REL
    )


def test_sample_complexity_doubling_p():
    base = sample_complexity(4, 3, 2, 2, 0.1, 0.05)
    doubled = sample_complexity(4, 6, 2, 2, 0.1, 0.05)
    assert doubled - base == pytest.approx(3 * 2 * math.log(2) / 0.1, rel=REL)


def test_reduction_factor_and_sample_reduction():
    assert reduction_factor(1.0, 2, 2) == 1.0
    assert sample_reduction(1.0, 2, 2) == 0.0
    assert reduction_factor(0.5, 2, 2) == pytest.approx(1 / 64, rel=REL)
    assert sample_reduction(0.5, 2, 2) == pytest.approx(-4.1588830833596718, rel=REL)
    with pytest.raises(ValueError):
        reduction_factor(0.0, 2, 2)
    with pytest.raises(ValueError):
        sample_reduction(1.5, 2, 2)


def test_bound_params_validation():
    BoundParams(m=4, p=6, j=2, n=2, p_reduced=3, eps=0.1, delta=0.05, k=1)
    with pytest.raises(ValueError):
        BoundParams(m=0, p=6, j=2, n=2)
    with pytest.raises(ValueError):
        BoundParams(m=4, p=6, j=2, n=2, eps=1.5)
    with pytest.raises(ValueError):
        BoundParams(m=4, p=6, j=2, n=2, k=3)
    assert BoundParams(m=4, p=6, j=2, n=2, p_reduced=3).r == 0.5


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def test_enumerate_standard_set_arity_aware():
    count = enumerate_hypotheses(standard_set(), dyads(2), 1)
    # ident 4 + chain 8, precon and postcon need a monadic symbol
    assert count.clauses == 12
    assert count.ordered == 12 <= hspace_size(4, 2, 2, 1) == 32


def test_enumerate_size_zero():
    count = enumerate_hypotheses(standard_set(), dyads(3), 0)
    assert count.ordered == 1 and count.distinct_sets == 1


def test_enumerate_never_exceeds_bound_on_grid():
    for m_rules, p, n in itertools.product((1, 4), (1, 2, 3, 4), (0, 1, 2)):
        rules = MetaruleSet((CHAIN,)) if m_rules == 1 else standard_set()
        count = enumerate_hypotheses(rules, dyads(p), n)
        assert count.ordered <= hspace_size(rules.m, p, rules.j, n)
        if m_rules == 1:  # all slots dyadic: the bound is exact
            assert count.ordered == hspace_size(1, p, 2, n)


def test_enumerate_programs_materialized():
    count, programs = enumerate_hypotheses(
        MetaruleSet((CHAIN,)), dyads(2), 2, include_programs=True
    )
    assert len(programs) == count.distinct_sets == math.comb(8, 2)
    assert all(p.size == 2 for p in programs)


def test_enumerate_cap():
    with pytest.raises(CapExceededError):
        enumerate_hypotheses(standard_set(), dyads(40), 6, cap=1000)


def test_iter_candidate_programs_cap():
    target = Symbol("f", 2, SymbolKind.TARGET)
    with pytest.raises(CapExceededError):
        list(iter_candidate_programs(standard_set(), ROBOT.primitives, target, 3, cap=100))


# ---------------------------------------------------------------------------
# theorem identities
# ---------------------------------------------------------------------------

def test_halving_symbols_identity():
    for m, p, j, n in itertools.product((1, 4), (2, 6, 10), (1, 2), (1, 2, 4)):
        assert hspace_size(m, p // 2, j, n) * 2 ** ((j + 1) * n) == hspace_size(m, p, j, n)


def test_reduction_factor_restates_hspace_ratio():
    for p, reduced in ((6, 3), (10, 5), (8, 2)):
        r = reduced / p
        lhs = hspace_size(4, reduced, 2, 3)
        rhs = reduction_factor(r, 2, 3) * hspace_size(4, p, 2, 3)
        assert lhs == pytest.approx(rhs, rel=REL)


def test_sample_reduction_restates_complexity_delta():
    eps, delta = 0.1, 0.05
    for p, reduced, j, n in ((6, 3, 2, 2), (10, 5, 1, 4), (8, 4, 2, 6)):
        full = sample_complexity(4, p, j, n, eps, delta)
        shrunk = sample_complexity(4, reduced, j, n, eps, delta)
        assert shrunk - full == pytest.approx(
            sample_reduction(reduced / p, j, n) / eps, rel=REL
        )


def test_cost_table_composes_from_hspace():
    """The keep/forget expected costs are compositions of the hypothesis
    space bound at (p+1, n-k), (p+1, n) and (p, n)."""
    for m, j, p, n, k in itertools.product((1, 4), (1, 2), (4, 10), (4, 6), (1, 3)):
        pr = Fraction(1, 3)
        cost_keep, cost_forget = expected_costs(CostParams(m=m, j=j, n=n, p=p, k=k, pr=pr))
        assert cost_forget == hspace_size(m, p, j, n)
        assert cost_keep == pr * hspace_size(m, p + 1, j, n - k) + (1 - pr) * hspace_size(
            m, p + 1, j, n
        )


# ---------------------------------------------------------------------------
# minimal signature oracle
# ---------------------------------------------------------------------------

def _one_shot(name, s1, s2):
    t = Symbol(name, 2, SymbolKind.TARGET)
    return LearnTask(t, (Atom(t, (s1, s2)),))


def test_minimal_signature_one_step():
    task = _one_shot("f", robot_state(1, 1, 3, 3, False), robot_state(1, 2, 3, 3, False))
    out = minimal_signature(task, ROBOT.signature(), ROBOT.registry(), SearchConfig(max_size=1))
    assert [s.name for s in out] == ["up"]


def test_minimal_signature_grab_then_up():
    task = _one_shot("f", robot_state(2, 2, 2, 2, False), robot_state(2, 3, 2, 3, True))
    out = minimal_signature(task, ROBOT.signature(), ROBOT.registry(), SearchConfig(max_size=1))
    assert sorted(s.name for s in out) == ["grab", "up"]


def test_minimal_signature_unsolvable_returns_none():
    # ball teleports with the robot elsewhere: not expressible at size 1
    task = _one_shot("f", robot_state(1, 1, 6, 6, False), robot_state(6, 6, 1, 1, False))
    out = minimal_signature(
        task, ROBOT.signature(), ROBOT.registry(), SearchConfig(max_size=1, step_cap=100_000)
    )
    assert out is None


def test_minimal_signature_guards_width():
    wide = Signature(protected=dyads(13))
    task = _one_shot("f", robot_state(1, 1, 3, 3, False), robot_state(1, 2, 3, 3, False))
    with pytest.raises(ValueError):
        minimal_signature(task, wide, ROBOT.registry())
