"""Acceptance gate: one test per criterion, each printing a pass/fail line.

The two corpus-scale criteria share session fixtures so the expensive
200-task experiments run once.  Everything else is self-contained and
fast.  Budgets follow the harness defaults: a 5 second per-size-bound
timeout enforced as a wall deadline with a deterministic step cap
derived from it.
"""

from __future__ import annotations

import itertools
import math
import os
import random
import time
from fractions import Fraction

import pytest

from milforget import (
    Atom,
    Budget,
    CostParams,
    apply_primitive,
    LearnTask,
    PrimitiveRegistry,
    Program,
    SearchConfig,
    Signature,
    Symbol,
    SymbolKind,
    emit_csv,
    enumerate_hypotheses,
    expected_costs,
    gen_tasks,
    hspace_size,
    metagol,
    prove,
    run_experiment,
    sample_complexity,
    unfold,
)
from milforget.bounds import iter_candidate_programs
from milforget.domains import LEGO, ROBOT, lego_state, robot_state
from milforget.forgetting import ForgetStrategy
from milforget.harness import ExperimentConfig, derive_seed, run_corpus, search_config
from milforget.metarules import CHAIN, MetaruleSet, standard_set
from milforget.multitask import MultiTaskConfig, forgetgol
from milforget.syntax import format_program

SEED = 20260811
PARALLELISM = min(8, os.cpu_count() or 1)


def report(criterion: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="session")
def robot200():
    corpus = gen_tasks("robot", 200, derive_seed(SEED, 200, 0))
    runs = {}
    for strategy in ("single", "none", "syn"):
        runs[strategy] = run_corpus(
            corpus, strategy, timeout=5.0, max_d=6, parallelism=PARALLELISM
        )
    return runs


@pytest.fixture(scope="session")
def lego200():
    corpus = gen_tasks("lego", 200, derive_seed(SEED, 200, 0))
    runs = {}
    for strategy in ("none", "syn"):
        runs[strategy] = run_corpus(
            corpus, strategy, timeout=5.0, max_d=6, parallelism=PARALLELISM
        )
    return runs


def _solved_count(run) -> int:
    return round(run.row.pct_solved * run.row.n_tasks / 100.0)


# ---------------------------------------------------------------------------
# 1. worked example
# ---------------------------------------------------------------------------

def test_c1_grandparent_worked_example():
    parent = Symbol("parent", 2, SymbolKind.FACT)
    gp = Symbol("grandparent", 2, SymbolKind.TARGET)
    from milforget.logic import Const

    ann, bob, carl = Const("ann"), Const("bob"), Const("carl")
    registry = PrimitiveRegistry()
    registry.register_facts(parent, [(ann, bob), (bob, carl)])
    sig = Signature(protected=(), learned=(parent,))
    task = LearnTask(gp, (Atom(gp, (ann, carl)),))
    started = time.monotonic()
    result = metagol(Program(), registry, sig, task, SearchConfig(max_size=6))
    elapsed = time.monotonic() - started
    ok = (
        result.solved
        and result.program.size == 1
        and format_program(result.program) == "grandparent(A,B) :- parent(A,C),parent(C,B)."
        and elapsed < 1.0
    )
    report(1, ok, f"size-1 chain program in {elapsed:.3f}s")


# ---------------------------------------------------------------------------
# 2. multi-task versus single-task gap
# ---------------------------------------------------------------------------

def test_c2_multitask_gap(robot200):
    single = _solved_count(robot200["single"])
    none_ = _solved_count(robot200["none"])
    syn = _solved_count(robot200["syn"])
    ok = none_ >= 2 * single and syn >= 2 * single
    report(
        2,
        ok,
        f"robot 200 tasks: single={single}, none={none_}, syn={syn} (need both >= {2 * single})",
    )


# ---------------------------------------------------------------------------
# 3. forgetting safety
# ---------------------------------------------------------------------------

def test_c3_forgetting_safety(robot200, lego200):
    details = []
    ok = True
    for name, runs in (("robot", robot200), ("lego", lego200)):
        solved_none = _solved_count(runs["none"])
        solved_syn = _solved_count(runs["syn"])
        sig_none = runs["none"].row.final_sig_size
        sig_syn = runs["syn"].row.final_sig_size
        ok = ok and solved_syn >= solved_none - 2 and sig_syn <= sig_none
        details.append(
            f"{name}: solved syn={solved_syn} vs none={solved_none}, |S| syn={sig_syn} vs none={sig_none}"
        )
    report(3, ok, "; ".join(details))


# ---------------------------------------------------------------------------
# 4. hypothesis-space oracle equivalence
# ---------------------------------------------------------------------------

def test_c4_enumeration_within_bound():
    started = time.monotonic()
    chain_only = MetaruleSet((CHAIN,))
    ok = True
    for m_rules, p, n in itertools.product((1, 4), (1, 2, 3, 4), (0, 1, 2)):
        rules = chain_only if m_rules == 1 else standard_set()
        symbols = [Symbol(f"d{i}", 2, SymbolKind.LEARNED) for i in range(p)]
        count = enumerate_hypotheses(rules, symbols, n)
        ok = ok and count.ordered <= hspace_size(rules.m, p, rules.j, n)
    exact = enumerate_hypotheses(chain_only, [Symbol(f"d{i}", 2, SymbolKind.LEARNED) for i in range(2)], 1)
    ok = ok and exact.ordered == 8 == hspace_size(1, 2, 2, 1)
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 10.0
    report(4, ok, f"grid within bound, chain-only case exact (8 = 8) in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 5. reduction identities
# ---------------------------------------------------------------------------

def test_c5_reduction_identities():
    ok = True
    for m, p, j, n in itertools.product((1, 4), (2, 6, 10, 20), (1, 2), (1, 2, 6)):
        ok = ok and hspace_size(m, p // 2, j, n) * 2 ** ((j + 1) * n) == hspace_size(m, p, j, n)
    eps, delta = 0.1, 0.05
    worst = 0.0
    for p, j, n in itertools.product((2, 6, 10), (1, 2), (1, 2, 6)):
        lhs = sample_complexity(4, p // 2 or 1, j, n, eps, delta) - sample_complexity(
            4, p, j, n, eps, delta
        )
        rhs = (1 / eps) * (j + 1) * n * math.log((p // 2 or 1) / p)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-30))
    ok = ok and worst < 1e-9
    report(5, ok, f"halving identity exact; sample delta rel err {worst:.2e}")


# ---------------------------------------------------------------------------
# 6. statistical-forgetting decisions
# ---------------------------------------------------------------------------

def test_c6_statistical_decisions():
    started = time.monotonic()
    checked = 0
    ok = True
    for m, j, p, n, k, pr in itertools.product(
        (1, 4),
        (1, 2),
        (2, 10, 50),
        (2, 4, 6),
        (1, 2, 4, 6),
        (Fraction(1, 10), Fraction(1, 2), Fraction(9, 10), Fraction(1)),
    ):
        if k > n:
            continue
        cp = CostParams(m=m, j=j, n=n, p=p, k=k, pr=pr)
        cost_keep, cost_forget = expected_costs(cp)
        direct_keep = pr * (m * (p + 1) ** (j + 1)) ** (n - k) + (1 - pr) * (
            m * (p + 1) ** (j + 1)
        ) ** n
        direct_forget = (m * p ** (j + 1)) ** n
        ok = ok and (cost_forget > cost_keep) == (direct_forget > direct_keep)
        ok = ok and cost_keep == direct_keep and cost_forget == direct_forget
        checked += 1
    # the two worked decisions
    keep2, forget2 = expected_costs(CostParams(m=4, j=2, n=6, p=10, k=2, pr=Fraction(1, 2)))
    ok = ok and not forget2 > keep2  # forgotten
    keep5, forget5 = expected_costs(CostParams(m=4, j=2, n=6, p=10, k=5, pr=Fraction(1)))
    ok = ok and forget5 > keep5 and keep5 == 5324  # kept
    elapsed = time.monotonic() - started
    ok = ok and checked >= 200 and elapsed < 5.0
    report(6, ok, f"{checked} grid points plus worked examples in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# 7. unfold equivalence on learned background knowledge
# ---------------------------------------------------------------------------

def _random_robot_state(rng):
    if rng.random() < 0.2:
        x, y = rng.randrange(1, 7), rng.randrange(1, 7)
        return robot_state(x, y, x, y, True)
    return robot_state(
        rng.randrange(1, 7), rng.randrange(1, 7), rng.randrange(1, 7), rng.randrange(1, 7), False
    )


_INVERSE = {"up": "down", "down": "up", "left": "right", "right": "left", "grab": "drop", "drop": "grab"}


def _mine_small_tasks(rng, domain, walk_lengths, count, avoid_inverse=False):
    """Random tasks whose final state is a short random walk from a random
    initial state, so a good share solve within a few clauses.  With
    avoid_inverse the walk never immediately undoes its last action, which
    keeps the net action count at the walk length."""
    actions = [s for s in domain.primitives if s.arity == 2]
    tasks = []
    i = 0
    while len(tasks) < count:
        i += 1
        if domain.name == "robot":
            start = _random_robot_state(rng)
        else:
            start = lego_state(1, [0] * 6)
        state = start
        last = None
        for _ in range(rng.choice(walk_lengths)):
            options = []
            for a in actions:
                if avoid_inverse and last is not None and a.name == _INVERSE.get(last):
                    continue
                nxt = apply_primitive(a, state)
                if nxt is not None:
                    options.append((a.name, nxt))
            if not options:
                break
            last, state = rng.choice(options)
        if state == start and domain.name == "lego":
            continue
        target = Symbol(f"{domain.name[0]}m{i}", 2, SymbolKind.TARGET)
        tasks.append(LearnTask(target, (Atom(target, (start, state)),)))
    return tasks


def _learned_bk(domain, rng):
    """Dependent learning over short-walk tasks: a realistic clause store
    with reused and invented symbols, built quickly."""
    from milforget.multitask import TaskCorpus

    tasks = _mine_small_tasks(rng, domain, (1, 2, 2, 3, 4), 40)
    corpus = TaskCorpus(tuple(tasks), domain.name)
    cfg = MultiTaskConfig(
        max_d=3,
        strategy=ForgetStrategy.NONE,
        search=search_config(1.0),
        parallelism=PARALLELISM,
    )
    return forgetgol(Program(), domain.registry(), domain.signature(), corpus, cfg)


def test_c7_unfold_equivalence():
    started = time.monotonic()
    rng = random.Random(SEED)
    checked = 0
    ok = True
    for domain, mk_state in (
        (ROBOT, lambda: _random_robot_state(rng)),
        (LEGO, lambda: lego_state(rng.randrange(1, 7), [rng.randrange(0, 5) for _ in range(6)])),
    ):
        result = _learned_bk(domain, rng)
        bk = result.bk
        if not bk.size:
            ok = False
            break
        unfolded = Program(
            [form for clause in bk for form in unfold(clause, bk)]
        )
        registry = domain.registry()
        heads = [s for s in result.signature.forgettable if s.kind is SymbolKind.LEARNED]
        for _ in range(100):
            head = rng.choice(heads)
            query = Atom(head, (mk_state(), mk_state()))
            before = prove([query], bk, registry, Budget(step_cap=300_000))
            after = prove([query], unfolded, registry, Budget(step_cap=300_000))
            ok = ok and before.proven == after.proven
            checked += 1
    elapsed = time.monotonic() - started
    ok = ok and checked == 200 and elapsed < 60.0
    report(7, ok, f"{checked} random ground queries agree in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 8. minimality of learned programs
# ---------------------------------------------------------------------------

def test_c8_minimality_of_small_programs():
    started = time.monotonic()
    rng = random.Random(SEED + 8)
    solved = []
    # short free walks give one-clause programs cheaply; non-backtracking
    # walks of 3-4 actions need a second clause and a bigger budget
    for domain in (ROBOT, LEGO):
        registry = domain.registry()
        for task in _mine_small_tasks(rng, domain, (1, 2, 2), 16):
            result = metagol(
                Program(), registry, domain.signature(), task,
                SearchConfig(max_size=2, step_cap=400_000),
            )
            if result.solved and result.program.size <= 2:
                solved.append((domain, task, result.program))
    for _ in range(6):
        for domain in (ROBOT, LEGO):
            registry = domain.registry()
            for task in _mine_small_tasks(rng, domain, (3, 4), 6, avoid_inverse=True):
                result = metagol(
                    Program(), registry, domain.signature(), task,
                    SearchConfig(max_size=2, step_cap=1_500_000),
                )
                if result.solved and result.program.size <= 2:
                    solved.append((domain, task, result.program))
        if len(solved) >= 50 and sum(1 for _, _, p in solved if p.size == 2) >= 12:
            break
    ok = len(solved) >= 50
    n_size2 = sum(1 for _, _, p in solved if p.size == 2)
    for domain, task, program in solved[:50]:
        registry = domain.registry()
        for smaller in iter_candidate_programs(
            standard_set(), domain.primitives, task.target, program.size - 1
        ):
            outcome = prove(
                task.positives, smaller, registry, Budget(step_cap=30_000, depth_cap=200)
            )
            if outcome.proven:
                ok = False
                report(
                    8,
                    False,
                    f"{task.name}: smaller program exists: {format_program(smaller)}",
                )
        # the empty program never covers a positive example
        assert not prove(task.positives, Program(), registry, Budget(step_cap=1000)).proven
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 600.0
    report(8, ok, f"50 tasks minimal ({n_size2} of size 2) in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 9. bench determinism
# ---------------------------------------------------------------------------

TIMING_COLUMNS = (5, 6)


def _masked_csv(path) -> list:
    lines = open(path).read().splitlines()
    out = [lines[0]]
    for line in lines[1:]:
        cells = line.split(",")
        for idx in TIMING_COLUMNS:
            cells[idx] = "_"
        out.append(",".join(cells))
    return out


def test_c9_bench_determinism(tmp_path):
    cfg = ExperimentConfig(
        domain="robot",
        counts=(6, 10),
        reps=2,
        seed=SEED,
        strategies=("none", "syn", "single"),
        timeout=0.4,
        max_d=2,
        parallelism=PARALLELISM,
    )
    paths = []
    for label in ("a", "b"):
        rows = run_experiment(cfg)
        path = tmp_path / f"bench_{label}.csv"
        emit_csv(rows, path)
        paths.append(path)
    masked_a, masked_b = _masked_csv(paths[0]), _masked_csv(paths[1])
    ok = masked_a == masked_b
    report(9, ok, f"{len(masked_a) - 1} rows byte-identical outside timing columns")
