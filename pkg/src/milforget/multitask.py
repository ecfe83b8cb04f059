"""Depth-staged multi-task learning over a task corpus.

Each depth d first applies the configured forgetting strategy to the
signature, then attempts every remaining task with a clause budget of d
against a frozen snapshot of the background knowledge.  Programs learned
within a depth are merged afterwards, in corpus order: their clauses join
the background knowledge and their head symbols (including invented ones)
join the signature, so later depths can build on earlier wins.  The
clause store only ever grows; forgetting shrinks the signature alone.

Tasks inside one depth cannot observe each other's results, so they may
run in parallel; results are merged in corpus order either way.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .engine import LearnResult, LearnTask, SearchConfig, metagol
from .forgetting import ForgetStrategy, Signature, apply_forgetting
from .logic import (
    Atom,
    Clause,
    LogicError,
    PrimitiveRegistry,
    Program,
    Symbol,
    SymbolKind,
)
from .metarules import MetaruleSet, standard_set


@dataclass(frozen=True)
class TaskCorpus:
    """An ordered list of tasks with pairwise distinct target symbols.

    The generation seed is bookkeeping only and does not participate in
    equality; two corpora are equal when their domain and tasks are.
    """

    tasks: "tuple[LearnTask, ...]"
    domain: str
    seed: Optional[int] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise LogicError("corpus target symbols must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)


@dataclass(frozen=True)
class MultiTaskConfig:
    max_d: int = 6
    strategy: ForgetStrategy = ForgetStrategy.NONE
    search: SearchConfig = field(default_factory=SearchConfig)
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.max_d < 1:
            raise ValueError("max_d must be at least 1")


@dataclass(frozen=True)
class DepthReport:
    depth: int
    solved: "tuple[str, ...]"
    task_seconds: "dict[str, float]"  # per attempted task at this depth
    statuses: "dict[str, str]"
    bk_before: int
    bk_after: int
    sig_before: int
    sig_after: int
    forgotten: "tuple[str, ...]"


@dataclass(frozen=True)
class MultiTaskResult:
    programs: "dict[str, Program]"  # task name -> learned program, in solve order
    reports: "tuple[DepthReport, ...]"
    bk: Program
    signature: Signature  # everything ever admitted
    effective_signature: Signature  # after a final forgetting pass
    unsolved: "tuple[str, ...]"


def _promote(program: Program, target: Symbol) -> "tuple[Program, Symbol]":
    """Rewrite a freshly learned program so its target symbol is a learned
    symbol; invented symbols keep their kind.  Needed because unsolved
    targets may not appear in other clauses' bodies."""
    learned = Symbol(target.name, target.arity, SymbolKind.LEARNED)

    def fix_atom(a: Atom) -> Atom:
        return Atom(learned, a.args) if a.predicate == target else a

    clauses = [
        Clause(fix_atom(c.head), tuple(fix_atom(b) for b in c.body)) for c in program
    ]
    return Program(clauses), learned


def _attempt(args) -> LearnResult:
    bk, registry, sig, task, cfg, rules = args
    return metagol(bk, registry, sig, task, cfg, rules)


def learn_depth(
    bk: Program,
    registry: PrimitiveRegistry,
    sig: Signature,
    tasks: Iterable[LearnTask],
    depth: int,
    search: SearchConfig,
    parallelism: int = 1,
    metarules: Optional[MetaruleSet] = None,
):
    """Attempt every task at clause budget `depth` against frozen (bk, sig).

    Returns (new_symbols, solved_tasks, learned_programs, results) where
    learned programs are already promoted and everything is ordered by the
    corpus, independent of execution interleaving.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rules = metarules or standard_set()
    cfg = replace(search, max_size=depth)
    tasks = list(tasks)
    jobs = [(bk, registry, sig, t, cfg, rules) for t in tasks]
    if parallelism > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_attempt, jobs, chunksize=1))
    else:
        results = [_attempt(j) for j in jobs]

    new_symbols: list[Symbol] = []
    solved: list[LearnTask] = []
    programs: list[tuple[LearnTask, Program]] = []
    outcome: dict[LearnTask, LearnResult] = {}
    for task, result in zip(tasks, results):
        outcome[task] = result
        if not result.solved:
            continue
        promoted, learned_sym = _promote(result.program, task.target)
        solved.append(task)
        programs.append((task, promoted))
        new_symbols.append(learned_sym)
        for clause in promoted:
            head = clause.head.predicate
            if head.kind is SymbolKind.INVENTED and head not in new_symbols:
                new_symbols.append(head)
    return new_symbols, solved, programs, outcome


def forgetgol(
    bk: Program,
    registry: PrimitiveRegistry,
    sig: Signature,
    corpus: TaskCorpus,
    cfg: MultiTaskConfig = MultiTaskConfig(),
    metarules: Optional[MetaruleSet] = None,
) -> MultiTaskResult:
    """Run depth-staged dependent learning with forgetting over a corpus.

    Forgetting runs at the start of every depth and produces the signature
    the learner searches with; the master signature keeps everything ever
    admitted, so a symbol forgotten at one depth is reconsidered at the
    next.  Solved tasks are never re-attempted; timeouts and exhausted
    searches are retried at the next depth with a larger clause budget and
    richer background knowledge.
    """
    rules = metarules or standard_set()
    master = sig.copy()
    store = bk
    remaining = list(corpus.tasks)
    programs: dict[str, Program] = {}
    reports: list[DepthReport] = []

    for depth in range(1, cfg.max_d + 1):
        effective = apply_forgetting(
            cfg.strategy, master, store, rules.m, rules.j, cfg.max_d
        )
        forgotten = tuple(
            s.name for s in master if not any(k == s for k in effective)
        )
        bk_before, sig_before = store.size, len(effective)

        new_syms, solved, learned, outcome = learn_depth(
            store,
            registry,
            effective,
            remaining,
            depth,
            cfg.search,
            cfg.parallelism,
            rules,
        )

        for task, program in learned:
            store = store.extended(program.clauses)
            programs[task.name] = program
        for s in new_syms:
            master.add(s)
        solved_names = {t.name for t in solved}
        remaining = [t for t in remaining if t.name not in solved_names]

        reports.append(
            DepthReport(
                depth=depth,
                solved=tuple(t.name for t in solved),
                task_seconds={t.name: r.elapsed for t, r in outcome.items()},
                statuses={t.name: r.status.value for t, r in outcome.items()},
                bk_before=bk_before,
                bk_after=store.size,
                sig_before=sig_before,
                sig_after=len(master),
                forgotten=forgotten,
            )
        )

    final_effective = apply_forgetting(
        cfg.strategy, master, store, rules.m, rules.j, cfg.max_d
    )
    return MultiTaskResult(
        programs=programs,
        reports=tuple(reports),
        bk=store,
        signature=master,
        effective_signature=final_effective,
        unsolved=tuple(t.name for t in remaining),
    )
