"""Experiment harness: corpus generation, strategy comparison, CSV metrics.

A run compares learning strategies on identical corpora: for every
(task count, repetition) cell one corpus is generated from a derived seed
and shared by all strategies, so comparisons are paired.  Strategies are
the three multi-task modes (remember-all, syntactical and statistical
forgetting) plus a single-task baseline that learns every task from a
fresh primitive signature with no reuse.

Budgets are deterministic: the per-size-bound timeout is enforced both as
a wall-clock deadline and as a resolution-step cap derived from it at a
fixed steps-per-second rate.  The step cap is calibrated to bind first,
so solve outcomes (and hence all count and percentage columns) are
reproducible run to run; wall time alone would flip borderline tasks.
"""

from __future__ import annotations

import hashlib
import re
import time
from dataclasses import dataclass
from typing import Iterable, Optional

from .domains import gen_tasks, get_domain
from .engine import LearnTask, SearchConfig, metagol
from .forgetting import ForgetStrategy
from .logic import Program, Symbol, SymbolKind, is_ground
from .multitask import MultiTaskConfig, MultiTaskResult, TaskCorpus, forgetgol
from .syntax import SymbolTable, format_atom, _Parser

# Nominal engine speed used to turn a timeout in seconds into a step cap.
# Deliberately below what the engine actually sustains, so the cap is the
# binding (deterministic) budget and the wall deadline is a backstop.
STEPS_PER_SECOND = 120_000

STRATEGIES = ("none", "syn", "stat", "single")

_STRATEGY_MAP = {
    "none": ForgetStrategy.NONE,
    "syn": ForgetStrategy.SYNTACTICAL,
    "stat": ForgetStrategy.STATISTICAL,
}

CSV_HEADER = (
    "domain,strategy,n_tasks,rep,pct_solved,mean_learn_time_s,total_wall_s,"
    "final_bk_clauses,final_sig_size,forgotten_count"
)


@dataclass(frozen=True)
class ExperimentConfig:
    domain: str = "robot"
    counts: "tuple[int, ...]" = (50, 100, 200, 400)
    reps: int = 3
    seed: int = 0
    strategies: "tuple[str, ...]" = STRATEGIES
    timeout: float = 5.0  # per task per search depth, seconds
    max_d: int = 6
    parallelism: int = 1
    steps_per_second: int = STEPS_PER_SECOND

    def __post_init__(self) -> None:
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if list(self.counts) != sorted(self.counts):
            raise ValueError("task counts must be ascending")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise ValueError(f"unknown strategies {unknown}; expected {STRATEGIES}")


@dataclass(frozen=True)
class ResultRow:
    domain: str
    strategy: str
    n_tasks: int
    rep: int
    pct_solved: float
    mean_learn_time_s: float
    total_wall_s: float
    final_bk_clauses: int
    final_sig_size: int
    forgotten_count: int


@dataclass(frozen=True)
class CorpusRun:
    row: ResultRow
    result: Optional[MultiTaskResult]  # None in single-task mode


def derive_seed(seed: int, n_tasks: int, rep: int) -> int:
    """Stable corpus seed shared by every strategy at one (count, rep) cell."""
    digest = hashlib.blake2b(f"{seed}|{n_tasks}|{rep}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def search_config(timeout: float, steps_per_second: int = STEPS_PER_SECOND) -> SearchConfig:
    return SearchConfig(
        max_size=6,
        deadline=timeout,
        step_cap=max(1, int(timeout * steps_per_second)),
    )


def _single_attempt(args):
    registry, sig, task, cfg = args
    return metagol(Program(), registry, sig, task, cfg)


def run_corpus(
    corpus: TaskCorpus,
    strategy: str,
    timeout: float = 5.0,
    max_d: int = 6,
    parallelism: int = 1,
    rep: int = 0,
    steps_per_second: int = STEPS_PER_SECOND,
) -> CorpusRun:
    """Run one strategy over one corpus and summarize it as a ResultRow.

    Per-task learning time sums the task's attempts across depths; a
    timed-out attempt contributes its measured wall time, which sits at
    the enforced deadline.  The mean averages over all attempted tasks,
    solved or not.
    """
    spec = get_domain(corpus.domain)
    registry = spec.registry()
    base_cfg = search_config(timeout, steps_per_second)
    started = time.monotonic()

    if strategy == "single":
        cfg = SearchConfig(
            max_size=max_d,
            deadline=base_cfg.deadline,
            step_cap=base_cfg.step_cap,
        )
        jobs = [(registry, spec.signature(), t, cfg) for t in corpus.tasks]
        if parallelism > 1 and len(jobs) > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                results = list(pool.map(_single_attempt, jobs, chunksize=1))
        else:
            results = [_single_attempt(j) for j in jobs]
        solved = sum(1 for r in results if r.solved)
        times = [r.elapsed for r in results]
        row = ResultRow(
            domain=corpus.domain,
            strategy=strategy,
            n_tasks=len(corpus),
            rep=rep,
            pct_solved=100.0 * solved / len(corpus),
            mean_learn_time_s=sum(times) / len(times),
            total_wall_s=time.monotonic() - started,
            final_bk_clauses=0,
            final_sig_size=len(spec.signature()),
            forgotten_count=0,
        )
        return CorpusRun(row, None)

    if strategy not in _STRATEGY_MAP:
        raise ValueError(f"unknown strategy {strategy!r}")
    cfg = MultiTaskConfig(
        max_d=max_d,
        strategy=_STRATEGY_MAP[strategy],
        search=base_cfg,
        parallelism=parallelism,
    )
    result = forgetgol(Program(), registry, spec.signature(), corpus, cfg)
    per_task: dict[str, float] = {}
    for report in result.reports:
        for name, seconds in report.task_seconds.items():
            per_task[name] = per_task.get(name, 0.0) + seconds
    times = [per_task.get(t.name, 0.0) for t in corpus.tasks]
    solved = len(result.programs)
    row = ResultRow(
        domain=corpus.domain,
        strategy=strategy,
        n_tasks=len(corpus),
        rep=rep,
        pct_solved=100.0 * solved / len(corpus),
        mean_learn_time_s=sum(times) / len(times) if times else 0.0,
        total_wall_s=time.monotonic() - started,
        final_bk_clauses=result.bk.size,
        final_sig_size=len(result.effective_signature),
        forgotten_count=len(result.signature) - len(result.effective_signature),
    )
    return CorpusRun(row, result)


def run_experiment(cfg: ExperimentConfig) -> "list[ResultRow]":
    """Full strategy comparison: rows for every (strategy, count, rep) cell
    in deterministic order, with corpora paired across strategies."""
    rows: list[ResultRow] = []
    for strategy in cfg.strategies:
        for n_tasks in cfg.counts:
            for rep in range(cfg.reps):
                corpus = gen_tasks(cfg.domain, n_tasks, derive_seed(cfg.seed, n_tasks, rep))
                run = run_corpus(
                    corpus,
                    strategy,
                    timeout=cfg.timeout,
                    max_d=cfg.max_d,
                    parallelism=cfg.parallelism,
                    rep=rep,
                    steps_per_second=cfg.steps_per_second,
                )
                rows.append(run.row)
    return rows


# ---------------------------------------------------------------------------
# CSV and corpus files
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def emit_csv(rows: Iterable[ResultRow], path) -> None:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    r.domain,
                    r.strategy,
                    r.n_tasks,
                    r.rep,
                    r.pct_solved,
                    r.mean_learn_time_s,
                    r.total_wall_s,
                    r.final_bk_clauses,
                    r.final_sig_size,
                    r.forgotten_count,
                )
            )
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class CorpusFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_TASK_LINE = re.compile(r"task\s+(\w+)\s+(\w+)\s+pos:\s+(.*)$")


def write_corpus(corpus: TaskCorpus, path) -> None:
    """One task per line: `task <name> <domain> pos: <target>(<s1>,<s2>).`
    Only one-shot tasks (single positive, no negatives) are representable."""
    lines = []
    for task in corpus.tasks:
        if len(task.positives) != 1 or task.negatives:
            raise ValueError(f"task {task.name!r} is not one-shot; cannot serialize")
        lines.append(f"task {task.name} {corpus.domain} pos: {format_atom(task.positives[0])}.")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))


def parse_corpus(path) -> TaskCorpus:
    tasks: list[LearnTask] = []
    domain: Optional[str] = None
    with open(path) as fh:
        raw_lines = fh.read().splitlines()
    for line_no, line in enumerate(raw_lines, start=1):
        if not line.strip():
            continue
        m = _TASK_LINE.fullmatch(line.strip())
        if m is None:
            raise CorpusFormatError(line_no, f"malformed task line: {line!r}")
        name, line_domain, atom_text = m.groups()
        if domain is None:
            domain = line_domain
        elif domain != line_domain:
            raise CorpusFormatError(line_no, f"mixed domains {domain!r} and {line_domain!r}")
        try:
            get_domain(line_domain)
        except Exception as exc:
            raise CorpusFormatError(line_no, str(exc))
        if not atom_text.endswith("."):
            raise CorpusFormatError(line_no, "missing final '.'")
        symbols = SymbolTable((Symbol(name, 2, SymbolKind.TARGET),))
        try:
            parser = _Parser(atom_text[:-1], symbols)
            atom = parser.parse_atom()
            if not parser.at_end():
                raise CorpusFormatError(line_no, "trailing input after example atom")
        except CorpusFormatError:
            raise
        except ValueError as exc:
            raise CorpusFormatError(line_no, str(exc))
        if atom.predicate.name != name:
            raise CorpusFormatError(line_no, f"example predicate {atom.predicate.name!r} != task {name!r}")
        if not all(is_ground(t) for t in atom.args):
            raise CorpusFormatError(line_no, "example atom must be ground")
        tasks.append(LearnTask(atom.predicate, (atom,)))
    if domain is None:
        raise CorpusFormatError(0, "empty corpus file")
    return TaskCorpus(tuple(tasks), domain)
