"""Hypothesis-space and sample-complexity calculators, with brute-force
enumeration oracles that validate them at small scale.

For m metarules of at most j body literals over p predicate symbols there
are at most m*p^(j+1) distinct clauses, so at most (m*p^(j+1))^n programs
of n clauses; the enumerator counts the arity-aware space exactly and
never exceeds that bound.  Shrinking p to r*p shrinks the space by
r^((j+1)n) and the matching sample-complexity bound by (j+1)n*ln(r)/eps.

Counts are exact big integers; the real-valued bounds are evaluated in
double precision (tests allow 1e-9 relative error).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .engine import LearnTask, SearchConfig, metagol
from .forgetting import Signature
from .logic import Clause, PrimitiveRegistry, Program, Symbol, SymbolKind
from .metarules import MetaruleSet, project, standard_set


class CapExceededError(RuntimeError):
    """An enumeration request would exceed its configured size cap."""


@dataclass(frozen=True, slots=True)
class BoundParams:
    """Validated parameter bag for the closed-form bounds."""

    m: int
    p: int
    j: int
    n: int
    p_reduced: Optional[int] = None
    eps: Optional[float] = None
    delta: Optional[float] = None
    k: Optional[int] = None

    def __post_init__(self) -> None:
        if min(self.m, self.p, self.j, self.n) < 1:
            raise ValueError("m, p, j, n must all be at least 1")
        if self.p_reduced is not None and not 0 < self.p_reduced <= self.p:
            raise ValueError("p_reduced must be in 1..p")
        for name in ("eps", "delta"):
            v = getattr(self, name)
            if v is not None and not 0 < v < 1:
                raise ValueError(f"{name} must be in (0, 1)")
        if self.k is not None and not 1 <= self.k <= self.n:
            raise ValueError("k must be in 1..n")

    @property
    def r(self) -> float:
        if self.p_reduced is None:
            raise ValueError("no reduced symbol count given")
        return self.p_reduced / self.p


def hspace_size(m: int, p: int, j: int, n: int) -> int:
    """Upper bound (m*p^(j+1))^n on the number of n-clause programs,
    as an exact integer.  n = 0 gives 1 (the empty program)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return (m * p ** (j + 1)) ** n


def sample_complexity(m: int, p: int, j: int, n: int, eps: float, delta: float) -> float:
    """Number of examples sufficient for error eps at confidence delta:
    (1/eps) * (n ln m + (j+1) n ln p + ln(1/delta))."""
    return (n * math.log(m) + (j + 1) * n * math.log(p) + math.log(1.0 / delta)) / eps


def reduction_factor(r: float, j: int, n: int) -> float:
    """Multiplicative hypothesis-space shrinkage r^((j+1)n) when the
    symbol count drops to a fraction r."""
    if not 0 < r <= 1:
        raise ValueError("r must be in (0, 1]")
    return r ** ((j + 1) * n)


def sample_reduction(r: float, j: int, n: int) -> float:
    """Signed additive change (j+1) n ln(r) to the sample-complexity bound
    numerator; non-positive, since r <= 1."""
    if not 0 < r <= 1:
        raise ValueError("r must be in (0, 1]")
    return (j + 1) * n * math.log(r)


# ---------------------------------------------------------------------------
# Enumeration oracles
# ---------------------------------------------------------------------------

def clause_space(
    metarules: MetaruleSet,
    head_symbols,
    body_symbols,
) -> "list[Clause]":
    """All clauses projectable from the metarules with heads drawn from
    head_symbols and body predicates from body_symbols, arity-aware, in
    deterministic order (rule order, then symbol order per slot)."""
    clauses: list[Clause] = []
    for rule in metarules:
        heads = [s for s in head_symbols if s.arity == rule.head.arity]
        slots = [
            [s for s in body_symbols if s.arity == rule.var_arities()[v]]
            for v in rule.predicate_vars()[1:]
        ]
        for head in heads:
            for combo in itertools.product(*slots):
                mu = dict(zip(rule.predicate_vars(), (head, *combo)))
                clauses.append(project(rule, mu))
    return clauses


@dataclass(frozen=True, slots=True)
class HypothesisCount:
    clauses: int
    ordered: int  # ordered n-tuples of clauses, the quantity the bound counts
    distinct_sets: int  # n-element clause sets (duplicate-free programs)


def enumerate_hypotheses(
    metarules: MetaruleSet,
    symbols,
    n: int,
    include_programs: bool = False,
    cap: int = 5_000_000,
):
    """Exact arity-aware count of the n-clause hypothesis space over a
    signature, every predicate position (head included) ranging over the
    given symbols.

    Returns a HypothesisCount, or (HypothesisCount, programs) with the
    distinct-set programs materialized when include_programs is set; the
    latter needs head-eligible symbol kinds since clauses are projected.
    Always bounded by hspace_size(m, p, j, n).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    symbols = list(symbols)
    if hspace_size(len(metarules), max(len(symbols), 1), metarules.j, max(n, 1)) > cap:
        raise CapExceededError("hypothesis space exceeds the enumeration cap")
    c = 0
    for rule in metarules:
        arities = rule.var_arities()
        per_rule = 1
        for var in rule.predicate_vars():
            per_rule *= sum(1 for s in symbols if s.arity == arities[var])
        c += per_rule
    count = HypothesisCount(c, c**n, math.comb(c, n))
    if not include_programs:
        return count
    clauses = clause_space(metarules, symbols, symbols)
    assert len(clauses) == c
    programs = [Program(combo) for combo in itertools.combinations(clauses, n)]
    return count, programs


def iter_candidate_programs(
    metarules: MetaruleSet,
    signature_symbols,
    target: Symbol,
    max_size: int,
    cap: int = 2_000_000,
    invented_prefix: str = "aux",
) -> Iterator[Program]:
    """Enumerate every candidate hypothesis of 1..max_size clauses for a
    target: heads are the target or invented symbols, bodies range over
    the signature, the target and the invented symbols.

    This mirrors the learner's space combinatorially (clause sets, not a
    proof search) so it can serve as an independent minimality oracle.
    Programs that fail to define the target, or use an invented symbol
    without defining it (or vice versa), are skipped.
    """
    emitted = 0
    sig = list(signature_symbols)
    for size in range(1, max_size + 1):
        invented = tuple(
            Symbol(f"{target.name}_{invented_prefix}{k}", 2, SymbolKind.INVENTED)
            for k in range(1, size)
        )
        heads = (target,) + invented
        bodies = sig + [target] + list(invented)
        clauses = clause_space(metarules, heads, bodies)
        if math.comb(len(clauses), size) + emitted > cap:
            raise CapExceededError(
                f"program space at size {size} exceeds cap {cap}"
            )
        for combo in itertools.combinations(clauses, size):
            defined = {c.head.predicate for c in combo}
            if target not in defined:
                continue
            used = {b.predicate for c in combo for b in c.body}
            aux_used = {s for s in used if s.kind is SymbolKind.INVENTED}
            aux_defined = defined - {target}
            if aux_used != aux_defined:
                continue
            emitted += 1
            yield Program(combo)


def minimal_signature(
    task: LearnTask,
    sig: Signature,
    registry: PrimitiveRegistry,
    cfg: SearchConfig = SearchConfig(max_size=3),
    bk: Optional[Program] = None,
    metarules: Optional[MetaruleSet] = None,
) -> Optional[Signature]:
    """Smallest subsignature under which the learner still finds a program
    of the same optimal size, by exhaustive subset search ordered by
    cardinality.  Returns None when the task is unsolvable under the full
    signature (distinct from an empty signature sufficing).

    Deciding this optimally is NP-hard, hence the small-signature guard.
    """
    symbols = list(sig)
    if len(symbols) > 12:
        raise ValueError("subset search needs |signature| <= 12")
    bk = bk if bk is not None else Program()
    rules = metarules or standard_set()
    base = metagol(bk, registry, sig, task, cfg, rules)
    if not base.solved:
        return None
    optimal = base.program.size
    for k in range(len(symbols) + 1):
        for subset in itertools.combinations(symbols, k):
            candidate = _bare_signature(subset)
            result = metagol(bk, registry, candidate, task, cfg, rules)
            if result.solved and result.program.size == optimal:
                return candidate
    return None


def _bare_signature(symbols) -> Signature:
    """Subset signature with nothing protected, so the subset search can
    genuinely probe below the primitive set."""
    return Signature(protected=(), learned=symbols)
