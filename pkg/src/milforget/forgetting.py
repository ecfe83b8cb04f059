"""Signature-reduction strategies.

The signature is the set of predicate symbols a hypothesis body may use.
Multi-task learning grows it with every solved task; these strategies
shrink it again.  Forgetting only ever touches the signature, never the
clause store: a forgotten symbol's program stays in the background
knowledge and the symbol reappears if it is learned again.

Three strategies:

* none        -- keep everything (the remember-all baseline);
* syntactical -- unfold invented predicates away, then drop any symbol
                 whose unfolded definition duplicates one already kept;
* statistical -- keep a symbol only when the expected cost of re-deriving
                 programs without it exceeds the cost of the larger search
                 space it induces.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator

from .logic import (
    Atom,
    Clause,
    LogicError,
    Program,
    Symbol,
    SymbolKind,
    canonical_clause,
    rename_clause,
    unify,
    apply,
)


class MalformedProgramError(LogicError):
    """Unfolding met a dangling invented predicate or a progress-free cycle."""


class Signature:
    """Ordered set of predicate symbols allowed in hypothesis bodies.

    Symbols registered at construction are protected: no forgetting
    strategy may drop them.  Later additions (learned and invented
    symbols) are forgettable.  Insertion order is stable and is the
    candidate order the learner searches in, so it must be deterministic.
    """

    def __init__(self, protected: Iterable[Symbol] = (), learned: Iterable[Symbol] = ()):
        self._symbols: dict[str, Symbol] = {}
        self._protected: set[str] = set()
        for s in protected:
            self._add(s)
            self._protected.add(s.name)
        for s in learned:
            self._add(s)

    def _add(self, symbol: Symbol) -> None:
        existing = self._symbols.get(symbol.name)
        if existing is None:
            self._symbols[symbol.name] = symbol
        elif existing != symbol:
            raise LogicError(f"signature name clash: {existing!r} vs {symbol!r}")

    def add(self, symbol: Symbol) -> None:
        """Add a forgettable symbol (idempotent)."""
        self._add(symbol)

    def __contains__(self, symbol: Symbol) -> bool:
        return self._symbols.get(symbol.name) == symbol

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self._symbols.values())

    def __len__(self) -> int:
        return len(self._symbols)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Signature)
            and list(self) == list(other)
            and self._protected == other._protected
        )

    def __repr__(self) -> str:
        return f"Signature({[s.name for s in self]})"

    @property
    def protected(self) -> "tuple[Symbol, ...]":
        return tuple(s for s in self if s.name in self._protected)

    @property
    def forgettable(self) -> "tuple[Symbol, ...]":
        return tuple(s for s in self if s.name not in self._protected)

    def is_protected(self, symbol: Symbol) -> bool:
        return symbol.name in self._protected

    def restricted_to(self, keep: Iterable[Symbol]) -> "Signature":
        """Subsignature keeping protected symbols plus the given ones,
        in the original insertion order."""
        keep_names = {s.name for s in keep} | self._protected
        sig = Signature.__new__(Signature)
        sig._symbols = {n: s for n, s in self._symbols.items() if n in keep_names}
        sig._protected = set(self._protected)
        return sig

    def copy(self) -> "Signature":
        return self.restricted_to(self)


class ForgetStrategy(Enum):
    NONE = "none"
    SYNTACTICAL = "syn"
    STATISTICAL = "stat"


# ---------------------------------------------------------------------------
# Unfolding
# ---------------------------------------------------------------------------

def unfold(clause: Clause, program: Program) -> "tuple[Clause, ...]":
    """Resolve away invented body predicates against their definitions.

    Expansion runs to fixpoint over the cross-product of multi-clause
    definitions.  A literal is left intact when its predicate is the
    clause's own head or is already being expanded on this path, which is
    what keeps recursive definitions finite.  A progress-free cycle
    (invented predicates defined purely by each other) raises
    MalformedProgramError, as does an invented predicate with no
    definition at all.
    """
    counter = [0]
    guard0 = frozenset((clause.head.predicate,))
    results: list[Clause] = []
    seen: set = set()

    def expand(head: Atom, items: tuple, theta: dict) -> None:
        for i, (atom, guard) in enumerate(items):
            sym = atom.predicate
            if sym.kind is not SymbolKind.INVENTED or sym in guard:
                continue
            defs = program.clauses_for(sym)
            if not defs:
                raise MalformedProgramError(f"invented {sym!r} has no definition")
            for dc in defs:
                renamed = rename_clause(dc, counter)
                goal = apply(theta, atom)
                theta2 = unify(goal, renamed.head, theta)
                if theta2 is None:
                    continue
                if (
                    len(renamed.body) == 1
                    and renamed.body[0].predicate.kind is SymbolKind.INVENTED
                    and renamed.body[0].predicate in guard | {sym}
                ):
                    raise MalformedProgramError(
                        f"cycle without progress through {sym!r}"
                    )
                inner_guard = guard | {sym}
                new_items = (
                    items[:i]
                    + tuple((b, inner_guard) for b in renamed.body)
                    + items[i + 1 :]
                )
                expand(head, new_items, theta2)
            return
        done = canonical_clause(
            Clause(apply(theta, head), tuple(apply(theta, a) for a, _ in items))
        )
        if done not in seen:
            seen.add(done)
            results.append(done)

    expand(clause.head, tuple((b, guard0) for b in clause.body), {})
    return tuple(results)


# ---------------------------------------------------------------------------
# Syntactical forgetting
# ---------------------------------------------------------------------------

def _duplicate_key(clause: Clause):
    """Canonical (head arguments, body) shape, ignoring the head symbol's
    name so definitions of different symbols can collide."""
    c = canonical_clause(clause)
    return (
        c.head.args,
        tuple((b.predicate, b.args) for b in c.body),
    )


def forget_syntactical(sig: Signature, b: Program) -> Signature:
    """Keep a forgettable symbol only if some unfolded clause of its
    definition is new with respect to everything kept so far.

    Clauses are visited in the program's insertion order, so when two
    learned programs unfold to the same thing the earlier one survives.
    Duplicate detection compares alpha-canonical head arguments and the
    body with its literal order preserved; permuted bodies do not merge.
    Protected symbols are never dropped.
    """
    seen: set = set()
    kept: list[Symbol] = []
    for clause in b.clauses:
        sym = clause.head.predicate
        if sym not in sig or sig.is_protected(sym):
            continue
        forms = unfold(clause, b)
        keys = [_duplicate_key(f) for f in forms]
        if any(k not in seen for k in keys):
            if sym not in kept:
                kept.append(sym)
            seen.update(keys)
    return sig.restricted_to(kept)


# ---------------------------------------------------------------------------
# Statistical forgetting
# ---------------------------------------------------------------------------

def pr_relevant(s: Symbol, b: Program) -> Fraction:
    """Estimated probability that s is relevant to future tasks: its
    relative reuse in clause bodies, with additive smoothing.  Exactly
    (uses + 1) / (|b| + 1)."""
    uses = sum(1 for c in b.clauses if any(a.predicate == s for a in c.body))
    return Fraction(uses + 1, len(b.clauses) + 1)


@dataclass(frozen=True, slots=True)
class CostParams:
    """Inputs to the keep/forget cost comparison for one symbol.

    m, j   -- metarule count and maximum body length;
    n      -- target program size the learner searches for;
    p      -- signature size at evaluation time;
    k      -- clause count of the symbol's definition;
    pr     -- relevance probability, an exact rational in (0, 1].
    """

    m: int
    j: int
    n: int
    p: int
    k: int
    pr: Fraction

    def __post_init__(self) -> None:
        if min(self.m, self.j, self.n, self.p, self.k) < 1:
            raise ValueError("m, j, n, p, k must all be positive")
        if not 0 < self.pr <= 1:
            raise ValueError(f"pr must be in (0, 1], got {self.pr}")


def expected_costs(cp: CostParams) -> "tuple[Fraction, int]":
    """Expected search costs (cost_keep, cost_forget) as exact numbers.

    Keeping a symbol enlarges every clause slot to p+1 choices but, when
    the symbol is relevant, shrinks the target program by its k clauses:

        cost_keep   = pr * (m*(p+1)^(j+1))^(n-k) + (1-pr) * (m*(p+1)^(j+1))^n
        cost_forget = (m * p^(j+1))^n

    The values reach ~10^22 at realistic sizes, so everything is computed
    with big integers and rationals; floating point would misorder
    near-ties.
    """
    if cp.k > cp.n:
        raise ValueError(f"definition size k={cp.k} exceeds target size n={cp.n}")
    per_clause_keep = cp.m * (cp.p + 1) ** (cp.j + 1)
    cost_keep = cp.pr * per_clause_keep ** (cp.n - cp.k) + (1 - cp.pr) * per_clause_keep**cp.n
    cost_forget = (cp.m * cp.p ** (cp.j + 1)) ** cp.n
    return cost_keep, cost_forget


def forget_statistical(sig: Signature, b: Program, m: int, j: int, n: int) -> Signature:
    """Keep a forgettable symbol iff cost_forget exceeds cost_keep.

    Each defined symbol is evaluated once, at its first defining clause in
    insertion order, with the signature size p frozen for the whole pass.
    Forgettable symbols with no definition in b are dropped; protected
    symbols always stay.
    """
    p = len(sig)
    kept: list[Symbol] = []
    evaluated: set[Symbol] = set()
    for clause in b.clauses:
        sym = clause.head.predicate
        if sym in evaluated or sym not in sig or sig.is_protected(sym):
            continue
        evaluated.add(sym)
        cp = CostParams(
            m=m,
            j=j,
            n=n,
            p=p,
            k=len(b.clauses_for(sym)),
            pr=pr_relevant(sym, b),
        )
        cost_keep, cost_forget = expected_costs(cp)
        if cost_forget > cost_keep:
            kept.append(sym)
    return sig.restricted_to(kept)


def apply_forgetting(
    strategy: ForgetStrategy,
    sig: Signature,
    b: Program,
    m: int,
    j: int,
    n: int,
) -> Signature:
    if strategy is ForgetStrategy.NONE:
        return sig
    if strategy is ForgetStrategy.SYNTACTICAL:
        return forget_syntactical(sig, b)
    if strategy is ForgetStrategy.STATISTICAL:
        return forget_statistical(sig, b, m, j, n)
    raise ValueError(f"unknown strategy {strategy!r}")
