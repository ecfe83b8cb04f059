"""Definite-clause logic core.

Terms, atoms, clauses and programs are immutable values.  Proof search is
SLD resolution (left-to-right goal selection, clause order, depth first)
over a clause program plus a registry of host-evaluated primitive
relations.  Every search is bounded by a Budget combining a resolution
step cap, an optional wall-clock deadline and a goal-nesting depth cap,
so callers can always distinguish "refuted" from "ran out of budget".
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

# Deep proofs suspend one generator frame per pending goal; the default
# interpreter limit is too small for legitimate chains of learned clauses.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 50_000))


class LogicError(Exception):
    """Malformed logical object or ill-posed request."""


# ---------------------------------------------------------------------------
# Symbols and terms
# ---------------------------------------------------------------------------

class SymbolKind(Enum):
    PRIMITIVE = "primitive"
    FACT = "fact"
    LEARNED = "learned"
    INVENTED = "invented"
    TARGET = "target"


@dataclass(frozen=True, slots=True, eq=False)
class Symbol:
    """A predicate symbol: unique name, arity 1 or 2, and a role kind."""

    name: str
    arity: int
    kind: SymbolKind
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self) -> None:
        if self.arity not in (1, 2):
            raise LogicError(f"arity must be 1 or 2, got {self.arity} for {self.name!r}")
        object.__setattr__(self, "_hash", hash((self.name, self.arity, self.kind.value)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Symbol)
            and self.name == other.name
            and self.arity == other.arity
            and self.kind is other.kind
        )

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True, slots=True)
class Var:
    id: Union[int, str]

    def __repr__(self) -> str:
        return f"?{self.id}"


@dataclass(frozen=True, slots=True)
class Int:
    value: int

    def __repr__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True, eq=False)
class Struct:
    functor: str
    args: "tuple[Term, ...]"
    # both derived at construction (immutable args keep them accurate):
    # groundness lets the occurs check and apply() skip large subterms,
    # the cached hash makes the frequent state comparisons cheap
    ground: bool = field(init=False, compare=False, default=False)
    _hash: int = field(init=False, compare=False, default=0)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "ground",
            all(
                not isinstance(a, Var) and (not isinstance(a, Struct) or a.ground)
                for a in self.args
            ),
        )
        object.__setattr__(self, "_hash", hash((self.functor, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, Struct)
            and self._hash == other._hash
            and self.functor == other.functor
            and self.args == other.args
        )

    def __repr__(self) -> str:
        return f"{self.functor}({','.join(map(repr, self.args))})"


Term = Union[Var, Int, Const, Struct]

# Substitutions are triangular: a binding image may mention other bound
# variables and is resolved transitively by apply().  Treated as immutable;
# unify returns fresh dicts.
Substitution = dict


def is_ground(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Struct):
        return t.ground
    return True


def term_vars(t: Term, acc: Optional[list] = None) -> list:
    """Variables of a term in first-occurrence order."""
    if acc is None:
        acc = []
    if isinstance(t, Var):
        if t not in acc:
            acc.append(t)
    elif isinstance(t, Struct):
        for a in t.args:
            term_vars(a, acc)
    return acc


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: Symbol
    args: "tuple[Term, ...]"

    def __post_init__(self) -> None:
        if len(self.args) != self.predicate.arity:
            raise LogicError(
                f"{self.predicate!r} applied to {len(self.args)} arguments"
            )

    def __repr__(self) -> str:
        return f"{self.predicate.name}({','.join(map(repr, self.args))})"


@dataclass(frozen=True, slots=True)
class Clause:
    """A definite clause.  Facts have an empty body.

    A target-kind body predicate is only meaningful inside the hypothesis
    currently defining it (recursion, possibly through invented helpers);
    foreign unsolved targets are kept out structurally, since they are
    never admitted to any signature.
    """

    head: Atom
    body: "tuple[Atom, ...]" = ()

    def __post_init__(self) -> None:
        if self.head.predicate.kind is SymbolKind.PRIMITIVE:
            raise LogicError(f"primitive {self.head.predicate!r} cannot head a clause")

    def __repr__(self) -> str:
        if not self.body:
            return f"{self.head!r}."
        return f"{self.head!r} :- {','.join(map(repr, self.body))}."


def atom_vars(a: Atom, acc: Optional[list] = None) -> list:
    if acc is None:
        acc = []
    for t in a.args:
        term_vars(t, acc)
    return acc


def clause_vars(c: Clause) -> list:
    acc = atom_vars(c.head)
    for b in c.body:
        atom_vars(b, acc)
    return acc


class Program:
    """An ordered, immutable set of clauses indexed by head symbol.

    The size of a program (its cost as a hypothesis) is its clause count.
    """

    __slots__ = ("clauses", "_index")

    def __init__(self, clauses: Iterable[Clause] = ()):
        self.clauses: tuple[Clause, ...] = tuple(clauses)
        index: dict[Symbol, list[Clause]] = {}
        for c in self.clauses:
            index.setdefault(c.head.predicate, []).append(c)
        self._index = {s: tuple(cs) for s, cs in index.items()}

    @property
    def size(self) -> int:
        return len(self.clauses)

    def clauses_for(self, symbol: Symbol) -> "tuple[Clause, ...]":
        return self._index.get(symbol, ())

    def defines(self, symbol: Symbol) -> bool:
        return symbol in self._index

    def head_symbols(self) -> "tuple[Symbol, ...]":
        return tuple(self._index)

    def extended(self, extra: Iterable[Clause]) -> "Program":
        return Program(self.clauses + tuple(extra))

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Program) and self.clauses == other.clauses

    def __repr__(self) -> str:
        return f"Program({len(self.clauses)} clauses)"


# ---------------------------------------------------------------------------
# Unification and substitution application
# ---------------------------------------------------------------------------

def walk(t: Term, theta: Mapping) -> Term:
    """Dereference a variable through the substitution chain."""
    while isinstance(t, Var):
        bound = theta.get(t.id)
        if bound is None:
            return t
        t = bound
    return t


def _occurs(vid, t: Term, theta: Mapping) -> bool:
    t = walk(t, theta)
    if isinstance(t, Var):
        return t.id == vid
    if isinstance(t, Struct) and not t.ground:
        return any(_occurs(vid, a, theta) for a in t.args)
    return False


def _unify_into(a: Term, b: Term, theta: dict, occurs_check: bool) -> bool:
    a = walk(a, theta)
    b = walk(b, theta)
    if a is b:
        return True
    if isinstance(a, Var):
        if isinstance(b, Var) and b.id == a.id:
            return True
        if occurs_check and _occurs(a.id, b, theta):
            return False
        theta[a.id] = b
        return True
    if isinstance(b, Var):
        if occurs_check and _occurs(b.id, a, theta):
            return False
        theta[b.id] = a
        return True
    if isinstance(a, Int):
        return isinstance(b, Int) and a.value == b.value
    if isinstance(a, Const):
        return isinstance(b, Const) and a.name == b.name
    if isinstance(a, Struct):
        if (
            not isinstance(b, Struct)
            or a.functor != b.functor
            or len(a.args) != len(b.args)
        ):
            return False
        for x, y in zip(a.args, b.args):
            if not _unify_into(x, y, theta, occurs_check):
                return False
        return True
    return False


def unify(a, b, theta: Optional[Mapping] = None, occurs_check: bool = True):
    """Most general unifier of two terms or two atoms, extending theta.

    Returns the extended substitution, or None when no unifier exists.
    The input substitution is never mutated.
    """
    out = dict(theta) if theta else {}
    if isinstance(a, Atom) and isinstance(b, Atom):
        if a.predicate != b.predicate:
            return None
        for x, y in zip(a.args, b.args):
            if not _unify_into(x, y, out, occurs_check):
                return None
        return out
    if not _unify_into(a, b, out, occurs_check):
        return None
    return out


def apply(theta: Mapping, x):
    """Apply a substitution transitively to a term, atom or clause."""
    if isinstance(x, Atom):
        return Atom(x.predicate, tuple(apply(theta, t) for t in x.args))
    if isinstance(x, Clause):
        return Clause(apply(theta, x.head), tuple(apply(theta, b) for b in x.body))
    t = walk(x, theta)
    if isinstance(t, Struct) and not t.ground:
        return Struct(t.functor, tuple(apply(theta, a) for a in t.args))
    return t


def rename_clause(c: Clause, counter: "list[int]") -> Clause:
    """Standardize a clause apart with fresh integer-id variables."""
    mapping: dict = {}

    def ren(t: Term) -> Term:
        if isinstance(t, Var):
            nv = mapping.get(t.id)
            if nv is None:
                counter[0] += 1
                nv = Var(counter[0])
                mapping[t.id] = nv
            return nv
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(ren(a) for a in t.args))
        return t

    def ren_atom(a: Atom) -> Atom:
        return Atom(a.predicate, tuple(ren(t) for t in a.args))

    return Clause(ren_atom(c.head), tuple(ren_atom(b) for b in c.body))


def _canonical_var_name(i: int) -> str:
    return chr(ord("A") + i) if i < 26 else f"V{i}"


def rename_vars(x, mapping: Mapping):
    """Structural one-shot rename of variables (no transitive walking, so
    identity entries are fine, unlike apply)."""
    if isinstance(x, Clause):
        return Clause(rename_vars(x.head, mapping), tuple(rename_vars(b, mapping) for b in x.body))
    if isinstance(x, Atom):
        return Atom(x.predicate, tuple(rename_vars(t, mapping) for t in x.args))
    if isinstance(x, Var):
        return mapping.get(x.id, x)
    if isinstance(x, Struct):
        if x.ground:
            return x
        return Struct(x.functor, tuple(rename_vars(a, mapping) for a in x.args))
    return x


def canonical_clause(c: Clause) -> Clause:
    """Alpha-canonical form: variables renamed A, B, C ... in first-occurrence
    order (head arguments first, then body literals left to right).  Body
    literal order is preserved."""
    mapping = {v.id: Var(_canonical_var_name(i)) for i, v in enumerate(clause_vars(c))}
    return rename_vars(c, mapping)


# ---------------------------------------------------------------------------
# Primitive registry
# ---------------------------------------------------------------------------

_TRANSITION = "transition"
_FLUENT = "fluent"
_FACTS = "facts"


class PrimitiveRegistry:
    """Host-evaluated relations available during proofs.

    Three evaluator shapes are supported:

    * a deterministic partial transition function for dyadic actions,
      mapping a ground state term to at most one successor;
    * a boolean state predicate for monadic fluents;
    * an extensional fact table (tuples of ground terms).

    Transition and fluent evaluators require their input argument to be
    ground; a non-ground call fails rather than enumerating preimages.
    """

    def __init__(self) -> None:
        self._entries: dict[Symbol, tuple] = {}

    def register_transition(self, symbol: Symbol, fn: Callable[[Term], Optional[Term]]) -> None:
        if symbol.arity != 2:
            raise LogicError(f"transition {symbol!r} must be dyadic")
        self._register(symbol, (_TRANSITION, fn))

    def register_fluent(self, symbol: Symbol, fn: Callable[[Term], bool]) -> None:
        if symbol.arity != 1:
            raise LogicError(f"fluent {symbol!r} must be monadic")
        self._register(symbol, (_FLUENT, fn))

    def register_facts(self, symbol: Symbol, rows: Iterable[tuple]) -> None:
        table = tuple(tuple(row) for row in rows)
        for row in table:
            if len(row) != symbol.arity:
                raise LogicError(f"fact row {row!r} does not match {symbol!r}")
            if not all(is_ground(t) for t in row):
                raise LogicError(f"fact row {row!r} is not ground")
        self._register(symbol, (_FACTS, table))

    def _register(self, symbol: Symbol, entry: tuple) -> None:
        if symbol in self._entries:
            raise LogicError(f"{symbol!r} registered twice")
        self._entries[symbol] = entry

    def get(self, symbol: Symbol):
        return self._entries.get(symbol)

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in self._entries

    def symbols(self) -> "tuple[Symbol, ...]":
        return tuple(self._entries)


EMPTY_REGISTRY = PrimitiveRegistry()


# ---------------------------------------------------------------------------
# Budgets
# ---------------------------------------------------------------------------

class BudgetExhausted(Exception):
    """Raised when a proof hits its step cap or wall-clock deadline."""


class Budget:
    """Shared resource meter for one search.

    steps     -- remaining resolution steps; exhaustion aborts the search.
    deadline  -- optional wall-clock limit in seconds from construction.
    depth_cap -- maximum goal-nesting depth; exceeding it fails only the
                 current branch but records that pruning happened, so the
                 caller cannot mistake a pruned search for a refutation.
    """

    __slots__ = ("steps", "step_cap", "deadline", "depth_cap", "depth_cut")

    def __init__(
        self,
        step_cap: int = 1_000_000,
        deadline: Optional[float] = None,
        depth_cap: int = 600,
    ):
        self.step_cap = step_cap
        self.steps = step_cap
        self.deadline = None if deadline is None else time.monotonic() + deadline
        self.depth_cap = depth_cap
        self.depth_cut = False

    def tick(self) -> None:
        self.steps -= 1
        if self.steps < 0:
            raise BudgetExhausted("step cap")
        if (
            self.deadline is not None
            and (self.steps & 0xFF) == 0
            and time.monotonic() > self.deadline
        ):
            raise BudgetExhausted("deadline")

    @property
    def steps_used(self) -> int:
        return self.step_cap - self.steps


# ---------------------------------------------------------------------------
# SLD proof search
# ---------------------------------------------------------------------------

class ProofStatus(Enum):
    PROVEN = "proven"
    REFUTED = "refuted"
    EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True, slots=True)
class ProofResult:
    status: ProofStatus
    steps_used: int
    bindings: Optional[dict] = None

    @property
    def proven(self) -> bool:
        return self.status is ProofStatus.PROVEN


class _SearchState:
    __slots__ = ("program", "registry", "budget", "occurs_check", "counter")

    def __init__(self, program, registry, budget, occurs_check):
        self.program = program
        self.registry = registry or EMPTY_REGISTRY
        self.budget = budget
        self.occurs_check = occurs_check
        self.counter = [0]


def _resolve_atom(a: Atom, theta: Mapping) -> Atom:
    if not theta:
        return a
    return Atom(a.predicate, tuple(apply(theta, t) for t in a.args))


def _sld(st: _SearchState, goals: tuple, theta: dict, depth: int) -> Iterator[dict]:
    if not goals:
        yield theta
        return
    st.budget.tick()
    if depth >= st.budget.depth_cap:
        st.budget.depth_cut = True
        return
    goal, rest = goals[0], goals[1:]
    sym = goal.predicate

    entry = st.registry.get(sym)
    if entry is not None:
        tag, payload = entry
        if tag == _TRANSITION:
            state_in = apply(theta, goal.args[0])
            if not is_ground(state_in):
                return
            succ = payload(state_in)
            if succ is None:
                return
            out = walk(goal.args[1], theta)
            if isinstance(out, Var):
                theta2 = dict(theta)
                theta2[out.id] = succ
                yield from _sld(st, rest, theta2, depth + 1)
            elif is_ground(out):
                if out == succ:
                    yield from _sld(st, rest, theta, depth + 1)
            else:
                theta2 = unify(out, succ, theta, st.occurs_check)
                if theta2 is not None:
                    yield from _sld(st, rest, theta2, depth + 1)
        elif tag == _FLUENT:
            arg = apply(theta, goal.args[0])
            if is_ground(arg) and payload(arg):
                yield from _sld(st, rest, theta, depth + 1)
        else:  # fact table
            for row in payload:
                theta2 = dict(theta)
                ok = True
                for pattern, value in zip(goal.args, row):
                    if not _unify_into(pattern, value, theta2, st.occurs_check):
                        ok = False
                        break
                if ok:
                    yield from _sld(st, rest, theta2, depth + 1)
        return

    for clause in st.program.clauses_for(sym):
        st.budget.tick()
        renamed = rename_clause(clause, st.counter)
        theta2 = unify(goal, renamed.head, theta, st.occurs_check)
        if theta2 is None:
            continue
        yield from _sld(st, renamed.body + rest, theta2, depth + 1)


def solve(
    goals: Iterable[Atom],
    program: Program,
    registry: Optional[PrimitiveRegistry] = None,
    budget: Optional[Budget] = None,
    theta: Optional[Mapping] = None,
    occurs_check: bool = True,
    depth: int = 0,
) -> Iterator[dict]:
    """Enumerate answer substitutions for a conjunction of goals.

    Raises BudgetExhausted when the step cap or deadline is hit.  When the
    iterator finishes without raising, the enumeration was exhaustive
    unless budget.depth_cut was set along the way.
    """
    st = _SearchState(program, registry, budget or Budget(), occurs_check)
    yield from _sld(st, tuple(goals), dict(theta) if theta else {}, depth)


def prove(
    goals: Iterable[Atom],
    program: Program,
    registry: Optional[PrimitiveRegistry] = None,
    budget: Optional[Budget] = None,
    occurs_check: bool = True,
) -> ProofResult:
    """Decide a conjunction of goals within a budget.

    PROVEN is sound: the goals are entailed by the program together with
    the registry semantics.  REFUTED means the bounded search space was
    exhausted with no proof and no branch was depth-pruned.  EXHAUSTED is
    "unknown": the budget ran out first (callers must not read it as a
    refutation).
    """
    budget = budget or Budget()
    try:
        for theta in solve(goals, program, registry, budget, occurs_check=occurs_check):
            return ProofResult(ProofStatus.PROVEN, budget.steps_used, theta)
    except BudgetExhausted:
        return ProofResult(ProofStatus.EXHAUSTED, budget.steps_used)
    if budget.depth_cut:
        return ProofResult(ProofStatus.EXHAUSTED, budget.steps_used)
    return ProofResult(ProofStatus.REFUTED, budget.steps_used)
