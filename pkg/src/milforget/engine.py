"""Meta-interpretive learner.

metagol() proves the positive examples with a meta-interpreter that may
close goals in three ways, tried in this order: host primitives and
background clauses, reuse of a metasubstitution already in the program
under construction, and instantiation of a fresh metarule.  Accumulated
metasubstitutions project onto their metarules to form the hypothesis,
which must cover every positive example and no negative one.  Iterative
deepening on the clause count guarantees the returned program is minimal
within the searched space.

Predicate invention: at size bound d the search may introduce up to d-1
fresh auxiliary symbols, named `<target>_k` and offered in ascending
order so symmetric renamings are enumerated once.

Candidate order is fixed (metarules in set order, symbols in signature
insertion order, the target, invented symbols last), which makes learned
programs reproducible run to run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional

from .forgetting import Signature
from .logic import (
    Atom,
    Budget,
    BudgetExhausted,
    LogicError,
    PrimitiveRegistry,
    Program,
    Struct,
    Symbol,
    SymbolKind,
    Var,
    _SearchState,
    _sld,
    unify,
    walk,
)
from .metarules import Metarule, MetaruleSet, project, standard_set


@dataclass(frozen=True, slots=True)
class LearnTask:
    """A learning task: a fresh target symbol with its examples."""

    target: Symbol
    positives: "tuple[Atom, ...]"
    negatives: "tuple[Atom, ...]" = ()

    def __post_init__(self) -> None:
        if self.target.kind is not SymbolKind.TARGET:
            raise LogicError(f"task target {self.target!r} must have target kind")
        if not self.positives:
            raise LogicError(f"task {self.target.name!r} has no positive examples")
        for e in self.positives + self.negatives:
            if e.predicate != self.target:
                raise LogicError(f"example {e!r} does not use target {self.target!r}")

    @property
    def name(self) -> str:
        return self.target.name


@dataclass(frozen=True, slots=True)
class SearchConfig:
    """Budgets for one metagol call.

    deadline and step_cap apply per iterative-deepening size bound; the
    step cap is the deterministic budget, the deadline a wall-clock
    backstop.  depth_cap bounds total goal nesting and meta_depth_cap the
    number of hypothesis-goal reductions on one proof path, so recursive
    candidates cannot diverge; a depth-pruned search reports timeout,
    never "no program exists".
    """

    max_size: int = 6
    deadline: Optional[float] = None
    step_cap: int = 1_000_000
    depth_cap: int = 600
    meta_depth_cap: int = 128
    occurs_check: bool = True

    def __post_init__(self) -> None:
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")


class LearnStatus(Enum):
    SOLVED = "solved"
    NONE = "none"  # hypothesis space exhausted up to max_size
    TIMEOUT = "timeout"  # budget hit; larger budgets might still succeed


@dataclass(frozen=True, slots=True)
class LearnResult:
    status: LearnStatus
    program: Optional[Program]
    elapsed: float
    per_size_elapsed: "tuple[float, ...]"

    @property
    def solved(self) -> bool:
        return self.status is LearnStatus.SOLVED


@dataclass(frozen=True, slots=True, eq=False)
class Metasub:
    """A metarule plus bindings for its predicate variables, P first.

    Identity is (rule name, bindings); rule names are unique per set and
    comparing whole schemas on the hot path would be wasteful.
    """

    rule: Metarule
    bindings: "tuple[Symbol, ...]"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Metasub)
            and self.rule.name == other.rule.name
            and self.bindings == other.bindings
        )

    def __hash__(self) -> int:
        return hash((self.rule.name, self.bindings))

    @property
    def head_symbol(self) -> Symbol:
        return self.bindings[0]

    def as_mapping(self) -> dict:
        return dict(zip(self.rule.predicate_vars(), self.bindings))


def _variant_key(goal: Atom, theta) -> tuple:
    """Structural identity of a goal up to renaming of free variables."""
    names: dict = {}

    def key(t):
        t = walk(t, theta)
        if isinstance(t, Var):
            idx = names.get(t.id)
            if idx is None:
                idx = len(names)
                names[t.id] = idx
            return ("v", idx)
        if isinstance(t, Struct):
            if t.ground:
                return t
            return (t.functor, tuple(key(a) for a in t.args))
        return t

    return (goal.predicate, tuple(key(t) for t in goal.args))


class _MetaSearch:
    """One size-bounded meta-interpretive search over a frozen snapshot."""

    def __init__(
        self,
        bk: Program,
        registry: PrimitiveRegistry,
        sig: Signature,
        rules: MetaruleSet,
        target: Symbol,
        size_bound: int,
        budget: Budget,
        occurs_check: bool,
        meta_depth_cap: int = 128,
    ):
        self.rules = rules
        self.target = target
        self.size_bound = size_bound
        self.budget = budget
        self.occurs_check = occurs_check
        self.meta_depth_cap = meta_depth_cap
        self.bk_state = _SearchState(bk, registry, budget, occurs_check)

        self.max_invented = size_bound - 1
        head_arities = {r.head.arity for r in rules}
        # invention is only useful at arities some metarule head can define
        self.pool = tuple(
            Symbol(f"{target.name}_{k}", 2, SymbolKind.INVENTED)
            for k in range(1, self.max_invented + 1)
            if 2 in head_arities
        )
        self.hypothesis_syms = {target, *self.pool}

        self.dyadic_sig = tuple(s for s in sig if s.arity == 2)
        self.monadic_sig = tuple(s for s in sig if s.arity == 1)
        self._slots = {
            r.name: tuple((v, r.var_arities()[v]) for v in r.predicate_vars()[1:])
            for r in rules
        }
        # rules whose single body literal mirrors the head exactly; binding
        # that slot to the head symbol would project a tautology, which no
        # minimal program can need
        self._tautology_slot = {
            r.name: (
                r.body[0].predicate_var
                if len(r.body) == 1 and r.body[0].args == r.head.args
                else None
            )
            for r in rules
        }
        # rules eligible for the factored two-literal search: distinct head
        # letters and one predicate variable per body literal, in order
        self._two_slot = {
            r.name: (
                len(r.body) == 2
                and len(set(r.head.args)) == len(r.head.args)
                and [b.predicate_var for b in r.body] == [v for v, _ in self._slots[r.name]]
            )
            for r in rules
        }
        self._slot_empty = {
            1: not self.monadic_sig and target.arity != 1,
            2: not self.dyadic_sig and not self.pool and target.arity != 2,
        }
        self._counter = self.bk_state.counter
        self._plan_cache: dict = {}

    def _ms_plan(self, ms: Metasub):
        """Cached resolution plan for one metasubstitution: the head's
        argument letters (when they are pairwise distinct, the fast path
        can bind goal arguments into the body without unifying) and the
        body schemas paired with their bound symbols."""
        plan = self._plan_cache.get(ms)
        if plan is None:
            mu = ms.as_mapping()
            head_letters = ms.rule.head.args
            simple = len(set(head_letters)) == len(head_letters)
            body_pairs = tuple((b.args, mu[b.predicate_var]) for b in ms.rule.body)
            plan = (simple, head_letters, body_pairs)
            self._plan_cache[ms] = plan
        return plan

    def _resolve_against(self, ms: Metasub, goal: Atom, theta):
        """Resolve a goal against a metasubstitution's clause.  Returns
        (body goals, new theta) or None on clash."""
        simple, head_letters, body_pairs = self._ms_plan(ms)
        counter = self._counter
        if simple:
            letters = dict(zip(head_letters, goal.args))
            body = []
            for schema_args, sym in body_pairs:
                args = []
                for letter in schema_args:
                    t = letters.get(letter)
                    if t is None:
                        counter[0] += 1
                        t = Var(counter[0])
                        letters[letter] = t
                    args.append(t)
                body.append(Atom(sym, tuple(args)))
            return tuple(body), theta
        # repeated head letters: fall back to explicit head unification
        letters = {}
        for letter in head_letters:
            if letter not in letters:
                counter[0] += 1
                letters[letter] = Var(counter[0])
        head = Atom(goal.predicate, tuple(letters[a] for a in head_letters))
        theta2 = unify(goal, head, theta, self.occurs_check)
        if theta2 is None:
            return None
        body = []
        for schema_args, sym in body_pairs:
            args = []
            for letter in schema_args:
                t = letters.get(letter)
                if t is None:
                    counter[0] += 1
                    t = Var(counter[0])
                    letters[letter] = t
                args.append(t)
            body.append(Atom(sym, tuple(args)))
        return tuple(body), theta2

    def _slot_candidates(self, arity: int, ninv: int) -> Iterator[tuple]:
        """Candidates for one predicate slot with the invention count they
        imply: signature symbols in insertion order, then invented symbols
        ascending with at most one fresh symbol beyond those already in
        play, then the target itself.  Recursion through the target is the
        costliest choice to explore, so it comes last."""
        if arity == 2:
            for s in self.dyadic_sig:
                yield s, ninv
            for idx in range(min(ninv + 1, len(self.pool))):
                yield self.pool[idx], max(ninv, idx + 1)
            if self.target.arity == 2:
                yield self.target, ninv
        else:
            for s in self.monadic_sig:
                yield s, ninv
            if self.target.arity == 1:
                yield self.target, ninv

    def _bindings(self, rule: Metarule, ninv: int) -> Iterator[tuple]:
        """Enumerate complete body-slot bindings in slot order."""
        slots = self._slots[rule.name]

        def rec(i: int, acc: list, n: int) -> Iterator[tuple]:
            if i == len(slots):
                yield tuple(acc), n
                return
            for s, n2 in self._slot_candidates(slots[i][1], n):
                acc.append(s)
                yield from rec(i + 1, acc, n2)
                acc.pop()

        yield from rec(0, [], ninv)

    def solve(self, goals: "tuple[Atom, ...]") -> Iterator[tuple]:
        yield from self._meta(goals, {}, (), 0, 0, 0, frozenset())

    def _meta(self, goals, theta, subs, ninv, depth, hyp_depth, ancestors) -> Iterator[tuple]:
        if not goals:
            yield theta, subs, ninv
            return
        self.budget.tick()
        if depth >= self.budget.depth_cap:
            self.budget.depth_cut = True
            return
        goal, rest = goals[0], goals[1:]
        sym = goal.predicate

        if sym not in self.hypothesis_syms:
            # background knowledge or primitive: delegate to plain SLD
            for theta2 in _sld(self.bk_state, (goal,), theta, depth + 1):
                yield from self._meta(rest, theta2, subs, ninv, depth + 1, hyp_depth, ancestors)
            return

        # hypothesis goal: every further reduction of it spends meta depth
        if hyp_depth >= self.meta_depth_cap:
            self.budget.depth_cut = True
            return

        # A goal that is a variant of a pending ancestor hypothesis goal is
        # a regress without progress (left recursion).  Existing clauses may
        # still close it, but instantiating new clauses inside the regress
        # explodes the search for nothing a shallower branch cannot build;
        # blocking that marks the search uncertain rather than exhaustive.
        key = _variant_key(goal, theta)
        regress = key in ancestors
        ancestors = ancestors | {key}

        for ms in subs:
            if ms.head_symbol != sym:
                continue
            self.budget.tick()
            resolved = self._resolve_against(ms, goal, theta)
            if resolved is None:
                continue
            body, theta2 = resolved
            yield from self._meta(
                body + rest, theta2, subs, ninv, depth + 1, hyp_depth + 1, ancestors
            )

        if len(subs) >= self.size_bound:
            return
        if regress:
            self.budget.depth_cut = True
            return
        for rule in self.rules:
            if rule.head.arity != sym.arity:
                continue
            if any(self._slot_empty[arity] for _, arity in self._slots[rule.name]):
                continue
            if self._two_slot[rule.name]:
                yield from self._instantiate_two_slot(
                    rule, sym, goal, rest, theta, subs, ninv, depth, hyp_depth, ancestors
                )
                continue
            taut_slot = self._tautology_slot[rule.name]
            for binding, ninv2 in self._bindings(rule, ninv):
                ms = Metasub(rule, (sym,) + binding)
                if taut_slot is not None and ms.as_mapping()[taut_slot] == sym:
                    continue
                if ms in subs:
                    continue
                self.budget.tick()
                resolved = self._resolve_against(ms, goal, theta)
                if resolved is None:
                    continue
                body, theta2 = resolved
                yield from self._meta(
                    body + rest, theta2, subs + (ms,), ninv2, depth + 1, hyp_depth + 1, ancestors
                )

    def _instantiate_two_slot(
        self, rule, sym, goal, rest, theta, subs, ninv, depth, hyp_depth, ancestors
    ) -> Iterator[tuple]:
        """New metasubstitutions for a two-literal rule, factored so the
        first body literal of a background-symbol binding is evaluated once
        and its solutions shared across every second-slot choice.  The
        (first slot, second slot) candidate order matches the generic path."""
        (_, arity1), (_, arity2) = self._slots[rule.name]
        letters = dict(zip(rule.head.args, goal.args))

        def args_for(schema_args):
            out = []
            for letter in schema_args:
                t = letters.get(letter)
                if t is None:
                    self._counter[0] += 1
                    t = Var(self._counter[0])
                    letters[letter] = t
                out.append(t)
            return tuple(out)

        args1 = args_for(rule.body[0].args)
        args2 = args_for(rule.body[1].args)
        for q, ninv_q in self._slot_candidates(arity1, ninv):
            lit1 = Atom(q, args1)
            if q in self.hypothesis_syms:
                for r, ninv_r in self._slot_candidates(arity2, ninv_q):
                    ms = Metasub(rule, (sym, q, r))
                    if ms in subs:
                        continue
                    self.budget.tick()
                    yield from self._meta(
                        (lit1, Atom(r, args2)) + rest,
                        theta,
                        subs + (ms,),
                        ninv_r,
                        depth + 1,
                        hyp_depth + 1,
                        ancestors,
                    )
                continue
            self.budget.tick()
            solutions = list(_sld(self.bk_state, (lit1,), theta, depth + 1))
            if not solutions:
                continue
            for r, ninv_r in self._slot_candidates(arity2, ninv_q):
                ms = Metasub(rule, (sym, q, r))
                if ms in subs:
                    continue
                self.budget.tick()
                lit2 = Atom(r, args2)
                for theta2 in solutions:
                    yield from self._meta(
                        (lit2,) + rest,
                        theta2,
                        subs + (ms,),
                        ninv_r,
                        depth + 1,
                        hyp_depth + 1,
                        ancestors,
                    )


def meta_prove(
    goals,
    bk: Program,
    registry: PrimitiveRegistry,
    sig: Signature,
    target: Symbol,
    size_bound: int,
    budget: Optional[Budget] = None,
    metarules: Optional[MetaruleSet] = None,
    occurs_check: bool = True,
) -> Iterator[tuple]:
    """Lazily enumerate (bindings, metasubstitutions) pairs that prove the
    goals within the size bound, in deterministic search order."""
    search = _MetaSearch(
        bk,
        registry,
        sig,
        metarules or standard_set(),
        target,
        size_bound,
        budget or Budget(),
        occurs_check,
    )
    for theta, subs, _ in search.solve(tuple(goals)):
        yield theta, subs


def _fresh_budget(cfg: SearchConfig) -> Budget:
    return Budget(cfg.step_cap, cfg.deadline, cfg.depth_cap)


def _program_of(subs: "tuple[Metasub, ...]") -> Program:
    return Program(project(ms.rule, ms.as_mapping()) for ms in subs)


def _consistent(
    bk: Program,
    registry: PrimitiveRegistry,
    hypothesis: Program,
    negatives,
    budget: Budget,
    occurs_check: bool,
) -> bool:
    """True when no negative example is provable from bk plus hypothesis.
    A depth-pruned check cannot certify consistency and counts as failure."""
    if not negatives:
        return True
    combined = bk.extended(hypothesis.clauses)
    for e in negatives:
        state = _SearchState(combined, registry, budget, occurs_check)
        cut_before = budget.depth_cut
        for _ in _sld(state, (e,), {}, 0):
            return False
        if budget.depth_cut and not cut_before:
            return False
    return True


def metagol(
    bk: Program,
    registry: PrimitiveRegistry,
    sig: Signature,
    task: LearnTask,
    cfg: SearchConfig = SearchConfig(),
    metarules: Optional[MetaruleSet] = None,
) -> LearnResult:
    """Learn a minimal program for one task, or report why not.

    SOLVED carries the first (hence smallest) complete and consistent
    program in search order.  NONE means the whole space up to max_size
    was exhausted.  TIMEOUT means a budget ran out or branches were
    depth-pruned, so a larger budget or richer background might still
    succeed; callers retry those.
    """
    rules = metarules or standard_set()
    if any(s.name == task.target.name for s in sig):
        raise LogicError(f"target {task.target!r} already in the signature")
    started = time.monotonic()
    per_size: list[float] = []
    uncertain = False
    for bound in range(1, cfg.max_size + 1):
        size_started = time.monotonic()
        budget = _fresh_budget(cfg)
        search = _MetaSearch(
            bk,
            registry,
            sig,
            rules,
            task.target,
            bound,
            budget,
            cfg.occurs_check,
            cfg.meta_depth_cap,
        )
        try:
            for _, subs, _ in search.solve(task.positives):
                hypothesis = _program_of(subs)
                if _consistent(
                    bk, registry, hypothesis, task.negatives, budget, cfg.occurs_check
                ):
                    per_size.append(time.monotonic() - size_started)
                    return LearnResult(
                        LearnStatus.SOLVED,
                        hypothesis,
                        time.monotonic() - started,
                        tuple(per_size),
                    )
        except BudgetExhausted:
            per_size.append(time.monotonic() - size_started)
            return LearnResult(
                LearnStatus.TIMEOUT, None, time.monotonic() - started, tuple(per_size)
            )
        per_size.append(time.monotonic() - size_started)
        if budget.depth_cut:
            uncertain = True
    status = LearnStatus.TIMEOUT if uncertain else LearnStatus.NONE
    return LearnResult(status, None, time.monotonic() - started, tuple(per_size))
