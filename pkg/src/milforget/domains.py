"""Robot-planning and Lego-building worlds.

Robot: a robot and a ball in a 6x6 grid.  A state is
`world(Rx,Ry,Bx,By,Holding)`; the robot may hold the ball only while they
share a cell, and a held ball moves with the robot.  Moves that would
leave the grid fail rather than clamp, grab requires co-location without
holding, drop requires holding and leaves the ball in place.

Lego: a 6-cell board of stack heights plus a cursor, encoded
`lego(Cursor,[H1,...,H6])`.  left/right move the cursor and fail at the
board edges, place_block raises the stack under the cursor, and the
fluents at_left/at_right (plus their negations) test the cursor position.

Tasks are one-shot: a single positive example `f(S1,S2)` asking for a
program that transforms the initial state into the final one.  Generation
is fully reproducible from a seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .engine import LearnTask
from .logic import (
    Atom,
    Budget,
    BudgetExhausted,
    Const,
    Int,
    LogicError,
    PrimitiveRegistry,
    Struct,
    Symbol,
    SymbolKind,
    Term,
    prove,
)
from .forgetting import Signature
from .metarules import MetaruleSet, standard_set
from .multitask import TaskCorpus
from .syntax import LIST_FUNCTOR, NIL

GRID = 6
TRUE = Const("true")
FALSE = Const("false")

ROBOT_PRIMITIVES = tuple(
    Symbol(name, 2, SymbolKind.PRIMITIVE)
    for name in ("up", "down", "right", "left", "grab", "drop")
)
LEGO_ACTIONS = tuple(
    Symbol(name, 2, SymbolKind.PRIMITIVE) for name in ("left", "right", "place_block")
)
LEGO_FLUENTS = tuple(
    Symbol(name, 1, SymbolKind.PRIMITIVE)
    for name in ("at_left", "at_right", "not_at_left", "not_at_right")
)
LEGO_PRIMITIVES = LEGO_ACTIONS + LEGO_FLUENTS


# ---------------------------------------------------------------------------
# Robot state and actions
# ---------------------------------------------------------------------------

def robot_state(rx: int, ry: int, bx: int, by: int, holding: bool) -> Term:
    if holding and (rx, ry) != (bx, by):
        raise LogicError("robot can only hold the ball at the ball's cell")
    if not all(1 <= v <= GRID for v in (rx, ry, bx, by)):
        raise LogicError("robot/ball position outside the grid")
    return Struct("world", (Int(rx), Int(ry), Int(bx), Int(by), TRUE if holding else FALSE))


def _decode_robot(state: Term):
    if not (isinstance(state, Struct) and state.functor == "world" and len(state.args) == 5):
        return None
    rx, ry, bx, by, h = state.args
    if not all(isinstance(v, Int) for v in (rx, ry, bx, by)) or h not in (TRUE, FALSE):
        return None
    return rx.value, ry.value, bx.value, by.value, h == TRUE


def _robot_move(state: Term, dx: int, dy: int) -> Optional[Term]:
    decoded = _decode_robot(state)
    if decoded is None:
        return None
    rx, ry, bx, by, holding = decoded
    nx, ny = rx + dx, ry + dy
    if not (1 <= nx <= GRID and 1 <= ny <= GRID):
        return None
    if holding:
        bx, by = nx, ny
    return robot_state(nx, ny, bx, by, holding)


def _robot_up(state: Term) -> Optional[Term]:
    return _robot_move(state, 0, 1)


def _robot_down(state: Term) -> Optional[Term]:
    return _robot_move(state, 0, -1)


def _robot_right(state: Term) -> Optional[Term]:
    return _robot_move(state, 1, 0)


def _robot_left(state: Term) -> Optional[Term]:
    return _robot_move(state, -1, 0)


def _robot_grab(state: Term) -> Optional[Term]:
    decoded = _decode_robot(state)
    if decoded is None:
        return None
    rx, ry, bx, by, holding = decoded
    if holding or (rx, ry) != (bx, by):
        return None
    return robot_state(rx, ry, bx, by, True)


def _robot_drop(state: Term) -> Optional[Term]:
    decoded = _decode_robot(state)
    if decoded is None:
        return None
    rx, ry, bx, by, holding = decoded
    if not holding:
        return None
    return robot_state(rx, ry, bx, by, False)


_ROBOT_TRANSITIONS = {
    "up": _robot_up,
    "down": _robot_down,
    "right": _robot_right,
    "left": _robot_left,
    "grab": _robot_grab,
    "drop": _robot_drop,
}


# ---------------------------------------------------------------------------
# Lego state and actions
# ---------------------------------------------------------------------------

def lego_state(cursor: int, board) -> Term:
    board = list(board)
    if len(board) != GRID or any(h < 0 for h in board):
        raise LogicError("lego board must hold 6 non-negative heights")
    if not 1 <= cursor <= GRID:
        raise LogicError("lego cursor outside the board")
    cells: Term = NIL
    for h in reversed(board):
        cells = Struct(LIST_FUNCTOR, (Int(h), cells))
    return Struct("lego", (Int(cursor), cells))


def _decode_lego(state: Term):
    if not (isinstance(state, Struct) and state.functor == "lego" and len(state.args) == 2):
        return None
    cursor, cells = state.args
    if not isinstance(cursor, Int):
        return None
    board = []
    while isinstance(cells, Struct) and cells.functor == LIST_FUNCTOR:
        h = cells.args[0]
        if not isinstance(h, Int):
            return None
        board.append(h.value)
        cells = cells.args[1]
    if cells != NIL or len(board) != GRID:
        return None
    return cursor.value, board


def _lego_left(state: Term) -> Optional[Term]:
    decoded = _decode_lego(state)
    if decoded is None or decoded[0] <= 1:
        return None
    return lego_state(decoded[0] - 1, decoded[1])


def _lego_right(state: Term) -> Optional[Term]:
    decoded = _decode_lego(state)
    if decoded is None or decoded[0] >= GRID:
        return None
    return lego_state(decoded[0] + 1, decoded[1])


# Stacks taller than any generated target are dead ends: no action lowers a
# stack, so a solution trace can never overshoot its final board.  Failing
# here keeps runaway recursive placement finite.
MAX_STACK = 8


def _lego_place(state: Term) -> Optional[Term]:
    decoded = _decode_lego(state)
    if decoded is None:
        return None
    cursor, board = decoded
    if board[cursor - 1] >= MAX_STACK:
        return None
    board[cursor - 1] += 1
    return lego_state(cursor, board)


def _lego_at_left(state: Term) -> bool:
    decoded = _decode_lego(state)
    return decoded is not None and decoded[0] == 1


def _lego_at_right(state: Term) -> bool:
    decoded = _decode_lego(state)
    return decoded is not None and decoded[0] == GRID


def _lego_not_at_left(state: Term) -> bool:
    decoded = _decode_lego(state)
    return decoded is not None and decoded[0] != 1


def _lego_not_at_right(state: Term) -> bool:
    decoded = _decode_lego(state)
    return decoded is not None and decoded[0] != GRID


_LEGO_TRANSITIONS = {
    "left": _lego_left,
    "right": _lego_right,
    "place_block": _lego_place,
}
_LEGO_FLUENT_FNS = {
    "at_left": _lego_at_left,
    "at_right": _lego_at_right,
    "not_at_left": _lego_not_at_left,
    "not_at_right": _lego_not_at_right,
}


# ---------------------------------------------------------------------------
# Domain specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    name: str
    primitives: "tuple[Symbol, ...]"
    registry_factory: Callable[[], PrimitiveRegistry]
    generator: Callable[[random.Random, int], LearnTask]

    def registry(self) -> PrimitiveRegistry:
        return self.registry_factory()

    def signature(self) -> Signature:
        return Signature(protected=self.primitives)


def _robot_registry() -> PrimitiveRegistry:
    reg = PrimitiveRegistry()
    for sym in ROBOT_PRIMITIVES:
        reg.register_transition(sym, _ROBOT_TRANSITIONS[sym.name])
    return reg


def _lego_registry() -> PrimitiveRegistry:
    reg = PrimitiveRegistry()
    for sym in LEGO_ACTIONS:
        reg.register_transition(sym, _LEGO_TRANSITIONS[sym.name])
    for sym in LEGO_FLUENTS:
        reg.register_fluent(sym, _LEGO_FLUENT_FNS[sym.name])
    return reg


# Valid robot states: 6^4 free placements plus 6^2 held (co-located) ones.
_N_FREE = GRID**4
_N_HELD = GRID**2
N_ROBOT_STATES = _N_FREE + _N_HELD


def _random_robot_state(rng: random.Random) -> Term:
    """Uniform over all valid states, counting held states once."""
    idx = rng.randrange(N_ROBOT_STATES)
    if idx < _N_FREE:
        rx = idx % GRID + 1
        idx //= GRID
        ry = idx % GRID + 1
        idx //= GRID
        bx = idx % GRID + 1
        by = idx // GRID + 1
        return robot_state(rx, ry, bx, by, False)
    idx -= _N_FREE
    x = idx % GRID + 1
    y = idx // GRID + 1
    return robot_state(x, y, x, y, True)


def _gen_robot_task(rng: random.Random, index: int) -> LearnTask:
    target = Symbol(f"t{index}", 2, SymbolKind.TARGET)
    s1 = _random_robot_state(rng)
    s2 = _random_robot_state(rng)
    return LearnTask(target, (Atom(target, (s1, s2)),))


def _gen_lego_task(rng: random.Random, index: int) -> LearnTask:
    target = Symbol(f"t{index}", 2, SymbolKind.TARGET)
    start = lego_state(1, [0] * GRID)
    while True:
        board = [rng.randrange(0, 5) for _ in range(GRID)]
        if any(board):
            break
    cursor = rng.randrange(1, GRID + 1)
    return LearnTask(target, (Atom(target, (start, lego_state(cursor, board))),))


ROBOT = DomainSpec("robot", ROBOT_PRIMITIVES, _robot_registry, _gen_robot_task)
LEGO = DomainSpec("lego", LEGO_PRIMITIVES, _lego_registry, _gen_lego_task)
DOMAINS = {"robot": ROBOT, "lego": LEGO}


def get_domain(name) -> DomainSpec:
    if isinstance(name, DomainSpec):
        return name
    try:
        return DOMAINS[name]
    except KeyError:
        raise LogicError(f"unknown domain {name!r}; expected one of {sorted(DOMAINS)}")


def apply_primitive(symbol: Symbol, state: Term) -> Optional[Term]:
    """Run one primitive action on a ground state; None when it fails.
    Monadic fluents are not transitions and are rejected."""
    if symbol in ROBOT_PRIMITIVES and _decode_robot(state) is not None:
        return _ROBOT_TRANSITIONS[symbol.name](state)
    if symbol in LEGO_ACTIONS and _decode_lego(state) is not None:
        return _LEGO_TRANSITIONS[symbol.name](state)
    raise LogicError(f"{symbol!r} is not a transition primitive for this state")


def gen_tasks(domain, count: int, seed: int) -> TaskCorpus:
    """A reproducible corpus of `count` one-shot tasks with fresh targets."""
    if count < 1:
        raise ValueError("count must be at least 1")
    spec = get_domain(domain)
    rng = random.Random(seed)
    tasks = tuple(spec.generator(rng, i) for i in range(count))
    return TaskCorpus(tasks, spec.name, seed)


def solvable_oracle(
    task: LearnTask,
    domain,
    max_size: int,
    metarules: Optional[MetaruleSet] = None,
    program_cap: int = 2_000_000,
    step_cap: int = 50_000,
) -> bool:
    """Brute-force test oracle: is some program of at most max_size clauses
    over the domain primitives (plus the target and invented symbols)
    complete and consistent for the task?

    Enumerates the whole candidate space combinatorially, independent of
    the learner's search order, and executes every program.  Intended for
    max_size <= 3; raises when the space exceeds program_cap.
    """
    if max_size > 3:
        raise ValueError("oracle enumeration is only feasible for max_size <= 3")
    from .bounds import iter_candidate_programs

    spec = get_domain(domain)
    registry = spec.registry()
    rules = metarules or standard_set()
    for program in iter_candidate_programs(
        rules, spec.primitives, task.target, max_size, cap=program_cap
    ):
        budget = Budget(step_cap=step_cap, depth_cap=400)
        try:
            result = prove(task.positives, program, registry, budget)
        except BudgetExhausted:
            continue
        if not result.proven:
            continue
        consistent = True
        for e in task.negatives:
            neg_budget = Budget(step_cap=step_cap, depth_cap=400)
            try:
                if prove([e], program, registry, neg_budget).proven:
                    consistent = False
                    break
            except BudgetExhausted:
                consistent = False
                break
        if consistent:
            return True
    return False
