from __future__ import annotations

import pytest

from milforget import (
    Atom,
    Const,
    LearnTask,
    PrimitiveRegistry,
    Signature,
    Symbol,
    SymbolKind,
)
from milforget.domains import LEGO, ROBOT


def sym(name: str, arity: int = 2, kind: SymbolKind = SymbolKind.LEARNED) -> Symbol:
    return Symbol(name, arity, kind)


@pytest.fixture
def robot_registry():
    return ROBOT.registry()


@pytest.fixture
def robot_sig():
    return ROBOT.signature()


@pytest.fixture
def lego_registry():
    return LEGO.registry()


@pytest.fixture
def lego_sig():
    return LEGO.signature()


@pytest.fixture
def grandparent_setup():
    """The classic family worked example: facts, signature and task."""
    parent = Symbol("parent", 2, SymbolKind.FACT)
    grandparent = Symbol("grandparent", 2, SymbolKind.TARGET)
    ann, bob, carl = Const("ann"), Const("bob"), Const("carl")
    registry = PrimitiveRegistry()
    registry.register_facts(parent, [(ann, bob), (bob, carl)])
    sig = Signature(protected=(), learned=(parent,))
    task = LearnTask(grandparent, (Atom(grandparent, (ann, carl)),))
    return registry, sig, task, parent, grandparent
