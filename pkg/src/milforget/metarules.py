"""Second-order clause templates and their projection to first-order clauses.

A metarule is a schema like `chain: P(A,B) :- Q(A,C), R(C,B).` whose
uppercase predicate positions (P, Q, R) range over predicate symbols and
whose argument letters (A, B, C) are first-order variables.  Binding the
predicate variables (a metasubstitution) and renaming the argument
variables yields an ordinary clause.  Each predicate variable carries the
arity its schema position demands, which is left implicit in the usual
table notation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .logic import Atom, Clause, Symbol, Var


class ArityMismatchError(ValueError):
    """A metasubstitution binds a predicate variable to a symbol of the wrong arity."""


@dataclass(frozen=True, slots=True)
class SchemaAtom:
    predicate_var: str
    args: "tuple[str, ...]"

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True, slots=True)
class Metarule:
    name: str
    head: SchemaAtom
    body: "tuple[SchemaAtom, ...]"

    def __post_init__(self) -> None:
        if self.head.predicate_var != "P":
            raise ValueError(f"metarule {self.name!r}: head predicate variable must be P")
        for var, arity in self.var_arities().items():
            # a predicate variable used at two different arities is unprojectable
            for schema in (self.head, *self.body):
                if schema.predicate_var == var and schema.arity != arity:
                    raise ValueError(
                        f"metarule {self.name!r}: {var} used at arities "
                        f"{arity} and {schema.arity}"
                    )

    @property
    def j(self) -> int:
        """Number of body literals."""
        return len(self.body)

    def predicate_vars(self) -> "tuple[str, ...]":
        """Predicate variables in order of first occurrence (P first)."""
        seen = []
        for schema in (self.head, *self.body):
            if schema.predicate_var not in seen:
                seen.append(schema.predicate_var)
        return tuple(seen)

    def var_arities(self) -> "dict[str, int]":
        arities: dict[str, int] = {}
        for schema in (self.head, *self.body):
            arities.setdefault(schema.predicate_var, schema.arity)
        return arities


# Metasubstitution: predicate variable name -> Symbol.
Metasubstitution = Mapping[str, Symbol]


def project(rule: Metarule, mu: Metasubstitution) -> Clause:
    """Project a metasubstitution onto its metarule, yielding a clause.

    Argument variables are named by their schema letters, so projection is
    deterministic; distinct metasubstitutions give distinct clauses.
    """
    arities = rule.var_arities()
    for var, arity in arities.items():
        if var not in mu:
            raise ArityMismatchError(f"metarule {rule.name!r}: {var} is unbound")
        if mu[var].arity != arity:
            raise ArityMismatchError(
                f"metarule {rule.name!r}: {var} requires arity {arity}, "
                f"got {mu[var]!r}"
            )

    def fill(schema: SchemaAtom) -> Atom:
        return Atom(mu[schema.predicate_var], tuple(Var(a) for a in schema.args))

    return Clause(fill(rule.head), tuple(fill(b) for b in rule.body))


class MetaruleSet:
    """An ordered collection of metarules with unique names."""

    def __init__(self, rules: Iterable[Metarule]):
        self.rules: tuple[Metarule, ...] = tuple(rules)
        if not self.rules:
            raise ValueError("a metarule set needs at least one rule")
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate metarule names in {names}")

    @property
    def m(self) -> int:
        return len(self.rules)

    @property
    def j(self) -> int:
        return max(r.j for r in self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __getitem__(self, name: str) -> Metarule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)


IDENT = Metarule("ident", SchemaAtom("P", ("A", "B")), (SchemaAtom("Q", ("A", "B")),))
PRECON = Metarule(
    "precon",
    SchemaAtom("P", ("A", "B")),
    (SchemaAtom("Q", ("A",)), SchemaAtom("R", ("A", "B"))),
)
POSTCON = Metarule(
    "postcon",
    SchemaAtom("P", ("A", "B")),
    (SchemaAtom("Q", ("A", "B")), SchemaAtom("R", ("B",))),
)
CHAIN = Metarule(
    "chain",
    SchemaAtom("P", ("A", "B")),
    (SchemaAtom("Q", ("A", "C")), SchemaAtom("R", ("C", "B"))),
)


def standard_set() -> MetaruleSet:
    """The stock set {ident, precon, postcon, chain}: m=4, j=2."""
    return MetaruleSet((IDENT, PRECON, POSTCON, CHAIN))


# ---------------------------------------------------------------------------
# Text format, e.g. `chain: P(A,B) :- Q(A,C), R(C,B).`
# ---------------------------------------------------------------------------

_SCHEMA_RE = re.compile(r"\s*([A-Z][A-Za-z0-9_]*)\(([^)]*)\)\s*")


def _parse_schema(text: str) -> SchemaAtom:
    m = _SCHEMA_RE.fullmatch(text)
    if m is None:
        raise ValueError(f"bad schema literal {text!r}")
    args = tuple(a.strip() for a in m.group(2).split(","))
    if any(not a or not a[0].isupper() for a in args):
        raise ValueError(f"bad schema arguments in {text!r}")
    return SchemaAtom(m.group(1), args)


def parse_metarule(text: str) -> Metarule:
    text = text.strip()
    if not text.endswith("."):
        raise ValueError(f"metarule must end with '.': {text!r}")
    text = text[:-1]
    name, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"metarule needs a 'name:' prefix: {text!r}")
    head_text, sep, body_text = rest.partition(":-")
    head = _parse_schema(head_text)
    if not sep:
        return Metarule(name.strip(), head, ())
    depth = 0
    literals, current = [], []
    for ch in body_text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            literals.append("".join(current))
            current = []
        else:
            current.append(ch)
    literals.append("".join(current))
    return Metarule(name.strip(), head, tuple(_parse_schema(b) for b in literals))


def format_metarule(rule: Metarule) -> str:
    def fmt(schema: SchemaAtom) -> str:
        return f"{schema.predicate_var}({','.join(schema.args)})"

    if not rule.body:
        return f"{rule.name}: {fmt(rule.head)}."
    return f"{rule.name}: {fmt(rule.head)} :- {', '.join(fmt(b) for b in rule.body)}."
