"""Canonical clause text syntax.

Lowercase identifiers are constants and functors, uppercase identifiers
are variables, integers are literal.  Clauses read `head :- b1,b2.` and
facts `p(a,b).`.  Lists are sugar for cons/nil structures and are printed
back as `[..]`, so parse and print round-trip byte for byte on canonical
text.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional

from .logic import (
    Atom,
    Clause,
    Const,
    Int,
    Program,
    Struct,
    Symbol,
    SymbolKind,
    Term,
    Var,
    canonical_clause,
)

LIST_FUNCTOR = "cons"
NIL = Const("nil")


class SyntaxFormatError(ValueError):
    def __init__(self, message: str, position: int = -1):
        super().__init__(message if position < 0 else f"{message} (at column {position + 1})")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<lparen>\()|(?P<rparen>\))|(?P<lbrack>\[)|(?P<rbrack>\])"
    r"|(?P<comma>,)|(?P<neck>:-)|(?P<colon>:)|(?P<dot>\.)"
    r"|(?P<int>-?\d+)|(?P<name>[a-zA-Z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise SyntaxFormatError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class SymbolTable:
    """Name -> Symbol mapping used while parsing; enforces unique names."""

    def __init__(self, symbols: Iterable[Symbol] = (), default_kind: SymbolKind = SymbolKind.LEARNED):
        self._by_name: dict[str, Symbol] = {}
        self.default_kind = default_kind
        for s in symbols:
            self.add(s)

    def add(self, symbol: Symbol) -> Symbol:
        existing = self._by_name.get(symbol.name)
        if existing is not None:
            if existing != symbol:
                raise SyntaxFormatError(
                    f"symbol {symbol.name!r} already declared as {existing!r}"
                )
            return existing
        self._by_name[symbol.name] = symbol
        return symbol

    def resolve(self, name: str, arity: int) -> Symbol:
        sym = self._by_name.get(name)
        if sym is None:
            sym = Symbol(name, arity, self.default_kind)
            self._by_name[name] = sym
            return sym
        if sym.arity != arity:
            raise SyntaxFormatError(f"{name!r} used with arity {arity}, declared {sym.arity}")
        return sym

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> Symbol:
        return self._by_name[name]


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: Optional[str] = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise SyntaxFormatError(f"expected {kind}, found {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse_term(self) -> Term:
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return Int(int(value))
        if kind == "lbrack":
            return self.parse_list()
        if kind == "name":
            self.take()
            if value[0].isupper() or value[0] == "_":
                return Var(value)
            if self.peek()[0] == "lparen":
                args = self.parse_args()
                return Struct(value, args)
            return Const(value)
        raise SyntaxFormatError(f"expected a term, found {value!r}", pos)

    def parse_list(self) -> Term:
        self.take("lbrack")
        items: list[Term] = []
        if self.peek()[0] != "rbrack":
            items.append(self.parse_term())
            while self.peek()[0] == "comma":
                self.take()
                items.append(self.parse_term())
        self.take("rbrack")
        out: Term = NIL
        for item in reversed(items):
            out = Struct(LIST_FUNCTOR, (item, out))
        return out

    def parse_args(self) -> "tuple[Term, ...]":
        self.take("lparen")
        args = [self.parse_term()]
        while self.peek()[0] == "comma":
            self.take()
            args.append(self.parse_term())
        self.take("rparen")
        return tuple(args)

    def parse_atom(self) -> Atom:
        kind, value, pos = self.peek()
        if kind != "name" or value[0].isupper():
            raise SyntaxFormatError(f"expected a predicate, found {value!r}", pos)
        self.take()
        args = self.parse_args()
        return Atom(self.symbols.resolve(value, len(args)), args)

    def parse_clause(self) -> Clause:
        head = self.parse_atom()
        body: list[Atom] = []
        if self.peek()[0] == "neck":
            self.take()
            body.append(self.parse_atom())
            while self.peek()[0] == "comma":
                self.take()
                body.append(self.parse_atom())
        self.take("dot")
        return Clause(head, tuple(body))

    def at_end(self) -> bool:
        return self.peek()[0] == "end"


def parse_term(text: str) -> Term:
    parser = _Parser(text, SymbolTable())
    term = parser.parse_term()
    if not parser.at_end():
        raise SyntaxFormatError("trailing input after term", parser.peek()[2])
    return term


def parse_atom(text: str, symbols: SymbolTable) -> Atom:
    parser = _Parser(text, symbols)
    atom = parser.parse_atom()
    if not parser.at_end():
        raise SyntaxFormatError("trailing input after atom", parser.peek()[2])
    return atom


def parse_clause(text: str, symbols: Optional[SymbolTable] = None) -> Clause:
    parser = _Parser(text, symbols if symbols is not None else SymbolTable())
    clause = parser.parse_clause()
    if not parser.at_end():
        raise SyntaxFormatError("trailing input after clause", parser.peek()[2])
    return clause


def parse_program(text: str, symbols: Optional[SymbolTable] = None) -> Program:
    parser = _Parser(text, symbols if symbols is not None else SymbolTable())
    clauses = []
    while not parser.at_end():
        clauses.append(parser.parse_clause())
    return Program(clauses)


def _as_list(t: Term) -> Optional[list]:
    items = []
    while True:
        if t == NIL:
            return items
        if isinstance(t, Struct) and t.functor == LIST_FUNCTOR and len(t.args) == 2:
            items.append(t.args[0])
            t = t.args[1]
        else:
            return None


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return str(t.id)
    if isinstance(t, Int):
        return str(t.value)
    if t == NIL:
        return "[]"
    if isinstance(t, Const):
        return t.name
    items = _as_list(t)
    if items is not None:
        return "[" + ",".join(format_term(x) for x in items) + "]"
    return f"{t.functor}({','.join(format_term(a) for a in t.args)})"


def format_atom(a: Atom) -> str:
    return f"{a.predicate.name}({','.join(format_term(t) for t in a.args)})"


def format_clause(c: Clause, canonical: bool = True) -> str:
    if canonical:
        c = canonical_clause(c)
    if not c.body:
        return f"{format_atom(c.head)}."
    return f"{format_atom(c.head)} :- {','.join(format_atom(b) for b in c.body)}."


def format_program(p: Program, canonical: bool = True) -> str:
    return "\n".join(format_clause(c, canonical) for c in p.clauses)
