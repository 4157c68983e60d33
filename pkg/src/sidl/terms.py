"""Terms of the definition language: reading, printing and unification.

The value universe is small: atoms, integers, reals, variables and compounds.
Lists are sugar over cons cells ``'.'(Head, Tail)`` ending in the atom ``[]``,
which keeps unification and the list builtins uniform.  Integers and reals are
distinct constructors and never unify, even when numerically equal; game words
rely on integer counters and real account amounts coexisting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .errors import ParseError

__all__ = [
    "Term", "Atom", "Int", "Real", "Var", "Struct", "Clause",
    "NIL", "cons", "make_list", "list_parts", "is_ground", "variables_of",
    "parse_program", "parse_term", "format_term", "unify", "resolve",
    "walk", "bind_var", "undo_to", "fresh_var",
]


@dataclass(frozen=True, slots=True)
class Atom:
    name: str


@dataclass(frozen=True, slots=True)
class Int:
    value: int


@dataclass(frozen=True, slots=True)
class Real:
    value: float


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: tuple


Term = Union[Atom, Int, Real, Var, Struct]

NIL = Atom("[]")


def cons(head: Term, tail: Term) -> Struct:
    return Struct(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def list_parts(term: Term) -> tuple[list, Term]:
    """Split a cons chain into (items, tail); tail is NIL for proper lists."""
    items = []
    while isinstance(term, Struct) and term.functor == "." and len(term.args) == 2:
        items.append(term.args[0])
        term = term.args[1]
    return items, term


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, Struct):
        return all(is_ground(a) for a in term.args)
    return True


def variables_of(term: Term) -> set[str]:
    out: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Struct):
            stack.extend(t.args)
    return out


@dataclass(frozen=True, slots=True)
class Clause:
    """One rule; ``body`` is empty for facts.  Source order is significant."""

    head: Term
    body: tuple
    line: int = 0


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<real>\d+\.\d+(?:[eE][+-]?\d+)?)
    | (?P<int>\d+)
    | (?P<qatom>'(?:[^'\\]|\\.)*')
    | (?P<name>[a-z][A-Za-z0-9_]*)
    | (?P<var>[A-Z_][A-Za-z0-9_]*)
    | (?P<punct>:-|>=|=<|[()\[\]|,.=<>+\-*/^])
    """,
    re.VERBOSE,
)

_COMPARISON_OPS = {"=", "is", "<", ">", ">=", "=<"}
_OPERATOR_FUNCTORS = _COMPARISON_OPS | {"+", "-", "*", "/", "^"}


@dataclass(slots=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tok_kind = "op" if kind == "punct" else kind
            if kind == "name" and text == "is":
                tok_kind = "op"
            tokens.append(_Token(tok_kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_fresh_counter = 0


def fresh_var(prefix: str = "_G") -> Var:
    global _fresh_counter
    _fresh_counter += 1
    return Var(f"{prefix}{_fresh_counter}")


class _Parser:
    """Recursive-descent parser with a fixed operator precedence ladder.

    Loosest to tightest: comparison/is (non-associative), additive (left),
    multiplicative (left), ``^`` (right), unary minus.  The comma is not an
    operator here: inside parentheses it builds a tuple compound with functor
    ``,`` and inside argument or body position it separates.
    """

    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        shown = tok.text if tok.kind != "eof" else "end of input"
        return ParseError(f"{message}, found {shown!r}", tok.line, tok.column)

    # -- program level ------------------------------------------------------

    def parse_program(self) -> list[Clause]:
        clauses = []
        while self.peek().kind != "eof":
            clauses.append(self.parse_clause())
        return clauses

    def parse_clause(self) -> Clause:
        start = self.peek()
        head = self.parse_expr()
        if not isinstance(head, (Atom, Struct)) or (
            isinstance(head, Struct) and head.functor in _OPERATOR_FUNCTORS | {".", ","}
        ):
            raise ParseError("clause head must be an atom or compound", start.line, start.column)
        body: tuple = ()
        if self.peek().text == ":-":
            self.next()
            goals = [self.parse_expr()]
            while self.peek().text == ",":
                self.next()
                goals.append(self.parse_expr())
            body = tuple(goals)
        tok = self.next()
        if tok.text != ".":
            raise ParseError(f"expected '.' to end clause, found {tok.text!r}", tok.line, tok.column)
        return Clause(head, body, start.line)

    # -- expression ladder --------------------------------------------------

    def parse_expr(self) -> Term:
        left = self.parse_additive()
        tok = self.peek()
        if tok.text in _COMPARISON_OPS and tok.kind in ("op",):
            self.next()
            right = self.parse_additive()
            return Struct(tok.text, (left, right))
        return left

    def parse_additive(self) -> Term:
        left = self.parse_multiplicative()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            right = self.parse_multiplicative()
            left = Struct(op, (left, right))
        return left

    def parse_multiplicative(self) -> Term:
        left = self.parse_power()
        while self.peek().text in ("*", "/"):
            op = self.next().text
            right = self.parse_power()
            left = Struct(op, (left, right))
        return left

    def parse_power(self) -> Term:
        base = self.parse_unary()
        if self.peek().text == "^":
            self.next()
            return Struct("^", (base, self.parse_power()))
        return base

    def parse_unary(self) -> Term:
        if self.peek().text == "-":
            self.next()
            operand = self.parse_unary()
            if isinstance(operand, Int):
                return Int(-operand.value)
            if isinstance(operand, Real):
                return Real(-operand.value)
            return Struct("-", (operand,))
        return self.parse_primary()

    def parse_primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return Int(int(tok.text))
        if tok.kind == "real":
            self.next()
            return Real(float(tok.text))
        if tok.kind == "var":
            self.next()
            if tok.text == "_":
                return fresh_var()
            return Var(tok.text)
        if tok.kind in ("name", "qatom"):
            self.next()
            name = tok.text
            if tok.kind == "qatom":
                name = re.sub(r"\\(.)", r"\1", name[1:-1])
            if self.peek().text == "(":
                self.next()
                args = [self.parse_expr()]
                while self.peek().text == ",":
                    self.next()
                    args.append(self.parse_expr())
                self.expect(")")
                return Struct(name, tuple(args))
            return Atom(name)
        if tok.text == "[":
            return self.parse_list()
        if tok.text == "(":
            self.next()
            items = [self.parse_expr()]
            while self.peek().text == ",":
                self.next()
                items.append(self.parse_expr())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            # (a, b, c) nests rightwards: ','(a, ','(b, c))
            out = items[-1]
            for item in reversed(items[:-1]):
                out = Struct(",", (item, out))
            return out
        raise self.error("expected a term")

    def parse_list(self) -> Term:
        self.expect("[")
        if self.peek().text == "]":
            self.next()
            return NIL
        items = [self.parse_expr()]
        while self.peek().text == ",":
            self.next()
            items.append(self.parse_expr())
        tail: Term = NIL
        if self.peek().text == "|":
            self.next()
            tail = self.parse_expr()
        self.expect("]")
        return make_list(items, tail)


def parse_program(source: str) -> list[Clause]:
    """Parse definition text into clauses in source order."""
    return _Parser(source).parse_program()


def parse_term(source: str) -> Term:
    """Parse a single term (no trailing dot); convenience for tests and I/O."""
    parser = _Parser(source)
    term = parser.parse_expr()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input after term: {tok.text!r}", tok.line, tok.column)
    return term


# ---------------------------------------------------------------------------
# Formatting
# ---------------------------------------------------------------------------

_PLAIN_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _format_real(value: float) -> str:
    text = repr(value)
    if "." not in text:
        # the tokenizer demands a decimal point: 1e-09 -> 1.0e-09, 3 -> 3.0
        mantissa, e, exponent = text.partition("e")
        text = mantissa + ".0" + (e + exponent if e else "")
    return text


def format_term(term: Term, bindings: Optional[dict] = None) -> str:
    """Canonical text; round-trips through the parser for ground terms."""
    if bindings is not None:
        term = resolve(term, bindings)
    if isinstance(term, Atom):
        if term.name == "[]" or _PLAIN_ATOM_RE.match(term.name):
            return term.name
        escaped = term.name.replace("\\", "\\\\").replace("'", "\\'")
        return f"'{escaped}'"
    if isinstance(term, Int):
        return str(term.value)
    if isinstance(term, Real):
        return _format_real(term.value)
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Struct):
        if term.functor == "." and len(term.args) == 2:
            items, tail = list_parts(term)
            inner = ", ".join(format_term(i) for i in items)
            if tail == NIL:
                return f"[{inner}]"
            return f"[{inner} | {format_term(tail)}]"
        if term.functor == ",":
            parts = []
            t: Term = term
            while isinstance(t, Struct) and t.functor == "," and len(t.args) == 2:
                parts.append(t.args[0])
                t = t.args[1]
            parts.append(t)
            return "(" + ", ".join(format_term(p) for p in parts) + ")"
        if term.functor in _OPERATOR_FUNCTORS and len(term.args) == 2:
            left, right = term.args
            return f"({format_term(left)} {term.functor} {format_term(right)})"
        if term.functor == "-" and len(term.args) == 1:
            return f"(- {format_term(term.args[0])})"
        inner = ", ".join(format_term(a) for a in term.args)
        return f"{term.functor}({inner})"
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Bindings and unification
# ---------------------------------------------------------------------------
#
# Bindings are a mutable dict from variable name to term, with an undo trail
# of variable names so the solver can backtrack cheaply.  ``unify`` offers the
# pure copying interface on top.


def walk(term: Term, bindings: dict) -> Term:
    while isinstance(term, Var):
        bound = bindings.get(term.name)
        if bound is None:
            return term
        term = bound
    return term


def resolve(term: Term, bindings: dict) -> Term:
    """Fully substitute bindings into a term (deep walk)."""
    term = walk(term, bindings)
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(resolve(a, bindings) for a in term.args))
    return term


def bind_var(name: str, value: Term, bindings: dict, trail: list) -> None:
    bindings[name] = value
    trail.append(name)


def undo_to(mark: int, bindings: dict, trail: list) -> None:
    while len(trail) > mark:
        entry = trail.pop()
        if isinstance(entry, str):
            del bindings[entry]


def unify_mut(a: Term, b: Term, bindings: dict, trail: list) -> bool:
    """Destructive unification; on failure the caller unwinds via the trail.

    No occurs check: the corpus never builds cyclic terms and standard
    interpreters omit it for speed.
    """
    a = walk(a, bindings)
    b = walk(b, bindings)
    if isinstance(a, Var):
        if isinstance(b, Var) and b.name == a.name:
            return True
        bind_var(a.name, b, bindings, trail)
        return True
    if isinstance(b, Var):
        bind_var(b.name, a, bindings, trail)
        return True
    if isinstance(a, Atom) and isinstance(b, Atom):
        return a.name == b.name
    if isinstance(a, Int) and isinstance(b, Int):
        return a.value == b.value
    if isinstance(a, Real) and isinstance(b, Real):
        return a.value == b.value
    if isinstance(a, Struct) and isinstance(b, Struct):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return False
        return all(unify_mut(x, y, bindings, trail) for x, y in zip(a.args, b.args))
    return False


def unify(a: Term, b: Term, bindings: Optional[dict] = None) -> Optional[dict]:
    """Pure unification: returns an extended bindings dict, or None on failure."""
    out = dict(bindings) if bindings else {}
    trail: list = []
    if unify_mut(a, b, out, trail):
        return out
    return None
