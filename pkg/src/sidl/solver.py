"""SLD resolution over a clause base.

Depth-first, left-to-right, clause-source-order enumeration with
negation-as-failure under the closed world assumption.  Bindings are a
mutable dict with an undo trail, so backtracking is cheap; the same trail
carries create/delete intents recorded during a proof, which means effects
from abandoned branches unwind for free.

Callers can register *virtual predicates* (fact/1, player/1, does/2, ...)
that enumerate answers from engine state instead of clauses.  A virtual
shadows any same-named clauses; validation forbids such clauses anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

from .errors import BudgetExceededError, DefinitionError, EvaluationError
from .terms import (
    NIL, Atom, Clause, Int, Real, Struct, Term, Var,
    format_term, is_ground, list_parts, make_list, resolve, unify_mut, walk,
)

DEFAULT_BUDGET = 10_000_000

RESERVED_VIRTUALS = {
    ("fact", 1), ("player", 1), ("does", 2),
    ("tocreate", 1), ("todelete", 1), ("create", 1), ("delete", 1),
}


@dataclass(frozen=True, slots=True)
class EffectEntry:
    """One create/delete intent recorded on the proof trail."""

    kind: str  # "create" | "delete"
    word: Term


class KnowledgeBase:
    """Clauses indexed by (functor, arity); buckets keep source order."""

    def __init__(self, clauses: Sequence[Clause]):
        self.clauses = tuple(clauses)
        self._index: dict[tuple[str, int], list[Clause]] = {}
        for clause in self.clauses:
            head = clause.head
            if isinstance(head, Atom):
                key = (head.name, 0)
            else:
                key = (head.functor, len(head.args))
            self._index.setdefault(key, []).append(clause)

    def bucket(self, name: str, arity: int) -> list[Clause]:
        return self._index.get((name, arity), [])

    def defined(self, name: str, arity: int) -> bool:
        return (name, arity) in self._index


VirtualFn = Callable[["_Proof", tuple], Iterator[None]]


class Solver:
    """Entry point for queries; each public call runs an isolated proof."""

    def __init__(self, kb: KnowledgeBase,
                 virtuals: Optional[dict[tuple[str, int], VirtualFn]] = None,
                 budget: int = DEFAULT_BUDGET):
        self.kb = kb
        self.virtuals = dict(virtuals or {})
        self.budget = budget

    def solve(self, goal: Term) -> Iterator[dict]:
        """Enumerate solutions; yields the live bindings dict per solution.

        The dict is mutated on backtracking: resolve what you need before
        advancing the iterator.
        """
        proof = _Proof(self)
        for _ in proof._solve_goal(goal):
            yield proof.bindings

    def ask(self, goal: Term) -> bool:
        for _ in self.solve(goal):
            return True
        return False

    def first(self, goal: Term, names: Sequence[str]) -> Optional[tuple]:
        for bindings in self.solve(goal):
            return tuple(resolve(Var(n), bindings) for n in names)
        return None

    def distinct(self, goal: Term, names: Sequence[str]) -> list[tuple]:
        """Deduplicated projections over all solutions, first-occurrence order.

        Every solution must ground the projection variables.
        """
        seen: set = set()
        out: list[tuple] = []
        for bindings in self.solve(goal):
            row = tuple(resolve(Var(n), bindings) for n in names)
            for value in row:
                if not is_ground(value):
                    raise DefinitionError(
                        f"solution of {format_term(goal)} leaves projection unbound: "
                        f"{format_term(value)}")
            if row not in seen:
                seen.add(row)
                out.append(row)
        return out

    def prove_first_with_effects(self, goal: Term):
        """Commit to the first derivation of goal; returns (bindings, effects).

        Effects of abandoned branches have been unwound; returns None when no
        derivation exists (the trail carries nothing in that case).
        """
        proof = _Proof(self, effects_allowed=True)
        for _ in proof._solve_goal(goal):
            effects = [e for e in proof.trail if isinstance(e, EffectEntry)]
            return dict(proof.bindings), effects
        return None


class _Proof:
    __slots__ = ("solver", "bindings", "trail", "steps", "findall_depth",
                 "effects_allowed", "rename_n")

    def __init__(self, solver: Solver, effects_allowed: bool = False):
        self.solver = solver
        self.bindings: dict = {}
        self.trail: list = []
        self.steps = 0
        self.findall_depth = 0
        self.effects_allowed = effects_allowed
        self.rename_n = 0

    # -- trail ---------------------------------------------------------------

    def _mark(self) -> int:
        return len(self.trail)

    def _undo(self, mark: int) -> None:
        trail, bindings = self.trail, self.bindings
        while len(trail) > mark:
            entry = trail.pop()
            if isinstance(entry, str):
                del bindings[entry]

    def _unify_one(self, a: Term, b: Term) -> Iterator[None]:
        mark = self._mark()
        if unify_mut(a, b, self.bindings, self.trail):
            yield
        self._undo(mark)

    # -- core ----------------------------------------------------------------

    def _solve_goal(self, goal: Term) -> Iterator[None]:
        self.steps += 1
        if self.steps > self.solver.budget:
            raise BudgetExceededError(
                f"resolution budget of {self.solver.budget} steps exhausted")
        goal = walk(goal, self.bindings)
        if isinstance(goal, Atom):
            name, args = goal.name, ()
        elif isinstance(goal, Struct):
            name, args = goal.functor, goal.args
        else:
            raise DefinitionError(f"goal is not callable: {format_term(goal, self.bindings)}")
        key = (name, len(args))
        virtual = self.solver.virtuals.get(key)
        if virtual is not None:
            yield from virtual(self, args)
            return
        builtin = _BUILTINS.get(key)
        if builtin is not None:
            yield from builtin(self, args)
            return
        yield from self._solve_user(goal, name, len(args))

    def _solve_user(self, goal: Term, name: str, arity: int) -> Iterator[None]:
        bucket = self.solver.kb.bucket(name, arity)
        mark = self._mark()
        for clause in bucket:
            self._undo(mark)
            head, body = self._rename(clause)
            if unify_mut(goal, head, self.bindings, self.trail):
                yield from self._solve_goals(body, 0)
        self._undo(mark)

    def _solve_goals(self, goals: tuple, index: int) -> Iterator[None]:
        if index >= len(goals):
            yield
            return
        for _ in self._solve_goal(goals[index]):
            yield from self._solve_goals(goals, index + 1)

    def _rename(self, clause: Clause) -> tuple[Term, tuple]:
        self.rename_n += 1
        suffix = f"~{self.rename_n}"
        mapping: dict[str, Var] = {}

        def ren(t: Term) -> Term:
            if isinstance(t, Var):
                v = mapping.get(t.name)
                if v is None:
                    v = Var(t.name + suffix)
                    mapping[t.name] = v
                return v
            if isinstance(t, Struct):
                return Struct(t.functor, tuple(ren(a) for a in t.args))
            return t

        return ren(clause.head), tuple(ren(g) for g in clause.body)

    # -- arithmetic ----------------------------------------------------------

    def eval_number(self, term: Term):
        """Evaluate an arithmetic expression to a Python int or float."""
        t = walk(term, self.bindings)
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Real):
            return t.value
        if isinstance(t, Var):
            raise EvaluationError(f"unbound variable {t.name} in arithmetic")
        if isinstance(t, Struct):
            op = t.functor
            if op == "-" and len(t.args) == 1:
                return -self.eval_number(t.args[0])
            if len(t.args) == 2:
                a = self.eval_number(t.args[0])
                b = self.eval_number(t.args[1])
                if op == "+":
                    return a + b
                if op == "-":
                    return a - b
                if op == "*":
                    return a * b
                if op == "/":
                    if b == 0:
                        raise EvaluationError("division by zero")
                    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
                        return a // b
                    return a / b
                if op == "^":
                    return a ** b
                if op == "min":
                    return min(a, b)
        raise EvaluationError(
            f"not an arithmetic expression: {format_term(term, self.bindings)}")


def _number_term(value) -> Term:
    return Int(value) if isinstance(value, int) else Real(value)


# ---------------------------------------------------------------------------
# Builtins (exactly what the shipped definitions exercise)
# ---------------------------------------------------------------------------


def _bi_unify(proof: _Proof, args) -> Iterator[None]:
    yield from proof._unify_one(args[0], args[1])


def _bi_is(proof: _Proof, args) -> Iterator[None]:
    value = proof.eval_number(args[1])
    yield from proof._unify_one(args[0], _number_term(value))


def _compare(op):
    def run(proof: _Proof, args) -> Iterator[None]:
        a = proof.eval_number(args[0])
        b = proof.eval_number(args[1])
        if op(a, b):
            yield
    return run


def _bi_not(proof: _Proof, args) -> Iterator[None]:
    mark = proof._mark()
    found = False
    for _ in proof._solve_goal(args[0]):
        found = True
        break
    proof._undo(mark)
    if not found:
        yield


def _bi_between(proof: _Proof, args) -> Iterator[None]:
    low = walk(args[0], proof.bindings)
    high = walk(args[1], proof.bindings)
    if not isinstance(low, Int) or not isinstance(high, Int):
        raise EvaluationError("between/3 requires integer bounds")
    x = walk(args[2], proof.bindings)
    if isinstance(x, Int):
        if low.value <= x.value <= high.value:
            yield
        return
    for i in range(low.value, high.value + 1):
        yield from proof._unify_one(args[2], Int(i))


def _bi_member(proof: _Proof, args) -> Iterator[None]:
    x, lst = args
    t = walk(lst, proof.bindings)
    while isinstance(t, Struct) and t.functor == "." and len(t.args) == 2:
        yield from proof._unify_one(x, t.args[0])
        t = walk(t.args[1], proof.bindings)


def _bi_append(proof: _Proof, args) -> Iterator[None]:
    a = resolve(args[0], proof.bindings)
    items_a, tail_a = list_parts(a)
    if tail_a == NIL:
        yield from proof._unify_one(args[2], make_list(items_a, args[1]))
        return
    c = resolve(args[2], proof.bindings)
    items_c, tail_c = list_parts(c)
    if tail_c == NIL:
        mark = proof._mark()
        for i in range(len(items_c) + 1):
            proof._undo(mark)
            ok = unify_mut(args[0], make_list(items_c[:i]), proof.bindings, proof.trail) \
                and unify_mut(args[1], make_list(items_c[i:]), proof.bindings, proof.trail)
            if ok:
                yield
        proof._undo(mark)


def _bi_length(proof: _Proof, args) -> Iterator[None]:
    lst = resolve(args[0], proof.bindings)
    items, tail = list_parts(lst)
    if tail == NIL:
        yield from proof._unify_one(args[1], Int(len(items)))
        return
    n = walk(args[1], proof.bindings)
    if isinstance(n, Int) and isinstance(lst, Var) and n.value >= 0:
        from .terms import fresh_var
        yield from proof._unify_one(args[0], make_list([fresh_var() for _ in range(n.value)]))


def _bi_nth1(proof: _Proof, args) -> Iterator[None]:
    lst = resolve(args[1], proof.bindings)
    items, tail = list_parts(lst)
    if tail != NIL:
        raise EvaluationError("nth1/3 requires a proper list")
    i = walk(args[0], proof.bindings)
    if isinstance(i, Int):
        if 1 <= i.value <= len(items):
            yield from proof._unify_one(args[2], items[i.value - 1])
        return
    mark = proof._mark()
    for idx, elem in enumerate(items, 1):
        proof._undo(mark)
        ok = unify_mut(args[0], Int(idx), proof.bindings, proof.trail) \
            and unify_mut(args[2], elem, proof.bindings, proof.trail)
        if ok:
            yield
    proof._undo(mark)


def _bi_findall(proof: _Proof, args) -> Iterator[None]:
    template, goal, out = args
    results = []
    mark = proof._mark()
    proof.findall_depth += 1
    try:
        for _ in proof._solve_goal(goal):
            results.append(resolve(template, proof.bindings))
    finally:
        proof.findall_depth -= 1
    proof._undo(mark)
    yield from proof._unify_one(out, make_list(results))


def _bi_maxmember(proof: _Proof, args) -> Iterator[None]:
    # Argument order (List, Max), read off corpus usage maxmember(Ps, B).
    lst = resolve(args[0], proof.bindings)
    items, tail = list_parts(lst)
    if tail != NIL or not items:
        return
    values = []
    for item in items:
        if not isinstance(item, (Int, Real)):
            return
        values.append(item.value)
    best = items[0]
    for item in items[1:]:
        if item.value > best.value:
            best = item
    yield from proof._unify_one(args[1], best)


def _bi_getsubset(proof: _Proof, args) -> Iterator[None]:
    lst = resolve(args[1], proof.bindings)
    if not is_ground(lst):
        raise DefinitionError("getsubset/2 requires a ground list")
    items, tail = list_parts(lst)
    if tail != NIL:
        raise DefinitionError("getsubset/2 requires a proper list")

    def subsets(rest: list) -> Iterator[list]:
        # Exclusion-first: all subsets without the head, then head prepended.
        if not rest:
            yield []
            return
        head = rest[0]
        for sub in subsets(rest[1:]):
            yield sub
        for sub in subsets(rest[1:]):
            yield [head] + sub

    for sub in subsets(items):
        yield from proof._unify_one(args[0], make_list(sub))


def _bi_integer(proof: _Proof, args) -> Iterator[None]:
    if isinstance(walk(args[0], proof.bindings), Int):
        yield


_BUILTINS: dict[tuple[str, int], Callable] = {
    ("=", 2): _bi_unify,
    ("is", 2): _bi_is,
    ("<", 2): _compare(lambda a, b: a < b),
    (">", 2): _compare(lambda a, b: a > b),
    (">=", 2): _compare(lambda a, b: a >= b),
    ("=<", 2): _compare(lambda a, b: a <= b),
    ("not", 1): _bi_not,
    ("between", 3): _bi_between,
    ("member", 2): _bi_member,
    ("append", 3): _bi_append,
    ("length", 2): _bi_length,
    ("nth1", 3): _bi_nth1,
    ("findall", 3): _bi_findall,
    ("maxmember", 2): _bi_maxmember,
    ("getsubset", 2): _bi_getsubset,
    ("integer", 1): _bi_integer,
}

BUILTIN_KEYS = frozenset(_BUILTINS)


# ---------------------------------------------------------------------------
# Virtual predicate constructors used by the model and engine layers
# ---------------------------------------------------------------------------


def enumerating_virtual(rows: Callable[[], Sequence[tuple]]) -> VirtualFn:
    """Virtual whose answers are tuples of terms unified against the call args."""

    def run(proof: _Proof, args) -> Iterator[None]:
        mark = proof._mark()
        for row in rows():
            proof._undo(mark)
            if all(unify_mut(a, t, proof.bindings, proof.trail) for a, t in zip(args, row)):
                yield
        proof._undo(mark)

    return run


def effect_virtual(kind: str) -> VirtualFn:
    """create/1 or delete/1: records an intent on the trail and succeeds once."""

    def run(proof: _Proof, args) -> Iterator[None]:
        if not proof.effects_allowed:
            raise DefinitionError(f"{kind}/1 is not allowed in this context")
        if proof.findall_depth:
            raise DefinitionError(f"{kind}/1 inside findall/3 is not allowed")
        word = resolve(args[0], proof.bindings)
        if not is_ground(word):
            raise DefinitionError(f"{kind}/1 requires a ground word, got {format_term(word)}")
        proof.trail.append(EffectEntry(kind, word))
        yield

    return run
