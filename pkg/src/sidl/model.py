"""Validated game definitions and state-dependent rule evaluation.

A definition is a clause base plus derived metadata: the game name, the
player roster (read off the account-initialising ``init/2`` clauses) and a
keyword index.  All rule evaluation against a state goes through a solver
whose ``fact/1`` and ``player/1`` virtuals answer from that state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .errors import DefinitionError, ValidationFailure
from .solver import KnowledgeBase, Solver, effect_virtual, enumerating_virtual
from .terms import (
    Atom, Clause, Int, Real, Struct, Term, Var,
    format_term, fresh_var, is_ground, list_parts, parse_program, resolve, unify,
)

log = logging.getLogger(__name__)

HEAD_ONLY_KEYWORDS = frozenset({
    "game", "name", "init", "hidden", "legal", "switch",
    "unlimited", "owned", "default", "do", "payoff",
})
BODY_ONLY_KEYWORDS = frozenset({
    "player", "fact", "create", "delete", "tocreate", "todelete", "does",
})
STATE_PREDICATES = frozenset({"fact", "does", "tocreate", "todelete"})


@dataclass(frozen=True, slots=True)
class Finding:
    severity: str  # "error" | "warning"
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.severity} at line {self.line}: {self.message}"

    def to_json(self) -> dict:
        return {"severity": self.severity, "line": self.line, "message": self.message}


# ---------------------------------------------------------------------------
# Switch resolution
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class PlayerController:
    player: Term


@dataclass(frozen=True, slots=True)
class ChanceController:
    probs: tuple  # aligned with the enumerated action list


Controller = Union[PlayerController, ChanceController]


@dataclass(frozen=True, slots=True)
class Enumerated:
    actions: tuple


@dataclass(frozen=True, slots=True)
class Unlimited:
    templates: tuple


@dataclass(frozen=True, slots=True)
class SwitchResolution:
    switch: Term
    controller: Controller
    actions: Union[Enumerated, Unlimited]
    resolved: Optional[Term] = None


# ---------------------------------------------------------------------------
# Definition and state
# ---------------------------------------------------------------------------


@dataclass
class GameDefinition:
    name: str
    kb: KnowledgeBase
    clauses: tuple
    players: tuple          # ground player terms, declaration order
    initial_accounts: tuple  # floats, parallel to players
    keyword_index: frozenset
    source: str = ""
    warnings: tuple = ()

    def __post_init__(self):
        self.player_texts = tuple(format_term(p) for p in self.players)
        self._hidden_cache: dict = {}

    def player_index(self, player: Term) -> int:
        try:
            return self.players.index(player)
        except ValueError:
            raise DefinitionError(f"not a declared player: {format_term(player)}")


@dataclass(frozen=True, slots=True)
class GameState:
    facts: frozenset
    accounts: tuple  # floats, parallel to GameDefinition.players
    chronon: int = 0


def sorted_facts(facts: Iterable[Term]) -> list:
    return sorted(facts, key=format_term)


def make_solver(defn: GameDefinition,
                state: Optional[GameState] = None,
                does: Sequence[tuple] = (),
                created: Sequence[Term] = (),
                deleted: Sequence[Term] = ()) -> Solver:
    """Solver over the definition with the engine-supplied virtual predicates."""
    facts = sorted_facts(state.facts) if state is not None else []
    fact_rows = [(w,) for w in facts]
    player_rows = [(p,) for p in defn.players]
    does_rows = [tuple(pair) for pair in does]
    created_rows = [(w,) for w in created]
    deleted_rows = [(w,) for w in deleted]
    virtuals = {
        ("fact", 1): enumerating_virtual(lambda: fact_rows),
        ("player", 1): enumerating_virtual(lambda: player_rows),
        ("does", 2): enumerating_virtual(lambda: does_rows),
        ("tocreate", 1): enumerating_virtual(lambda: created_rows),
        ("todelete", 1): enumerating_virtual(lambda: deleted_rows),
        ("create", 1): effect_virtual("create"),
        ("delete", 1): effect_virtual("delete"),
    }
    return Solver(defn.kb, virtuals)


# ---------------------------------------------------------------------------
# Validation and loading
# ---------------------------------------------------------------------------


def _clause_key(clause: Clause) -> tuple[str, int]:
    head = clause.head
    if isinstance(head, Atom):
        return head.name, 0
    return head.functor, len(head.args)


def _called_names(term: Term) -> set[str]:
    """Every functor/atom name occurring in a body goal, nested included."""
    names: set[str] = set()
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Atom):
            names.add(t.name)
        elif isinstance(t, Struct):
            if t.functor not in (".",):
                names.add(t.functor)
            stack.extend(t.args)
    return names


def validate(clauses: Sequence[Clause]) -> list[Finding]:
    """Keyword-placement and structural checks; one finding per violation."""
    findings: list[Finding] = []
    name_clauses = [c for c in clauses if _clause_key(c) in (("game", 1), ("name", 1))]
    if not name_clauses:
        findings.append(Finding("error", 0, "missing name clause (game/1 or name/1)"))
    elif len(name_clauses) > 1:
        for extra in name_clauses[1:]:
            findings.append(Finding("error", extra.line, "duplicate name clause"))
    if name_clauses:
        arg = name_clauses[0].head.args[0]
        if not isinstance(arg, Atom):
            findings.append(Finding("error", name_clauses[0].line,
                                    "game name must be an atom"))

    for clause in clauses:
        name, _ = _clause_key(clause)
        if name in BODY_ONLY_KEYWORDS:
            findings.append(Finding(
                "error", clause.line,
                f"body-only keyword {name!r} used as a clause head"))
        for goal in clause.body:
            bad = _called_names(goal) & HEAD_ONLY_KEYWORDS
            for kw in sorted(bad):
                findings.append(Finding(
                    "error", clause.line,
                    f"head-only keyword {kw!r} used in a rule body"))

    # hidden/2 must stay state-independent: nothing reachable from its body
    # may consult fact/does/tocreate/todelete.
    callgraph: dict[str, set[str]] = {}
    for clause in clauses:
        name, _ = _clause_key(clause)
        callees = set()
        for goal in clause.body:
            callees |= _called_names(goal)
        callgraph.setdefault(name, set()).update(callees)
    for clause in clauses:
        if _clause_key(clause)[0] != "hidden":
            continue
        seen: set[str] = set()
        frontier = set()
        for goal in clause.body:
            frontier |= _called_names(goal)
        while frontier:
            pred = frontier.pop()
            if pred in seen:
                continue
            seen.add(pred)
            if pred in STATE_PREDICATES:
                findings.append(Finding(
                    "error", clause.line,
                    f"hidden/2 body depends on state predicate {pred!r}"))
                break
            frontier |= callgraph.get(pred, set())
    return findings


def _derive_players(kb: KnowledgeBase) -> tuple[list, list, list]:
    """Players and initial accounts from init/2 solutions."""
    findings: list[Finding] = []
    solver = Solver(kb, {
        ("fact", 1): enumerating_virtual(lambda: []),
        ("player", 1): enumerating_virtual(lambda: []),
    })
    players: list = []
    accounts: list = []
    goal = Struct("init", (Var("N"), Var("M")))
    for n, m in solver.distinct(goal, ["N", "M"]):
        if not isinstance(m, (Int, Real)):
            findings.append(Finding(
                "error", 0, f"init/2 account for {format_term(n)} is not numeric"))
            continue
        amount = float(m.value)
        if n in players:
            if accounts[players.index(n)] != amount:
                findings.append(Finding(
                    "error", 0,
                    f"conflicting init/2 amounts for player {format_term(n)}"))
            continue
        players.append(n)
        accounts.append(amount)
    return players, accounts, findings


def load_definition(clauses: Sequence[Clause], source: str = "") -> GameDefinition:
    """Validate and assemble a GameDefinition; raises ValidationFailure on errors."""
    findings = validate(clauses)
    kb = KnowledgeBase(clauses)
    players, accounts, more = _derive_players(kb)
    findings.extend(more)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        raise ValidationFailure(errors)
    name_clause = next(c for c in clauses if _clause_key(c) in (("game", 1), ("name", 1)))
    keyword_index = frozenset(
        kw for kw in ("init", "legal", "switch", "unlimited", "owned",
                      "default", "do", "payoff", "hidden")
        if any(_clause_key(c)[0] == kw for c in clauses))
    return GameDefinition(
        name=name_clause.head.args[0].name,
        kb=kb,
        clauses=tuple(clauses),
        players=tuple(players),
        initial_accounts=tuple(accounts),
        keyword_index=keyword_index,
        source=source,
        warnings=tuple(f for f in findings if f.severity == "warning"),
    )


def load_source(source: str) -> GameDefinition:
    return load_definition(parse_program(source), source)


# ---------------------------------------------------------------------------
# State evaluation
# ---------------------------------------------------------------------------


def initial_state(defn: GameDefinition) -> GameState:
    """Facts from init/1 solutions, accounts from init/2, chronon 0."""
    solver = make_solver(defn)
    words = [row[0] for row in solver.distinct(Struct("init", (Var("F"),)), ["F"])]
    return GameState(facts=frozenset(words),
                     accounts=defn.initial_accounts,
                     chronon=0)


def _normalize_vars(term: Term, counter: list) -> Term:
    if isinstance(term, Var):
        counter[0] += 1
        return Var(f"_T{counter[0]}")
    if isinstance(term, Struct):
        return Struct(term.functor, tuple(_normalize_vars(a, counter) for a in term.args))
    return term


def _classify_controller(defn: GameDefinition, switch: Term, owner: Term,
                         actions: Union[Enumerated, Unlimited]) -> Controller:
    if owner in defn.players:
        return PlayerController(owner)
    if isinstance(owner, Struct) and owner.functor == "equal" and len(owner.args) == 1:
        n = owner.args[0]
        if not isinstance(actions, Enumerated):
            raise DefinitionError(
                f"chance switch {format_term(switch)} needs an enumerated action set")
        if not isinstance(n, Int) or n.value != len(actions.actions):
            raise DefinitionError(
                f"equal({format_term(n)}) does not match the "
                f"{len(actions.actions)} actions of switch {format_term(switch)}")
        if not actions.actions:
            raise DefinitionError(
                f"chance switch {format_term(switch)} has an empty action set")
        return ChanceController(tuple(1.0 / n.value for _ in range(n.value)))
    items, tail = list_parts(owner)
    if items and tail == Atom("[]") and all(isinstance(i, (Int, Real)) for i in items):
        if not isinstance(actions, Enumerated):
            raise DefinitionError(
                f"chance switch {format_term(switch)} needs an enumerated action set")
        probs = tuple(float(i.value) for i in items)
        if len(probs) != len(actions.actions):
            raise DefinitionError(
                f"distribution length {len(probs)} does not match the "
                f"{len(actions.actions)} actions of switch {format_term(switch)}")
        if any(p < 0.0 or p > 1.0 for p in probs) or abs(sum(probs) - 1.0) > 1e-9:
            raise DefinitionError(
                f"distribution for switch {format_term(switch)} is not a "
                "probability list summing to 1")
        return ChanceController(probs)
    raise DefinitionError(
        f"switch {format_term(switch)} owned by non-player term {format_term(owner)}")


def legal_switches(defn: GameDefinition, state: GameState) -> list[SwitchResolution]:
    """Legal switches in enumeration order with controller and action space."""
    solver = make_solver(defn, state)
    switches = [row[0] for row in solver.distinct(Struct("legal", (Var("I"),)), ["I"])]
    out: list[SwitchResolution] = []
    for sw in switches:
        owners = solver.distinct(Struct("owned", (sw, Var("D"))), ["D"])
        if not owners:
            raise DefinitionError(f"legal switch {format_term(sw)} has no owner")
        if len(owners) > 1:
            log.warning("switch %s has %d owner solutions; taking the first",
                        format_term(sw), len(owners))
        owner = owners[0][0]

        templates: list = []
        seen_templates: set[str] = set()
        tvar = Var("T")
        for bindings in solver.solve(Struct("unlimited", (sw, tvar))):
            template = resolve(tvar, bindings)
            key = format_term(_normalize_vars(template, [0]))
            if key not in seen_templates:
                seen_templates.add(key)
                templates.append(template)
        if templates:
            actions: Union[Enumerated, Unlimited] = Unlimited(tuple(templates))
        else:
            rows = solver.distinct(Struct("switch", (sw, Var("A"))), ["A"])
            actions = Enumerated(tuple(row[0] for row in rows))
        out.append(SwitchResolution(
            switch=sw,
            controller=_classify_controller(defn, sw, owner, actions),
            actions=actions,
        ))

    seen_sets: dict[tuple, Term] = {}
    for res in out:
        if isinstance(res.actions, Enumerated) and res.actions.actions:
            prior = seen_sets.get(res.actions.actions)
            if prior is not None:
                log.warning(
                    "switches %s and %s enumerate identical action sets",
                    format_term(prior), format_term(res.switch))
            seen_sets[res.actions.actions] = res.switch
    return out


@dataclass(frozen=True, slots=True)
class Rejection:
    reason: str
    detail: str = ""


_TYPED_SLOTS = {"double": Real, "int": Int}


def match_template(template: Term, action: Term) -> bool:
    """Unify after replacing typed slots like (price, double) by fresh variables."""
    slots: list = []

    def repl(t: Term) -> Term:
        if (isinstance(t, Struct) and t.functor == "," and len(t.args) == 2
                and isinstance(t.args[1], Atom) and t.args[1].name in _TYPED_SLOTS):
            v = fresh_var("_Slot")
            slots.append((v, _TYPED_SLOTS[t.args[1].name]))
            return v
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(repl(a) for a in t.args))
        return t

    bindings = unify(repl(template), action)
    if bindings is None:
        return False
    return all(isinstance(resolve(v, bindings), kind) for v, kind in slots)


def check_action(defn: GameDefinition, state: GameState, switch: Term, action: Term,
                 legal: Optional[list] = None) -> Optional[Rejection]:
    """None when accepted, otherwise a structured rejection."""
    if not is_ground(switch) or not is_ground(action):
        return Rejection("unknown_switch", "switch and action must be ground")
    if legal is None:
        legal = legal_switches(defn, state)
    res = next((r for r in legal if r.switch == switch), None)
    if res is None:
        return Rejection("switch_not_legal", format_term(switch))
    if isinstance(res.actions, Enumerated):
        if action not in res.actions.actions:
            return Rejection("action_not_in_set", format_term(action))
        return None
    if not any(match_template(t, action) for t in res.actions.templates):
        return Rejection("template_mismatch", format_term(action))
    solver = make_solver(defn, state)
    if not solver.ask(Struct("switch", (switch, action))):
        return Rejection("guard_unprovable", format_term(action))
    return None


def visible_words(defn: GameDefinition, player: Term, words: Iterable[Term]) -> list:
    """The words for which hidden(W, player) has no solution; order preserved.

    hidden/2 is state-independent by validation, so results are cached on the
    definition.
    """
    solver = None
    player_key = format_term(player)
    out = []
    for word in words:
        key = (player_key, format_term(word))
        hidden = defn._hidden_cache.get(key)
        if hidden is None:
            if solver is None:
                solver = make_solver(defn)
            hidden = solver.ask(Struct("hidden", (word, player)))
            defn._hidden_cache[key] = hidden
        if not hidden:
            out.append(word)
    return out
