"""Chronon-based game management.

One chronon closes in a fixed phase order: chance sampling, submission /
default resolution, effect-captured ``do`` execution against the pre-chronon
fact set, payoff accrual, event emission, and finally delta application.
Given (definition, script, seed) the whole run is byte-deterministic, which
is what the replay log format relies on.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from .errors import AnalysisError, DefinitionError
from .model import (
    ChanceController, Enumerated, GameDefinition, GameState, PlayerController,
    Rejection, SwitchResolution, Unlimited, check_action, initial_state,
    legal_switches, make_solver, visible_words,
)
from .terms import Int, Real, Struct, Term, Var, format_term


@dataclass(frozen=True, slots=True)
class ChrononConfig:
    duration_ms: int = 0      # 0: close once every live player switch is resolved
    max_chronons: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.max_chronons is not None and self.max_chronons < 1:
            raise ValueError("max_chronons must be >= 1")

    def to_json(self) -> dict:
        return {"duration_ms": self.duration_ms,
                "max_chronons": self.max_chronons,
                "seed": self.seed}


@dataclass(frozen=True, slots=True)
class SubmittedAction:
    player: Term
    switch: Term
    action: Term
    arrival: int


@dataclass(frozen=True, slots=True)
class ResolvedAction:
    switch: Term
    action: Term
    source: str  # "submitted" | "default" | "chance"
    chance_index: Optional[int] = None

    def to_json(self) -> dict:
        out = {"switch": format_term(self.switch),
               "action": format_term(self.action),
               "source": self.source}
        if self.chance_index is not None:
            out["chance_index"] = self.chance_index
        return out


@dataclass(frozen=True, slots=True)
class TransitionRecord:
    chronon: int
    resolved: tuple
    created: tuple
    deleted: tuple
    payoffs: dict
    accounts_after: dict
    errors: tuple = ()

    def to_json(self) -> dict:
        return {
            "chronon": self.chronon,
            "resolved": [r.to_json() for r in self.resolved],
            "created": [format_term(w) for w in self.created],
            "deleted": [format_term(w) for w in self.deleted],
            "payoffs": self.payoffs,
            "accounts_after": self.accounts_after,
            "errors": list(self.errors),
        }


# -- events -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class RulesText:
    source: str


@dataclass(frozen=True, slots=True)
class InitSnapshot:
    facts: tuple   # canonical texts, visible to the recipient
    accounts: dict


@dataclass(frozen=True, slots=True)
class ChrononOpen:
    number: int
    deadline_ms: int


@dataclass(frozen=True, slots=True)
class ActionAck:
    switch: str


@dataclass(frozen=True, slots=True)
class ActionReject:
    switch: str
    reason: str
    detail: str = ""


@dataclass(frozen=True, slots=True)
class Delta:
    created: tuple
    deleted: tuple


@dataclass(frozen=True, slots=True)
class Accounts:
    accounts: dict


@dataclass(frozen=True, slots=True)
class GameEnd:
    accounts: dict


EngineEvent = Union[RulesText, InitSnapshot, ChrononOpen, ActionAck,
                    ActionReject, Delta, Accounts, GameEnd]


# -- sampling ---------------------------------------------------------------


def sample_index(rng: random.Random, probs: Sequence[float]) -> int:
    """One uniform draw mapped to the cumulative distribution.

    Returns the first index whose cumulative probability exceeds the draw;
    the documented procedure for replay determinism.
    """
    u = rng.random()
    cum = 0.0
    for i, p in enumerate(probs):
        cum += p
        if u < cum:
            return i
    return len(probs) - 1


def derive_seed(seed: int, index: int) -> int:
    """splitmix64 over (seed + index); per-playout seed derivation."""
    z = (seed + index + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


# -- accounts helpers -------------------------------------------------------


def account_map(defn: GameDefinition, state: GameState) -> dict:
    return dict(zip(defn.player_texts, state.accounts))


def definition_hash(defn: GameDefinition) -> str:
    return hashlib.sha256(defn.source.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Chronon transition
# ---------------------------------------------------------------------------


def is_terminal(defn: GameDefinition, state: GameState) -> bool:
    return not legal_switches(defn, state)


def _default_action(defn: GameDefinition, state: GameState, switch: Term) -> Optional[Term]:
    solver = make_solver(defn, state)
    row = solver.first(Struct("default", (switch, Var("A"))), ["A"])
    return row[0] if row else None


def resolve_actions(defn: GameDefinition, state: GameState,
                    legal: Sequence[SwitchResolution],
                    submissions: Sequence[SubmittedAction],
                    rng: Optional[random.Random],
                    forced: Optional[dict] = None) -> list[ResolvedAction]:
    """Phases 1-2: chance sampling, then submission/default per player switch.

    ``forced`` (analyzer use) maps canonical switch text to the action to take,
    bypassing sampling and defaults; switches absent from it stay unresolved.
    """
    by_switch: dict[str, SubmittedAction] = {}
    for sub in sorted(submissions, key=lambda s: s.arrival):
        by_switch[format_term(sub.switch)] = sub  # last valid wins

    resolved: list[ResolvedAction] = []
    for res in legal:
        key = format_term(res.switch)
        is_chance = isinstance(res.controller, ChanceController)
        if forced is not None:
            action = forced.get(key)
            if action is None:
                continue
            if is_chance:
                idx = res.actions.actions.index(action)
                resolved.append(ResolvedAction(res.switch, action, "chance", idx))
            else:
                resolved.append(ResolvedAction(res.switch, action, "submitted"))
            continue
        if is_chance:
            if not isinstance(res.actions, Enumerated):
                raise DefinitionError(
                    f"chance switch {key} has no enumerated action set")
            idx = sample_index(rng, res.controller.probs)
            resolved.append(ResolvedAction(
                res.switch, res.actions.actions[idx], "chance", idx))
            continue
        sub = by_switch.get(key)
        if sub is not None:
            resolved.append(ResolvedAction(res.switch, sub.action, "submitted"))
            continue
        default = _default_action(defn, state, res.switch)
        if default is not None:
            resolved.append(ResolvedAction(res.switch, default, "default"))
        # no submission, no default: the switch stays unresolved this chronon
    return resolved


def _append_unique(target: list, word: Term) -> None:
    if word not in target:
        target.append(word)


def close_chronon(defn: GameDefinition, state: GameState,
                  submissions: Sequence[SubmittedAction],
                  rng: Optional[random.Random],
                  legal: Optional[list] = None,
                  forced: Optional[dict] = None):
    """Run one full chronon; returns (new state, record, per-player events)."""
    if legal is None:
        legal = legal_switches(defn, state)
    if not legal:
        raise DefinitionError("cannot close a chronon in a terminal state")

    resolved = resolve_actions(defn, state, legal, submissions, rng, forced)
    does_pairs = [(r.switch, r.action) for r in resolved]
    chronon = state.chronon + 1

    created: list = []
    deleted: list = []
    errors: list[str] = []
    for r in resolved:
        solver = make_solver(defn, state, does=does_pairs,
                             created=created, deleted=deleted)
        outcome = solver.prove_first_with_effects(Struct("do", (r.action,)))
        if outcome is None:
            errors.append(
                f"do({format_term(r.action)}) unprovable for switch "
                f"{format_term(r.switch)}")
            continue
        _, effects = outcome
        for effect in effects:
            if effect.kind == "create":
                _append_unique(created, effect.word)
            else:
                _append_unique(deleted, effect.word)

    payoffs: dict[str, float] = {}
    new_accounts = []
    for player, before, text in zip(defn.players, state.accounts, defn.player_texts):
        solver = make_solver(defn, state, does=does_pairs,
                             created=created, deleted=deleted)
        total = 0.0
        rows = solver.distinct(Struct("payoff", (player, Var("R"))), ["R"])
        for (amount,) in rows:
            if not isinstance(amount, (Int, Real)):
                raise DefinitionError(
                    f"payoff for {text} is not numeric: {format_term(amount)}")
            total += float(amount.value)
        payoffs[text] = total
        new_accounts.append(before + total)

    accounts_after = dict(zip(defn.player_texts, new_accounts))
    record = TransitionRecord(
        chronon=chronon,
        resolved=tuple(resolved),
        created=tuple(created),
        deleted=tuple(deleted),
        payoffs=payoffs,
        accounts_after=accounts_after,
        errors=tuple(errors),
    )

    events: dict[str, list[EngineEvent]] = {}
    for player, text in zip(defn.players, defn.player_texts):
        batch: list[EngineEvent] = [
            Delta(
                created=tuple(format_term(w) for w in visible_words(defn, player, created)),
                deleted=tuple(format_term(w) for w in visible_words(defn, player, deleted)),
            ),
            Accounts(accounts=dict(accounts_after)),
        ]
        events[text] = batch

    new_facts = (state.facts - set(deleted)) | set(created)
    new_state = GameState(facts=frozenset(new_facts),
                          accounts=tuple(new_accounts),
                          chronon=chronon)
    return new_state, record, events


def begin_game(defn: GameDefinition, config: ChrononConfig):
    """Initial state plus the per-player opening batches (rules + snapshot)."""
    state = initial_state(defn)
    accounts = account_map(defn, state)
    events: dict[str, list[EngineEvent]] = {}
    from .model import sorted_facts
    facts = sorted_facts(state.facts)
    for player, text in zip(defn.players, defn.player_texts):
        visible = visible_words(defn, player, facts)
        events[text] = [
            RulesText(defn.source),
            InitSnapshot(facts=tuple(format_term(w) for w in visible),
                         accounts=dict(accounts)),
        ]
    return state, events


# ---------------------------------------------------------------------------
# Stateful session driver
# ---------------------------------------------------------------------------


class Game:
    """One running game: submission intake plus chronon advancement."""

    def __init__(self, defn: GameDefinition, config: ChrononConfig):
        self.defn = defn
        self.config = config
        self.rng = random.Random(config.seed)
        self.state: Optional[GameState] = None
        self.records: list[TransitionRecord] = []
        self._pending: dict[str, SubmittedAction] = {}
        self._arrival = 0
        self._legal: Optional[list] = None

    def begin(self):
        self.state, events = begin_game(self.defn, self.config)
        return events

    @property
    def legal(self) -> list:
        if self._legal is None:
            self._legal = legal_switches(self.defn, self.state)
        return self._legal

    def is_terminal(self) -> bool:
        return not self.legal

    def chronon_capped(self) -> bool:
        cap = self.config.max_chronons
        return cap is not None and self.state.chronon >= cap

    def submit(self, player: Term, switch: Term, action: Term):
        """Validate and queue a submission; last valid one per switch wins."""
        switch_text = format_term(switch)
        if player not in self.defn.players:
            return ActionReject(switch_text, "unknown_player", format_term(player))
        res = next((r for r in self.legal if r.switch == switch), None)
        if res is not None:
            if isinstance(res.controller, ChanceController):
                return ActionReject(switch_text, "chance_switch")
            if res.controller.player != player:
                return ActionReject(switch_text, "not_your_switch")
        rejection = check_action(self.defn, self.state, switch, action, legal=self.legal)
        if rejection is not None:
            return ActionReject(switch_text, rejection.reason, rejection.detail)
        self._arrival += 1
        self._pending[switch_text] = SubmittedAction(player, switch, action, self._arrival)
        return ActionAck(switch_text)

    def unresolved_player_switches(self) -> list:
        """Legal player switches without a surviving submission."""
        out = []
        for res in self.legal:
            if isinstance(res.controller, PlayerController) \
                    and format_term(res.switch) not in self._pending:
                out.append(res)
        return out

    def close(self):
        submissions = list(self._pending.values())
        self._pending.clear()
        state, record, events = close_chronon(
            self.defn, self.state, submissions, self.rng, legal=self.legal)
        self.state = state
        self._legal = None
        self.records.append(record)
        return record, events

    def end_events(self) -> dict:
        accounts = account_map(self.defn, self.state)
        return {text: [GameEnd(accounts=dict(accounts))]
                for text in self.defn.player_texts}


Policy = Callable[[random.Random, SwitchResolution], Term]


def uniform_policy(rng: random.Random, res: SwitchResolution) -> Term:
    if not isinstance(res.actions, Enumerated):
        raise AnalysisError(
            f"unlimited switch {format_term(res.switch)} cannot be played uniformly")
    return res.actions.actions[rng.randrange(len(res.actions.actions))]


@dataclass
class RunResult:
    records: list
    final_state: GameState
    rejects: list = field(default_factory=list)

    def final_accounts(self, defn: GameDefinition) -> dict:
        return account_map(defn, self.final_state)


def run_scripted(defn: GameDefinition, script: dict,
                 config: ChrononConfig,
                 policy: Optional[Policy] = None) -> RunResult:
    """Deterministic offline run.

    ``script`` maps a 1-based chronon number to (player, switch, action)
    triples.  Rejected entries are recorded and the run continues with
    defaults.  With a policy, every still-unsubmitted player switch is filled
    by the policy before the chronon closes (the monte-carlo code path).
    """
    for entries in script.values():
        for player, _, _ in entries:
            if player not in defn.players:
                raise DefinitionError(f"script references unknown player "
                                      f"{format_term(player)}")
    game = Game(defn, config)
    game.begin()
    rejects = []
    chronon = 1
    while not game.is_terminal() and not game.chronon_capped():
        for player, switch, action in script.get(chronon, []):
            outcome = game.submit(player, switch, action)
            if isinstance(outcome, ActionReject):
                rejects.append((chronon, outcome))
        if policy is not None:
            for res in game.unresolved_player_switches():
                action = policy(game.rng, res)
                outcome = game.submit(res.controller.player, res.switch, action)
                if isinstance(outcome, ActionReject):
                    rejects.append((chronon, outcome))
        game.close()
        chronon += 1
    return RunResult(records=game.records, final_state=game.state, rejects=rejects)


# ---------------------------------------------------------------------------
# Replay log (JSONL)
# ---------------------------------------------------------------------------


def replay_lines(defn: GameDefinition, config: ChrononConfig,
                 records: Sequence[TransitionRecord]) -> list[str]:
    header = {
        "game": defn.name,
        "seed": config.seed,
        "config": config.to_json(),
        "definition_sha256": definition_hash(defn),
    }
    lines = [json.dumps(header, sort_keys=True)]
    lines.extend(json.dumps(r.to_json(), sort_keys=True) for r in records)
    return lines


def write_replay(path, defn: GameDefinition, config: ChrononConfig,
                 records: Sequence[TransitionRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for line in replay_lines(defn, config, records):
            fp.write(line + "\n")
