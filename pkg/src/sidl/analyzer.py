"""Bounded exhaustive and statistical analysis of small games.

Everything here stays at desk scale: reachable-state closure over all joint
action combinations, seeded Monte-Carlo playouts through the regular engine
code path, backward-induction values for strictly sequential games, and the
dynamic information-consistency check (hidden facts must not be deducible
from switch legality, ownership or action sets).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .errors import AnalysisError
from .model import (
    ChanceController, Enumerated, GameDefinition, GameState, PlayerController,
    Unlimited, initial_state, legal_switches, sorted_facts, visible_words,
)
from .engine import (
    ChrononConfig, account_map, close_chronon, derive_seed, run_scripted,
    uniform_policy,
)
from .terms import Term, format_term


def facts_key(facts) -> tuple:
    return tuple(format_term(w) for w in sorted_facts(facts))


def state_key(state: GameState) -> tuple:
    return facts_key(state.facts) + ("accounts",) + state.accounts


def _require_enumerated(res) -> Enumerated:
    if isinstance(res.actions, Unlimited):
        raise AnalysisError(
            f"unlimited switch {format_term(res.switch)} cannot be enumerated")
    return res.actions


# ---------------------------------------------------------------------------
# Reachable-state graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Edge:
    source: tuple
    actions: tuple        # (switch text, action text) per resolved switch
    probability: float    # product over chance branches; 1.0 when none
    movers: tuple         # player texts owning the resolved switches
    target: tuple


@dataclass
class StateGraph:
    root: tuple
    nodes: dict            # key -> GameState
    edges: list
    terminals: set
    truncated: bool = False


def _joint_branches(legal) -> list:
    """Cross product over switches: [(assignment dict, probability, movers)]."""
    per_switch = []
    for res in legal:
        actions = _require_enumerated(res)
        key = format_term(res.switch)
        if isinstance(res.controller, ChanceController):
            per_switch.append([
                (key, action, prob, None)
                for action, prob in zip(actions.actions, res.controller.probs)])
        else:
            mover = format_term(res.controller.player)
            per_switch.append([
                (key, action, 1.0, mover) for action in actions.actions])
    joints = []
    for combo in product(*per_switch):
        forced = {key: action for key, action, _, _ in combo}
        prob = math.prod(p for _, _, p, _ in combo)
        movers = tuple(m for _, _, _, m in combo if m is not None)
        joints.append((forced, prob, movers))
    return joints


def enumerate_states(defn: GameDefinition, max_nodes: int = 10_000,
                     max_depth: Optional[int] = None) -> StateGraph:
    """Breadth-first closure over all joint action combinations."""
    root_state = initial_state(defn)
    root = state_key(root_state)
    graph = StateGraph(root=root, nodes={root: root_state}, edges=[], terminals=set())
    queue = [(root, 0)]
    seen_expanded = set()
    while queue:
        key, depth = queue.pop(0)
        if key in seen_expanded:
            continue
        seen_expanded.add(key)
        state = graph.nodes[key]
        legal = legal_switches(defn, state)
        if not legal:
            graph.terminals.add(key)
            continue
        if max_depth is not None and depth >= max_depth:
            graph.truncated = True
            continue
        for forced, prob, movers in _joint_branches(legal):
            next_state, record, _ = close_chronon(
                defn, state, [], None, legal=legal, forced=forced)
            target = state_key(next_state)
            if target not in graph.nodes:
                if len(graph.nodes) >= max_nodes:
                    graph.truncated = True
                    continue
                graph.nodes[target] = next_state
                queue.append((target, depth + 1))
            graph.edges.append(Edge(
                source=key,
                actions=tuple(sorted(forced.items())),
                probability=prob,
                movers=movers,
                target=target,
            ))
    return graph


# ---------------------------------------------------------------------------
# Monte-Carlo playouts
# ---------------------------------------------------------------------------


@dataclass
class PlayoutStats:
    playouts: int
    means: dict
    standard_errors: dict
    termination_rate: float

    def to_json(self) -> dict:
        return {"playouts": self.playouts, "means": self.means,
                "standard_errors": self.standard_errors,
                "termination_rate": self.termination_rate}


def monte_carlo(defn: GameDefinition, playouts: int, max_chronons: int,
                seed: int = 0) -> PlayoutStats:
    """Independent uniform-policy playouts; deterministic given the seed.

    Playout i runs the scripted engine with seed splitmix64(seed + i), so a
    single playout is bit-identical to run_scripted under the same derived
    seed and policy.
    """
    if playouts <= 0:
        raise AnalysisError("playouts must be positive")
    finals: list[dict] = []
    terminated = 0
    for i in range(playouts):
        config = ChrononConfig(seed=derive_seed(seed, i), max_chronons=max_chronons)
        result = run_scripted(defn, {}, config, policy=uniform_policy)
        finals.append(result.final_accounts(defn))
        if not legal_switches(defn, result.final_state):
            terminated += 1
    means = {}
    errors = {}
    for text in defn.player_texts:
        values = [f[text] for f in finals]
        mean = sum(values) / len(values)
        if len(values) > 1:
            var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
            se = math.sqrt(var / len(values))
        else:
            se = 0.0
        means[text] = mean
        errors[text] = se
    return PlayoutStats(playouts=playouts, means=means, standard_errors=errors,
                        termination_rate=terminated / playouts)


# ---------------------------------------------------------------------------
# Backward induction for strictly sequential games
# ---------------------------------------------------------------------------


def minimax_value(defn: GameDefinition, prune_noop: bool = False,
                  max_nodes: int = 100_000) -> dict:
    """Each mover maximizes their own final account; repetition cuts off.

    Requires every non-terminal reachable state to expose exactly one legal,
    player-controlled, enumerated switch.  A state revisited along the
    current path contributes no further payoffs.
    """
    n = len(defn.players)
    visits = [0]

    def future(state: GameState, path: frozenset) -> tuple:
        visits[0] += 1
        if visits[0] > max_nodes:
            raise AnalysisError(f"minimax exceeded {max_nodes} states")
        legal = legal_switches(defn, state)
        if not legal:
            return (0.0,) * n
        if len(legal) != 1:
            raise AnalysisError("minimax requires exactly one legal switch per state")
        res = legal[0]
        if not isinstance(res.controller, PlayerController):
            raise AnalysisError("minimax cannot handle chance switches")
        actions = _require_enumerated(res).actions
        key = state_key(state)
        if key in path:
            return (0.0,) * n
        mover = defn.player_index(res.controller.player)
        sub_path = path | {key}
        best: Optional[tuple] = None
        sw = format_term(res.switch)
        for action in actions:
            next_state, record, _ = close_chronon(
                defn, state, [], None, legal=legal, forced={sw: action})
            payoff = tuple(record.payoffs[t] for t in defn.player_texts)
            if prune_noop and not record.created and not record.deleted \
                    and all(p == 0.0 for p in payoff):
                continue
            tail = future(next_state, sub_path)
            value = tuple(p + t for p, t in zip(payoff, tail))
            if best is None or value[mover] > best[mover]:
                best = value
        if best is None:
            return (0.0,) * n
        return best

    start = initial_state(defn)
    gains = future(start, frozenset())
    return {text: acct + gain
            for text, acct, gain in zip(defn.player_texts, start.accounts, gains)}


# ---------------------------------------------------------------------------
# Information-consistency check (hidden facts must stay hidden)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ConsistencyViolation:
    player: str
    states: tuple   # pair of canonical fact-set dumps
    switch: str
    kind: str       # "legality" | "ownership" | "actions"

    def to_json(self) -> dict:
        return {"player": self.player, "states": [list(s) for s in self.states],
                "switch": self.switch, "kind": self.kind}


@dataclass
class ConsistencyResult:
    passed: bool
    violations: list
    states_checked: int
    truncated: bool = False

    def to_json(self) -> dict:
        return {"passed": self.passed,
                "violations": [v.to_json() for v in self.violations],
                "states_checked": self.states_checked,
                "truncated": self.truncated}


def _reachable_fact_sets(defn: GameDefinition, max_nodes: int):
    """BFS over fact sets only; account amounts never influence the rules."""
    zero = tuple(0.0 for _ in defn.players)
    start = initial_state(defn)
    first = frozenset(start.facts)
    states = {facts_key(first): first}
    legal_by_key = {}
    queue = [facts_key(first)]
    truncated = False
    while queue:
        key = queue.pop(0)
        facts = states[key]
        state = GameState(facts=facts, accounts=zero, chronon=0)
        legal = legal_switches(defn, state)
        legal_by_key[key] = legal
        if not legal:
            continue
        for forced, _, _ in _joint_branches(legal):
            next_state, _, _ = close_chronon(
                defn, state, [], None, legal=legal, forced=forced)
            target = frozenset(next_state.facts)
            tkey = facts_key(target)
            if tkey not in states:
                if len(states) >= max_nodes:
                    truncated = True
                    continue
                states[tkey] = target
                queue.append(tkey)
    return states, legal_by_key, truncated


def check_information_consistency(defn: GameDefinition,
                                  max_nodes: int = 10_000) -> ConsistencyResult:
    """Within each class of states a player cannot tell apart, that player's
    switch legality, ownership and action sets must coincide."""
    states, legal_by_key, truncated = _reachable_fact_sets(defn, max_nodes)

    def switch_table(legal) -> dict:
        table = {}
        for res in legal:
            owner = (format_term(res.controller.player)
                     if isinstance(res.controller, PlayerController) else "(chance)")
            actions = (tuple(format_term(a) for a in res.actions.actions)
                       if isinstance(res.actions, Enumerated) else ("(unlimited)",))
            table[format_term(res.switch)] = (owner, actions)
        return table

    tables = {key: switch_table(legal) for key, legal in legal_by_key.items()}
    violations: list[ConsistencyViolation] = []
    for player, text in zip(defn.players, defn.player_texts):
        classes: dict[tuple, list] = {}
        for key, facts in states.items():
            view = facts_key(visible_words(defn, player, sorted_facts(facts)))
            classes.setdefault(view, []).append(key)
        for members in classes.values():
            if len(members) < 2:
                continue
            for a in members:
                for b in members:
                    if a == b:
                        continue
                    for switch, (owner, actions) in tables[a].items():
                        if owner != text:
                            continue
                        other = tables[b].get(switch)
                        if other is None:
                            violations.append(ConsistencyViolation(
                                text, (a, b), switch, "legality"))
                        elif other[0] != owner:
                            violations.append(ConsistencyViolation(
                                text, (a, b), switch, "ownership"))
                        elif other[1] != actions:
                            violations.append(ConsistencyViolation(
                                text, (a, b), switch, "actions"))
    return ConsistencyResult(passed=not violations, violations=violations,
                             states_checked=len(states), truncated=truncated)
