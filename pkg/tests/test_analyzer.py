"""State-graph enumeration, playout statistics, backward induction and the
information-consistency check, cross-checked against independent oracles."""

import pytest

from nim_oracle import best_value
from sidl.analyzer import (
    check_information_consistency, enumerate_states, minimax_value, monte_carlo,
)
from sidl.errors import AnalysisError
from sidl.model import load_source


# -- reachable-state graph --------------------------------------------------


def test_nim_graph_covers_every_pile_size(nim):
    graph = enumerate_states(nim)
    # piles 10..1 with either player to move, both zero-endings, minus the
    # unreachable (bob, 10) start duplicate
    assert len(graph.nodes) == 20
    assert len(graph.terminals) == 2
    assert not graph.truncated


def test_graph_edges_have_probability_one_without_chance(nim):
    graph = enumerate_states(nim)
    assert all(edge.probability == 1.0 for edge in graph.edges)
    assert all(edge.movers for edge in graph.edges)


def test_graph_truncation_flag(nim):
    graph = enumerate_states(nim, max_nodes=5)
    assert graph.truncated
    assert len(graph.nodes) <= 5


def test_chance_edges_carry_probabilities(mcp3):
    graph = enumerate_states(mcp3, max_depth=1)
    root_edges = [e for e in graph.edges if e.source == graph.root]
    assert len(root_edges) == 7
    assert all(abs(e.probability - 1 / 7) < 1e-12 for e in root_edges)
    assert all(e.movers == () for e in root_edges)


# -- backward induction -----------------------------------------------------


def test_nim_minimax_matches_brute_force_oracle(nim):
    values = minimax_value(nim, prune_noop=True)
    oracle = best_value(10)  # alice moves first
    assert values == {"[alice]": float(oracle), "[bob]": float(-oracle)}


@pytest.mark.parametrize("stones, oracle_sign", [(4, 1), (5, -1), (9, -1), (12, 1)])
def test_minimax_tracks_oracle_across_pile_sizes(nim, stones, oracle_sign):
    source = nim.source.replace("init([alice, 10])", f"init([alice, {stones}])")
    variant = load_source(source)
    assert best_value(stones) == oracle_sign
    values = minimax_value(variant, prune_noop=True)
    assert values["[alice]"] == float(oracle_sign)


def test_minimax_without_pruning_allows_infinite_waiting(nim):
    # waiting forever is value 0 for both under the repetition cut-off
    assert minimax_value(nim) == {"[alice]": 0.0, "[bob]": 0.0}


def test_minimax_rejects_unlimited_switches(price):
    with pytest.raises(AnalysisError):
        minimax_value(price)


def test_minimax_rejects_chance(mcp3):
    with pytest.raises(AnalysisError):
        minimax_value(mcp3)


def test_minimax_node_budget(nim):
    with pytest.raises(AnalysisError):
        minimax_value(nim, prune_noop=True, max_nodes=3)


# -- Monte-Carlo ------------------------------------------------------------


def test_monte_carlo_is_seed_deterministic(nim):
    stats1 = monte_carlo(nim, playouts=30, max_chronons=60, seed=11)
    stats2 = monte_carlo(nim, playouts=30, max_chronons=60, seed=11)
    assert stats1.means == stats2.means
    assert stats1.standard_errors == stats2.standard_errors


def test_monte_carlo_nim_values_are_zero_sum(nim):
    stats = monte_carlo(nim, playouts=50, max_chronons=100, seed=0)
    assert abs(stats.means["[alice]"] + stats.means["[bob]"]) < 1e-9
    assert stats.termination_rate > 0.9


def test_monte_carlo_requires_positive_playouts(nim):
    with pytest.raises(AnalysisError):
        monte_carlo(nim, playouts=0, max_chronons=10)


# -- information consistency ------------------------------------------------


def test_three_child_variant_is_consistent(mcp3):
    result = check_information_consistency(mcp3)
    assert result.passed
    assert result.violations == []
    assert result.states_checked > 1
    assert not result.truncated


def test_leaky_variant_produces_witnesses(mcp3_leaky):
    result = check_information_consistency(mcp3_leaky)
    assert not result.passed
    assert any(v.kind == "legality" for v in result.violations)
    witness = result.violations[0]
    assert witness.player in ("[alice]", "[bob]", "[charly]")
    assert len(witness.states) == 2


def test_games_without_hidden_information_pass(nim):
    assert check_information_consistency(nim).passed
