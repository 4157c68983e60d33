"""Definition loading, validation, switch resolution and visibility."""

import pytest

from sidl.corpus import GAMES, corpus_source
from sidl.errors import ValidationFailure
from sidl.model import (
    ChanceController, Enumerated, PlayerController, Unlimited, check_action,
    initial_state, legal_switches, load_source, match_template, validate,
    visible_words,
)
from sidl.terms import format_term, parse_program, parse_term


# -- loading and validation -------------------------------------------------


@pytest.mark.parametrize("name", GAMES)
def test_corpus_definitions_load_clean(name):
    defn = load_source(corpus_source(name))
    assert defn.players
    assert validate(defn.clauses) == []


def test_missing_name_clause_is_an_error():
    findings = validate(parse_program("init([a], 0.0)."))
    assert any("name" in f.message for f in findings if f.severity == "error")


def test_duplicate_name_clause_is_an_error():
    findings = validate(parse_program("name(a).\nname(b).\n"))
    assert any("duplicate" in f.message for f in findings)


def test_body_only_keyword_in_head_rejected():
    findings = validate(parse_program("name(g).\nfact([x]).\n"))
    assert any("body-only" in f.message for f in findings)


def test_head_only_keyword_in_body_rejected():
    findings = validate(parse_program("name(g).\nhelper :- legal([x]).\n"))
    assert any("head-only" in f.message for f in findings)


def test_hidden_may_not_depend_on_state():
    source = "name(g).\nhidden([w], [p]) :- fact([secret]).\n"
    findings = validate(parse_program(source))
    assert any("hidden" in f.message for f in findings)
    with pytest.raises(ValidationFailure):
        load_source(source)


def test_hidden_state_dependence_found_transitively():
    source = ("name(g).\nmaybe(X) :- indirect(X).\n"
              "indirect(X) :- fact(X).\nhidden(W, [p]) :- maybe(W).\n")
    findings = validate(parse_program(source))
    assert any(f.severity == "error" for f in findings)


def test_players_derived_from_account_clauses(nim, mcp):
    assert nim.player_texts == ("[alice]", "[bob]")
    assert nim.initial_accounts == (0.0, 0.0)
    assert len(mcp.players) == 5


def test_game_alias_for_name_clause():
    defn = load_source("game(g).\ninit([p], 0.0).\n")
    assert defn.name == "g"


# -- initial state ----------------------------------------------------------


def test_nim_initial_state(nim):
    state = initial_state(nim)
    assert {format_term(w) for w in state.facts} == {"[alice, 10]"}
    assert state.chronon == 0


def test_chess_initial_state_has_full_board(chess):
    state = initial_state(chess)
    pieces = [w for w in state.facts if len(getattr(w, "args", ())) and
              "castle" not in format_term(w)]
    # 32 men + [white] turn marker + two fortifiable markers
    assert len(state.facts) == 35


# -- switch resolution ------------------------------------------------------


def test_nim_switch_resolution(nim):
    legal = legal_switches(nim, initial_state(nim))
    assert len(legal) == 1
    res = legal[0]
    assert format_term(res.switch) == "[main]"
    assert isinstance(res.controller, PlayerController)
    assert format_term(res.controller.player) == "[alice]"
    assert isinstance(res.actions, Enumerated)
    assert [format_term(a) for a in res.actions.actions] == \
        ["[1]", "[2]", "[3]", "[wait]"]


def test_mcp_dirt_switch_is_uniform_chance(mcp):
    legal = legal_switches(mcp, initial_state(mcp))
    assert len(legal) == 1
    res = legal[0]
    assert isinstance(res.controller, ChanceController)
    assert len(res.actions.actions) == 31
    assert len(res.controller.probs) == 31
    assert all(abs(p - 1 / 31) < 1e-12 for p in res.controller.probs)


def test_price_switches_are_unlimited(price):
    legal = legal_switches(price, initial_state(price))
    assert len(legal) == 4
    for res in legal:
        assert isinstance(res.actions, Unlimited)
        assert len(res.actions.templates) == 2


def test_explicit_probability_list_owner():
    source = ("name(g).\ninit([p], 0.0).\ninit([s]).\n"
              "legal([c]) :- fact([s]).\n"
              "switch([c], [heads]).\nswitch([c], [tails]).\n"
              "owned([c], [0.25, 0.75]).\n"
              "do([heads]) :- delete([s]).\ndo([tails]) :- delete([s]).\n")
    defn = load_source(source)
    res = legal_switches(defn, initial_state(defn))[0]
    assert isinstance(res.controller, ChanceController)
    assert res.controller.probs == (0.25, 0.75)


# -- action checking --------------------------------------------------------


def test_check_action_accepts_enumerated_member(nim):
    state = initial_state(nim)
    assert check_action(nim, state, parse_term("[main]"), parse_term("[2]")) is None


def test_check_action_rejects_unknown_switch(nim):
    state = initial_state(nim)
    rej = check_action(nim, state, parse_term("[side]"), parse_term("[1]"))
    assert rej is not None and rej.reason == "switch_not_legal"


def test_check_action_rejects_out_of_set(nim):
    state = initial_state(nim)
    rej = check_action(nim, state, parse_term("[main]"), parse_term("[4]"))
    assert rej is not None and rej.reason == "action_not_in_set"


def test_check_action_rejects_nonground(nim):
    state = initial_state(nim)
    rej = check_action(nim, state, parse_term("[main]"), parse_term("[X]"))
    assert rej is not None


def test_unlimited_guard_rejects_underbid(price):
    state = initial_state(price)
    rej = check_action(price, state, parse_term("[alice]"),
                       parse_term("[alice, 5.0]"))
    assert rej is not None and rej.reason == "guard_unprovable"
    assert check_action(price, state, parse_term("[alice]"),
                        parse_term("[alice, 12.5]")) is None


def test_unlimited_template_requires_typed_slot(price):
    state = initial_state(price)
    # integer where the template demands a real
    rej = check_action(price, state, parse_term("[alice]"),
                       parse_term("[alice, 12]"))
    assert rej is not None and rej.reason == "template_mismatch"


def test_match_template_typed_slots():
    template = parse_term("[a, (price, double)]")
    assert match_template(template, parse_term("[a, 3.5]"))
    assert not match_template(template, parse_term("[a, 3]"))
    assert not match_template(template, parse_term("[b, 3.5]"))
    int_template = parse_term("[a, (count, int)]")
    assert match_template(int_template, parse_term("[a, 3]"))
    assert not match_template(int_template, parse_term("[a, 3.5]"))


# -- visibility -------------------------------------------------------------


def test_mud_facts_hidden_from_their_child(mcp):
    words = [parse_term("[dirty, alice]"), parse_term("[start]")]
    alice, bob = mcp.players[0], mcp.players[1]
    assert [format_term(w) for w in visible_words(mcp, alice, words)] == ["[start]"]
    assert [format_term(w) for w in visible_words(mcp, bob, words)] == \
        ["[dirty, alice]", "[start]"]


def test_rps_choices_hidden_from_opponent_only(rps):
    word = [parse_term("[chosen, role1, paper]")]
    role1, role2 = rps.players
    assert visible_words(rps, role1, word) == word
    assert visible_words(rps, role2, word) == []


def test_games_without_hidden_clauses_show_everything(nim):
    state = initial_state(nim)
    for player in nim.players:
        assert set(visible_words(nim, player, state.facts)) == set(state.facts)
