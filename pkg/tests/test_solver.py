"""Resolution engine: solution order, builtins, budgets, effect capture."""

import pytest

from sidl.errors import BudgetExceededError, DefinitionError, EvaluationError
from sidl.solver import KnowledgeBase, Solver, effect_virtual, enumerating_virtual
from sidl.terms import Atom, Int, Var, format_term, parse_program, parse_term


def make(program: str, budget: int = 10_000_000, rows=None) -> Solver:
    virtuals = {
        ("create", 1): effect_virtual("create"),
        ("delete", 1): effect_virtual("delete"),
    }
    if rows is not None:
        virtuals[("fact", 1)] = enumerating_virtual(lambda: [(r,) for r in rows])
    return Solver(KnowledgeBase(parse_program(program)), virtuals, budget=budget)


def answers(solver: Solver, goal: str, var: str) -> list:
    return [format_term(row[0])
            for row in solver.distinct(parse_term(goal), [var])]


def all_answers(solver: Solver, goal: str, var: str) -> list:
    goal_term = parse_term(goal)
    out = []
    for bindings in solver.solve(goal_term):
        out.append(format_term(Var(var), bindings))
    return out


# -- clause order and backtracking -----------------------------------------


PATHS = """
edge(a, b). edge(a, c). edge(b, d). edge(c, d).
path(X, X).
path(X, Y) :- edge(X, Z), path(Z, Y).
"""


def test_solutions_follow_clause_and_goal_order():
    solver = make(PATHS)
    assert all_answers(solver, "path(a, Y)", "Y") == ["a", "b", "d", "c", "d"]


def test_distinct_keeps_first_occurrence_order():
    solver = make(PATHS)
    assert answers(solver, "path(a, Y)", "Y") == ["a", "b", "d", "c"]


def test_negation_as_failure():
    solver = make("p(a).\nq(X) :- not(p(X)).\n")
    assert solver.ask(parse_term("q(b)"))
    assert not solver.ask(parse_term("q(a)"))


def test_budget_is_an_error_not_a_failure():
    solver = make("loop(X) :- between(1, 1000000, _), nope(X).\n", budget=1000)
    with pytest.raises(BudgetExceededError):
        solver.ask(parse_term("loop(1)"))


# -- builtins ---------------------------------------------------------------


def test_between_enumerates_inclusive():
    solver = make("dummy.")
    assert answers(solver, "between(1, 4, X)", "X") == ["1", "2", "3", "4"]


def test_member_and_append():
    solver = make("dummy.")
    assert answers(solver, "member(X, [a, b, c])", "X") == ["a", "b", "c"]
    assert answers(solver, "append([a], [b, c], X)", "X") == ["[a, b, c]"]
    # append splitting a list backtracks through every split
    assert answers(solver, "append(X, _, [a, b])", "X") == ["[]", "[a]", "[a, b]"]


def test_length_and_nth1():
    solver = make("dummy.")
    assert answers(solver, "length([a, b, c], N)", "N") == ["3"]
    assert answers(solver, "nth1(2, [a, b, c], X)", "X") == ["b"]
    assert answers(solver, "nth1(I, [a, b], x)", "I") == []


def test_maxmember():
    solver = make("dummy.")
    assert answers(solver, "maxmember([3, 1, 4, 1], M)", "M") == ["4"]


def test_getsubset_yields_all_subsets_exclusion_first():
    solver = make("dummy.")
    subsets = answers(solver, "getsubset(S, [a, b, c])", "S")
    assert len(subsets) == 8
    assert subsets[0] == "[]"
    assert subsets[-1] == "[a, b, c]"
    assert len(set(subsets)) == 8


def test_findall_collects_in_order():
    solver = make("n(3). n(1). n(2).")
    assert answers(solver, "findall(X, n(X), L)", "L") == ["[3, 1, 2]"]
    assert answers(solver, "findall(X, n(9), L)", "L") == ["[]"]


def test_findall_rejects_effects_inside():
    solver = make("bad(X) :- create([X]).")
    with pytest.raises(DefinitionError):
        solver.ask(parse_term("findall(X, bad(X), L)"))


def test_integer_check():
    solver = make("dummy.")
    assert solver.ask(parse_term("integer(3)"))
    assert not solver.ask(parse_term("integer(3.0)"))
    assert not solver.ask(parse_term("integer(a)"))


# -- arithmetic -------------------------------------------------------------


@pytest.mark.parametrize("expr, expected", [
    ("1 + 2 * 3", "7"),
    ("2 ^ 10", "1024"),
    ("6 / 2", "3"),
    ("7 / 2", "3.5"),
    ("min(4, 9)", "4"),
    ("-(3) + 5", "2"),
    ("1.5 + 1", "2.5"),
])
def test_is_evaluation(expr, expected):
    solver = make("dummy.")
    assert answers(solver, f"X is {expr}", "X") == [expected]


def test_is_with_unbound_operand_is_an_error():
    solver = make("dummy.")
    with pytest.raises(EvaluationError):
        solver.ask(parse_term("X is Y + 1"))


def test_comparisons_require_numbers():
    solver = make("dummy.")
    assert solver.ask(parse_term("3 > 2"))
    assert solver.ask(parse_term("2 =< 2"))
    assert not solver.ask(parse_term("1 >= 2"))


# -- effect capture ---------------------------------------------------------


def test_first_proof_effects_survive_failed_branches():
    solver = make("""
        act(X) :- create([early]), nope(X).
        act(_) :- create([kept]), delete([gone]).
    """)
    outcome = solver.prove_first_with_effects(parse_term("act(1)"))
    assert outcome is not None
    _, effects = outcome
    assert [(e.kind, format_term(e.word)) for e in effects] == [
        ("create", "[kept]"), ("delete", "[gone]")]


def test_unprovable_goal_yields_no_effects():
    solver = make("act(X) :- create([a]), nope(X).")
    assert solver.prove_first_with_effects(parse_term("act(1)")) is None


def test_effects_inside_negation_are_discarded():
    solver = make("""
        marked :- create([mark]), nope.
        act :- not(marked), create([real]).
    """)
    outcome = solver.prove_first_with_effects(parse_term("act"))
    assert outcome is not None
    _, effects = outcome
    assert [(e.kind, format_term(e.word)) for e in effects] == [("create", "[real]")]


def test_enumerating_virtual_backtracks():
    solver = make("two(X, Y) :- fact(X), fact(Y).",
                  rows=[Atom("p"), Atom("q")])
    goal = parse_term("two(X, Y)")
    rows = solver.distinct(goal, ["X", "Y"])
    assert [(format_term(a), format_term(b)) for a, b in rows] == [
        ("p", "p"), ("p", "q"), ("q", "p"), ("q", "q")]
