"""Engine for logic-defined strategic interactions.

Loads clause-based game definitions, validates them, runs them under a
chronon-based transition loop with hidden-information views and chance
moves, serves live sessions, and analyzes small games exhaustively.
"""

from .errors import (
    AnalysisError, BudgetExceededError, DefinitionError, EvaluationError,
    ParseError, SidlError, ValidationFailure,
)
from .terms import (
    Atom, Clause, Int, Real, Struct, Term, Var,
    format_term, parse_program, parse_term, unify,
)
from .solver import KnowledgeBase, Solver
from .model import (
    ChanceController, Enumerated, GameDefinition, GameState, PlayerController,
    SwitchResolution, Unlimited, check_action, initial_state, legal_switches,
    load_definition, load_source, validate, visible_words,
)
from .engine import (
    ChrononConfig, Game, TransitionRecord, begin_game, close_chronon,
    is_terminal, replay_lines, run_scripted, uniform_policy, write_replay,
)

__version__ = "0.1.0"
