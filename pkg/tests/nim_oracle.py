"""Brute-force value oracle for the take-away game.

Deliberately independent of the engine: a pile of stones, the mover removes
1..3, and whoever removes the last stone loses one point (the opponent gains
one).  Used to cross-check the backward-induction analyzer.
"""

import functools

TAKE_LIMIT = 3


@functools.lru_cache(maxsize=None)
def best_value(stones: int) -> int:
    """Best payoff the player to move can force from this pile."""
    if stones <= 0:
        raise ValueError("no move from an empty pile")
    best = -1
    for take in range(1, min(TAKE_LIMIT, stones) + 1):
        value = -1 if take == stones else -best_value(stones - take)
        best = max(best, value)
    return best
