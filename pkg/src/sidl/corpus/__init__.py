"""Shipped game definitions used as fixtures and demos."""

from importlib import resources

GAMES = ("nim", "mcp", "mcp3", "mcp3_leaky", "rps", "price_negotiation", "chess")


def corpus_source(name: str) -> str:
    return (resources.files(__package__) / f"{name}.sidl").read_text(encoding="utf-8")


def corpus_path(name: str):
    return resources.files(__package__) / f"{name}.sidl"
