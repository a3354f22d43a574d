"""coinlab: exact and Monte Carlo analysis of coin-flipping finite automata."""

__version__ = "0.1.0"
