"""Self-play exploration in finite two-player zero-sum Markov games."""

__version__ = "0.1.0"
