"""Closed-form channel statistics.

With n nodes each broadcasting independently with probability p, one
listening slot ends in exactly one of three ways, with probabilities

    silence      (1-p)^n
    exactly one  n * p * (1-p)^(n-1)
    noise        1 - silence - exactly_one

These are the reference values the statistical tests hold the simulator
against.
"""

from __future__ import annotations


def p_exactly_one(n: int, p: float) -> float:
    """Probability that exactly one of n independent broadcasters fires."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    return n * p * (1.0 - p) ** (n - 1)


def p_silence(n: int, p: float) -> float:
    """Probability that none of n independent broadcasters fires."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    return (1.0 - p) ** n


def p_noise(n: int, p: float) -> float:
    """Probability that two or more of n independent broadcasters fire."""
    return 1.0 - p_silence(n, p) - p_exactly_one(n, p)
