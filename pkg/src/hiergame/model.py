"""Shared domain types for the status-hierarchy cooperation game.

A group of n members is a mix of status cooperators, who compete for
leadership and contribute conditionally on the realized hierarchy, and
defectors, who never signal and never contribute. Every expected payoff
in this package is linear in the endowment c and the benefit b, so payoffs
are carried around as coefficient pairs wherever possible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class ModelVariant(enum.Enum):
    """Closed set of game variants.

    MULTI_LEADER      graded contribution: every leader count x is accepted and
                      each cooperator contributes with the hierarchicalness of
                      the resulting two-level structure.
    MARK_RETRY        the signaling round is repeated until it ends with zero
                      or one leader.
    MARK_NO_MEMORY    one signaling round only; two or more highs mean nobody
                      contributes.
    MARK_WITH_MEMORY  an all-low first round ends the game without a leader;
                      any other first round is re-drawn until exactly one high
                      remains.
    """

    MULTI_LEADER = "multi"
    MARK_RETRY = "retry"
    MARK_NO_MEMORY = "nomem"
    MARK_WITH_MEMORY = "withmem"


class Role(enum.Enum):
    COOPERATOR = "C"
    DEFECTOR = "D"


@dataclass(frozen=True)
class GameParams:
    """Parameters of one group game.

    n    group size, at least 2
    fc   population fraction of status cooperators
    c    endowment kept by anyone who does not contribute (cost of giving it up)
    b    benefit a contributor produces, shared equally by the whole group
    tau  assortativity of group formation; 0 is random mixing
    """

    n: int
    fc: float
    c: float
    b: float
    tau: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"group size must be an integer >= 2, got {self.n!r}")
        if not 0.0 <= self.fc <= 1.0:
            raise ValueError(f"cooperator fraction must lie in [0, 1], got {self.fc!r}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"assortativity must lie in [0, 1], got {self.tau!r}")
        if self.c <= 0:
            raise ValueError(f"endowment c must be positive, got {self.c!r}")
        if self.b <= 0:
            raise ValueError(f"benefit b must be positive, got {self.b!r}")


@dataclass(frozen=True)
class PayoffCoefficients:
    """Pair (a, bcoef) such that the expected payoff equals a*c + bcoef*b."""

    a: float
    bcoef: float

    def payoff(self, c: float, b: float) -> float:
        return self.a * c + self.bcoef * b


@dataclass(frozen=True)
class StabilityRegion:
    """Cost-to-benefit interval on which cooperation is evolutionarily stable.

    lower is always 1/n (below it the game is no dilemma); upper comes from
    the single-defector invasion test.
    """

    lower: float
    upper: float
