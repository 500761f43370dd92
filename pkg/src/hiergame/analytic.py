"""Exact expected payoffs, equilibria and stability regions.

Both roles' expected payoffs decompose the same way: a mixture over the
number i of cooperators among the focal player's n-1 groupmates, times the
expected outcome of one signaling-and-contribution round among the
cooperators present. Every term is linear in the endowment c and the
benefit b, which the solvers exploit.

Group composition weights come in two flavours. Under random mixing the
count i is Binomial(n-1, fc). Under assortative formation the first group
member is drawn from the population at large and every later member copies
the first member's type with probability tau (otherwise drawn at fc); the
focal player may occupy the first slot or any later one, giving the
three-branch weight expressions implemented in ``composition_weights``.
"""

from __future__ import annotations

import math

import numpy as np

from .binomial import binomial_row
from .hierarchy import two_level_hierarchy
from .model import GameParams, ModelVariant, PayoffCoefficients, Role, StabilityRegion

# Denominator cutoff below which the equilibrium ratio is reported as undefined.
DEGENERATE_EPS = 1e-12


def composition_weights(n: int, fc: float, tau: float, role: Role) -> np.ndarray:
    """P[i cooperators among the focal player's n-1 groupmates], i = 0..n-1.

    The three branches are the three ways the focal player can sit in an
    assortatively formed group: focal drawn first, a cooperator drawn first,
    a defector drawn first. Branches whose leading occupancy factor is zero
    are skipped; they guard the otherwise-undefined negative exponents at
    i = 0 and i = n-1. At tau = 0 the whole expression collapses to the
    Binomial(n-1, fc) row.
    """
    if n < 2:
        raise ValueError(f"group size must be >= 2, got {n!r}")
    if not 0.0 <= fc <= 1.0 or not 0.0 <= tau <= 1.0:
        raise ValueError(f"fc and tau must lie in [0, 1], got fc={fc!r} tau={tau!r}")
    # Type-copy probabilities after a cooperator / defector first member.
    p = tau + (1.0 - tau) * fc        # later member is C, first member C
    q = (1.0 - tau) * (1.0 - fc)      # later member is D, first member C
    r = (1.0 - tau) * fc              # later member is C, first member D
    s = tau + (1.0 - tau) * (1.0 - fc)  # later member is D, first member D
    w = np.zeros(n)
    for i in range(n):
        choose = math.comb(n - 1, i)
        total = 0.0
        if role is Role.COOPERATOR:
            # focal drawn first: groupmates copy a cooperator
            total += (1.0 / n) * choose * p**i * q ** (n - 1 - i)
            if i >= 1:
                # another cooperator drawn first, focal in a later slot
                total += (i / n) * fc * choose * p ** (i - 1) * q ** (n - 1 - i)
        else:
            if i >= 1:
                # a cooperator drawn first, the focal defector in a later slot
                total += (i / n) * fc * choose * p ** (i - 1) * q ** (n - 1 - i)
            # focal drawn first: groupmates copy a defector
            total += (1.0 / n) * choose * r**i * s ** (n - 1 - i)
        if i <= n - 2:
            # a non-focal defector drawn first
            total += ((n - i - 1) / n) * (1.0 - fc) * choose * r**i * s ** (n - i - 2)
        w[i] = total
    return w


def _cooperator_round(n: int, m: int, variant: ModelVariant) -> tuple[float, float]:
    """One round among m cooperators (focal included): (keep, share).

    keep is the probability the focal cooperator holds on to the endowment;
    share is the expected number of benefit shares k/n it collects.
    """
    sigma = (n - 1) / n
    if variant is ModelVariant.MULTI_LEADER:
        keep = 0.0
        share = 0.0
        for x, px in enumerate(binomial_row(m, 1.0 / n)):
            h = two_level_hierarchy(n, x)
            keep += px * (1.0 - h)
            contributors = binomial_row(m, h)
            share += px * sum(pk * (k / n) for k, pk in enumerate(contributors))
        return keep, share
    one = m * (1.0 / n) * sigma ** (m - 1)
    none = sigma**m
    if variant is ModelVariant.MARK_RETRY:
        # condition the signaling outcome on ending with zero or one high
        return none / (none + one), one / (none + one) * (m / n)
    if variant is ModelVariant.MARK_NO_MEMORY:
        return 1.0 - one, one * (m / n)
    if variant is ModelVariant.MARK_WITH_MEMORY:
        # only an all-low first round forfeits the leader; anything else
        # eventually resolves to exactly one
        return none, (1.0 - none) * (m / n)
    raise ValueError(f"unknown variant {variant!r}")


def _defector_share(n: int, m: int, variant: ModelVariant) -> float:
    """Expected benefit shares k/n reaching a defector among m cooperators."""
    if m == 0:
        return 0.0
    sigma = (n - 1) / n
    if variant is ModelVariant.MULTI_LEADER:
        share = 0.0
        for x, px in enumerate(binomial_row(m, 1.0 / n)):
            h = two_level_hierarchy(n, x)
            contributors = binomial_row(m, h)
            share += px * sum(pk * (k / n) for k, pk in enumerate(contributors))
        return share
    one = m * (1.0 / n) * sigma ** (m - 1)
    none = sigma**m
    if variant is ModelVariant.MARK_RETRY:
        return one / (none + one) * (m / n)
    if variant is ModelVariant.MARK_NO_MEMORY:
        return one * (m / n)
    if variant is ModelVariant.MARK_WITH_MEMORY:
        return (1.0 - none) * (m / n)
    raise ValueError(f"unknown variant {variant!r}")


def _expected_payoff(
    n: int, fc: float, tau: float, c: float, b: float, variant: ModelVariant, role: Role
) -> float:
    weights = composition_weights(n, fc, tau, role)
    total = 0.0
    if role is Role.COOPERATOR:
        for i in range(n):
            keep, share = _cooperator_round(n, i + 1, variant)
            total += weights[i] * (keep * c + share * b)
        return total
    total = c  # the defector's endowment is never at stake
    for i in range(n):
        total += weights[i] * _defector_share(n, i, variant) * b
    return total


def cooperator_payoff(params: GameParams, variant: ModelVariant = ModelVariant.MULTI_LEADER) -> float:
    """Expected one-round payoff of a focal status cooperator."""
    return _expected_payoff(params.n, params.fc, params.tau, params.c, params.b, variant, Role.COOPERATOR)


def defector_payoff(params: GameParams, variant: ModelVariant = ModelVariant.MULTI_LEADER) -> float:
    """Expected one-round payoff of a focal defector. Never below c."""
    return _expected_payoff(params.n, params.fc, params.tau, params.c, params.b, variant, Role.DEFECTOR)


def payoff_coefficients(
    n: int, fc: float, tau: float, variant: ModelVariant, role: Role
) -> PayoffCoefficients:
    """The (a, bcoef) pair with expected payoff a*c + bcoef*b.

    Read off by evaluating the payoff sum at (c, b) = (1, 0) and (0, 1);
    a equals 1 exactly for defectors.
    """
    a = _expected_payoff(n, fc, tau, 1.0, 0.0, variant, role)
    bcoef = _expected_payoff(n, fc, tau, 0.0, 1.0, variant, role)
    return PayoffCoefficients(a=a, bcoef=bcoef)


def equilibrium_ratio(n: int, fc: float, tau: float, variant: ModelVariant) -> float | None:
    """Cost-to-benefit ratio at which both roles earn the same expected payoff.

    With cooperator coefficients (A, B) and defector coefficients (1, B_D),
    equality A*c + B*b = c + B_D*b gives c/b = (B - B_D) / (1 - A). Returns
    None when the denominator is degenerate (payoff lines never cross).
    """
    coop = payoff_coefficients(n, fc, tau, variant, Role.COOPERATOR)
    defe = payoff_coefficients(n, fc, tau, variant, Role.DEFECTOR)
    denom = 1.0 - coop.a
    if abs(denom) < DEGENERATE_EPS:
        return None
    return (coop.bcoef - defe.bcoef) / denom


def stability_region(n: int, tau: float, variant: ModelVariant) -> StabilityRegion:
    """The c/b interval on which full cooperation is stable and the game a dilemma.

    The lower endpoint is 1/n: a cheaper contribution is no dilemma at all.
    The upper endpoint solves the single-defector invasion test, equating the
    all-cooperator payoff with a lone invader's payoff in a population with
    one defector slot per group on average.
    """
    coop = payoff_coefficients(n, 1.0, tau, variant, Role.COOPERATOR)
    defe = payoff_coefficients(n, (n - 1) / n, tau, variant, Role.DEFECTOR)
    denom = 1.0 - coop.a
    if abs(denom) < DEGENERATE_EPS:
        raise ValueError(f"degenerate invasion test at n={n}, tau={tau}, {variant}")
    upper = (coop.bcoef - defe.bcoef) / denom
    return StabilityRegion(lower=1.0 / n, upper=upper)
