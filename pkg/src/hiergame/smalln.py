"""Term-by-term expected payoffs for the smallest groups.

These are the multi-leader payoffs at n = 2 and n = 3 written out case by
case (group composition, then leader count, then contributor count) with no
shared machinery. They exist purely as independent cross-checks of the
general-n sums in ``analytic`` and are exercised by the test suite.
"""

from __future__ import annotations

from .hierarchy import two_level_hierarchy


def cooperator_payoff_n2(fc: float, c: float, b: float) -> float:
    """Focal cooperator, n = 2, random mixing.

    Meeting another cooperator (probability fc): both or neither lead and
    both keep c, or exactly one leads and both contribute for b each.
    Meeting a defector: the lone cooperator keeps c if it stays low, else
    contributes and takes half the benefit.
    """
    both = fc * (
        1 * (1 / 2) ** 2 * (1 / 2) ** 0 * c
        + 1 * (1 / 2) ** 0 * (1 / 2) ** 2 * c
        + 2 * (1 / 2) ** 1 * (1 / 2) ** 1 * b
    )
    alone = (1 - fc) * (
        1 * (1 / 2) ** 0 * (1 / 2) ** 1 * c
        + 1 * (1 / 2) ** 1 * (1 / 2) ** 0 * (b / 2)
    )
    return both + alone


def defector_payoff_n2(fc: float, c: float, b: float) -> float:
    """Focal defector, n = 2: keeps c, plus half the benefit when a
    cooperator partner goes to the top and contributes alone."""
    return c + fc * (1 * (1 / 2) ** 1 * (1 / 2) ** 0 * (b / 2))


def cooperator_payoff_n3(fc: float, c: float, b: float) -> float:
    """Focal cooperator, n = 3, random mixing, written case by case."""
    h2 = two_level_hierarchy(3, 2)
    # endowment kept: no contribution by the focal player
    keep = (1 - fc) ** 2 * (2 / 3) * c
    keep += 2 * fc * (1 - fc) * ((2 / 3) ** 2 + (1 / 3) ** 2 * (1 - h2)) * c
    keep += fc**2 * (
        (2 / 3) ** 3 + 3 * (1 / 3) ** 2 * (2 / 3) * (1 - h2) + (1 / 3) ** 3
    ) * c
    # benefit shares collected
    share = (1 - fc) ** 2 * (1 / 3) * (1 / 3) * b
    share += 2 * fc * (1 - fc) * (
        2 * (1 / 3) * (2 / 3) * (2 / 3)
        + 1 * (1 / 3) ** 2
        * (2 * h2 * (1 - h2) * (1 / 3) + 1 * h2**2 * (2 / 3))
    ) * b
    share += fc**2 * (
        3 * (1 / 3) * (2 / 3) ** 2
        + 3 * (1 / 3) ** 2 * (2 / 3) ** 1
        * (
            3 * h2 * (1 - h2) ** 2 * (1 / 3)
            + 3 * h2**2 * (1 - h2) ** 1 * (2 / 3)
            + h2**3
        )
    ) * b
    return keep + share


def defector_payoff_n3(fc: float, c: float, b: float) -> float:
    """Focal defector, n = 3, random mixing, written case by case."""
    h1 = two_level_hierarchy(3, 1)
    h2 = two_level_hierarchy(3, 2)
    extra = 2 * fc * (1 - fc) * ((1 / 3) * h1 * (1 / 3)) * b
    extra += fc**2 * (
        2 * (1 / 3) * (2 / 3) * (2 / 3)
        + (1 / 3) ** 2 * (2 * h2 * (1 - h2) * (1 / 3) + h2**2 * (2 / 3))
    ) * b
    return c + extra
