"""Seeded agent-based Monte Carlo engine for the group game.

Two layers live here. The scalar ops (``form_group``, ``run_signaling``,
``run_contribution``, ``member_payoffs``, ``run_round``) spell the round
protocol out one group at a time and serve as the reference semantics. The
estimator (``estimate_payoff``)  runs the same protocol vectorized over
fixed-size replication blocks, each block on its own counter-derived RNG
stream, so results are bit-identical for a given master seed no matter how
many workers share the blocks.

Estimation is focal-player based: the focal member's role is planted and
the rest of the group is drawn around it. Instead of raw payoffs the engine
accumulates the kept-endowment indicator and the benefit-share count k/n,
whose means reconstruct the expected payoff a_hat*c + b_hat*b for every
(c, b) at once and feed the equilibrium estimator with far less variance
than differencing noisy payoffs would.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .hierarchy import two_level_hierarchy
from .model import GameParams, ModelVariant, Role

_MASK64 = (1 << 64) - 1
_BLOCK = 16_384
# A signaling round among m <= n cooperators resolves to {0, 1} highs with
# probability bounded away from zero, so this many failures signals a bug.
RETRY_ROUND_CAP = 10_000

_ROLE_TAG = {Role.COOPERATOR: 0, Role.DEFECTOR: 1}


class SimulationError(RuntimeError):
    """Raised when a resampling protocol fails to terminate within the cap."""


class ContributionRegime(enum.Enum):
    GRADED = "graded"  # multi-leader: contribute with the structure's hierarchicalness
    FULL = "full"      # exactly one leader: every cooperator contributes
    NONE = "none"      # round ended with no contribution


@dataclass(frozen=True)
class Roster:
    """Group roles with a designated focal member."""

    roles: tuple
    focal_index: int

    def __post_init__(self):
        if not 0 <= self.focal_index < len(self.roles):
            raise ValueError("focal index outside roster")

    @property
    def cooperator_count(self) -> int:
        return sum(1 for r in self.roles if r is Role.COOPERATOR)


@dataclass(frozen=True)
class RoundResult:
    cooperator_count: int
    leader_count: int
    contributor_count: int
    focal_payoff: float
    focal_contributed: bool


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float
    replications: int
    master_seed: int


@dataclass(frozen=True)
class CoefficientEstimate:
    """Monte Carlo means of the payoff coefficients.

    a_hat estimates the kept-endowment probability, b_hat the expected
    benefit-share count k/n; a_se/b_se are standard errors of those means
    and mean_cov their covariance (needed to propagate error through the
    equilibrium ratio).
    """

    a_hat: float
    b_hat: float
    a_se: float
    b_se: float
    mean_cov: float
    replications: int


def derive_seed(master: int, index: int) -> int:
    """Stable 64-bit child seed for grid cell ``index`` (splitmix64 mix)."""
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _block_rng(master_seed: int, role_tag: int, block: int) -> np.random.Generator:
    # One Philox stream per block, keyed by (seed, role) and offset by the
    # block index in counter space; block order, not worker order, fixes the
    # output.
    key = (role_tag << 64) | (master_seed & _MASK64)
    return np.random.Generator(np.random.Philox(key=key, counter=block << 128))


# ---------------------------------------------------------------------------
# scalar protocol (reference semantics)


def form_group(n: int, fc: float, tau: float, focal_role: Role, rng: np.random.Generator) -> Roster:
    """Draw a group of n around a planted focal member.

    Random mixing fills the other n-1 slots independently at fc. Assortative
    formation draws a first member from the population at large, after which
    every later member copies the first member's type with probability tau
    (and is drawn at fc otherwise); the focal player occupies the first slot
    with probability 1/n and a later slot otherwise.
    """
    if n < 2:
        raise ValueError("group size must be >= 2")
    p_after_c = tau + (1.0 - tau) * fc
    p_after_d = (1.0 - tau) * fc
    if tau == 0.0:
        others = [Role.COOPERATOR if rng.random() < fc else Role.DEFECTOR for _ in range(n - 1)]
        return Roster(roles=(focal_role, *others), focal_index=0)
    u = rng.random()
    if u < 1.0 / n:
        follow = p_after_c if focal_role is Role.COOPERATOR else p_after_d
        others = [Role.COOPERATOR if rng.random() < follow else Role.DEFECTOR for _ in range(n - 1)]
        return Roster(roles=(focal_role, *others), focal_index=0)
    if u < 1.0 / n + (n - 1) / n * fc:
        first = Role.COOPERATOR
        follow = p_after_c
    else:
        first = Role.DEFECTOR
        follow = p_after_d
    rest = [Role.COOPERATOR if rng.random() < follow else Role.DEFECTOR for _ in range(n - 2)]
    return Roster(roles=(first, focal_role, *rest), focal_index=1)


def run_signaling(
    cooperator_count: int, n: int, variant: ModelVariant, rng: np.random.Generator
) -> tuple[int, ContributionRegime]:
    """One signaling phase: each cooperator goes high with probability 1/n.

    Returns the terminal leader count and the contribution regime it
    implies under the given variant.
    """
    if cooperator_count < 0:
        raise ValueError("cooperator count cannot be negative")
    x = int(rng.binomial(cooperator_count, 1.0 / n))
    if variant is ModelVariant.MULTI_LEADER:
        return x, ContributionRegime.GRADED
    if variant is ModelVariant.MARK_NO_MEMORY:
        return x, (ContributionRegime.FULL if x == 1 else ContributionRegime.NONE)
    if variant is ModelVariant.MARK_RETRY:
        rounds = 1
        while x >= 2:
            rounds += 1
            if rounds > RETRY_ROUND_CAP:
                raise SimulationError(f"signaling failed to settle in {RETRY_ROUND_CAP} rounds")
            x = int(rng.binomial(cooperator_count, 1.0 / n))
        return x, (ContributionRegime.FULL if x == 1 else ContributionRegime.NONE)
    if variant is ModelVariant.MARK_WITH_MEMORY:
        if x == 0:
            return 0, ContributionRegime.NONE
        rounds = 1
        while x != 1:
            rounds += 1
            if rounds > RETRY_ROUND_CAP:
                raise SimulationError(f"signaling failed to settle in {RETRY_ROUND_CAP} rounds")
            x = int(rng.binomial(cooperator_count, 1.0 / n))
        return 1, ContributionRegime.FULL
    raise ValueError(f"unknown variant {variant!r}")


def run_contribution(
    cooperator_count: int, x: int, n: int, variant: ModelVariant, rng: np.random.Generator
) -> np.ndarray:
    """Contribution flags for the cooperators, given terminal leader count x."""
    if variant is ModelVariant.MULTI_LEADER:
        h = two_level_hierarchy(n, x)
        return rng.random(cooperator_count) < h
    return np.full(cooperator_count, x == 1, dtype=bool)


def member_payoffs(roster: Roster, contributed: np.ndarray, c: float, b: float) -> np.ndarray:
    """Per-member payoffs: k*b/n to everyone, plus c to each non-contributor."""
    contributed = np.asarray(contributed, dtype=bool)
    n = len(roster.roles)
    if contributed.shape != (n,):
        raise ValueError("need one contribution flag per member")
    for idx, role in enumerate(roster.roles):
        if contributed[idx] and role is not Role.COOPERATOR:
            raise ValueError("only cooperators can contribute")
    k = int(contributed.sum())
    return k * b / n + np.where(contributed, 0.0, c)


def run_round(
    params: GameParams, variant: ModelVariant, focal_role: Role, rng: np.random.Generator
) -> RoundResult:
    """Play one full round for a planted focal member."""
    roster = form_group(params.n, params.fc, params.tau, focal_role, rng)
    coop_idx = [i for i, r in enumerate(roster.roles) if r is Role.COOPERATOR]
    x, _regime = run_signaling(len(coop_idx), params.n, variant, rng)
    coop_flags = run_contribution(len(coop_idx), x, params.n, variant, rng)
    flags = np.zeros(params.n, dtype=bool)
    flags[coop_idx] = coop_flags
    pays = member_payoffs(roster, flags, params.c, params.b)
    return RoundResult(
        cooperator_count=len(coop_idx),
        leader_count=x,
        contributor_count=int(flags.sum()),
        focal_payoff=float(pays[roster.focal_index]),
        focal_contributed=bool(flags[roster.focal_index]),
    )


# ---------------------------------------------------------------------------
# vectorized estimator


def _composition_block(
    n: int, fc: float, tau: float, role: Role, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Cooperator counts among the focal player's groupmates, one per lane."""
    if tau == 0.0:
        return rng.binomial(n - 1, fc, size)
    p_after_c = tau + (1.0 - tau) * fc
    p_after_d = (1.0 - tau) * fc
    u = rng.random(size)
    own_follow = p_after_c if role is Role.COOPERATOR else p_after_d
    focal_first = rng.binomial(n - 1, own_follow, size)
    after_c = rng.binomial(max(n - 2, 0), p_after_c, size)
    after_d = rng.binomial(max(n - 2, 0), p_after_d, size)
    cut_focal = 1.0 / n
    cut_coop = cut_focal + (n - 1) / n * fc
    return np.where(u < cut_focal, focal_first, np.where(u < cut_coop, 1 + after_c, after_d))


def _accumulate_block(
    n: int,
    fc: float,
    tau: float,
    variant: ModelVariant,
    role: Role,
    size: int,
    rng: np.random.Generator,
    h_table: np.ndarray,
) -> tuple[float, float, float, float]:
    """Partial sums (sum a, sum k/n, sum (k/n)^2, sum a*k/n) over one block."""
    others = _composition_block(n, fc, tau, role, size, rng)
    focal_coop = role is Role.COOPERATOR
    m = others + 1 if focal_coop else others
    if variant is ModelVariant.MULTI_LEADER:
        x = rng.binomial(m, 1.0 / n)
        hx = h_table[x]
        k = rng.binomial(others, hx)
        if focal_coop:
            focal_contrib = rng.random(size) < hx
            k = k + focal_contrib
        else:
            focal_contrib = np.zeros(size, dtype=bool)
    else:
        x = rng.binomial(m, 1.0 / n)
        if variant is ModelVariant.MARK_RETRY:
            pending = x >= 2
            rounds = 1
            while pending.any():
                rounds += 1
                if rounds > RETRY_ROUND_CAP:
                    raise SimulationError(
                        f"signaling failed to settle in {RETRY_ROUND_CAP} rounds"
                    )
                redraw = rng.binomial(m, 1.0 / n)
                x = np.where(pending, redraw, x)
                pending = x >= 2
        elif variant is ModelVariant.MARK_WITH_MEMORY:
            # Resampling until exactly one high terminates with certainty
            # whenever the first round had any high, so the terminal regime
            # is decided by the first round alone.
            x = np.where(x >= 1, 1, 0)
        full = x == 1
        k = m * full
        focal_contrib = full & focal_coop
    kept = ~focal_contrib
    shares = k / n
    return (
        float(kept.sum()),
        float(shares.sum()),
        float((shares * shares).sum()),
        float((kept * shares).sum()),
    )


def estimate_payoff(
    params: GameParams,
    variant: ModelVariant,
    role: Role,
    replications: int,
    master_seed: int,
    workers: int | None = None,
) -> tuple[Estimate, CoefficientEstimate]:
    """Monte Carlo estimate of the focal player's expected payoff.

    Returns the payoff estimate at (params.c, params.b) together with the
    coefficient-level estimate that reconstructs it for any (c, b).
    Deterministic in (params, variant, role, replications, master_seed):
    blocks own disjoint counter ranges and are reduced in index order, so
    the worker count never changes the result.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    n = params.n
    h_table = np.array([two_level_hierarchy(n, x) for x in range(n + 1)])
    tag = _ROLE_TAG[role]
    sizes = [
        min(_BLOCK, replications - start) for start in range(0, replications, _BLOCK)
    ]

    def one_block(block_index: int) -> tuple[float, float, float, float]:
        rng = _block_rng(master_seed, tag, block_index)
        return _accumulate_block(
            n, params.fc, params.tau, variant, role, sizes[block_index], rng, h_table
        )

    if workers is not None and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one_block, range(len(sizes))))
    else:
        partials = [one_block(bi) for bi in range(len(sizes))]

    s_a = s_b = s_bb = s_ab = 0.0
    for pa, pb, pbb, pab in partials:  # fixed reduction order
        s_a += pa
        s_b += pb
        s_bb += pbb
        s_ab += pab

    r = replications
    a_hat = s_a / r
    b_hat = s_b / r
    if r > 1:
        # the kept-endowment indicator is 0/1, so its square-sum equals s_a
        var_a = max(s_a - s_a * s_a / r, 0.0) / (r - 1)
        var_b = max(s_bb - s_b * s_b / r, 0.0) / (r - 1)
        cov_ab = (s_ab - s_a * s_b / r) / (r - 1)
    else:
        var_a = var_b = cov_ab = 0.0
    mean = a_hat * params.c + b_hat * params.b
    var_pay = (
        params.c**2 * var_a + params.b**2 * var_b + 2.0 * params.c * params.b * cov_ab
    )
    estimate = Estimate(
        mean=mean,
        std_error=math.sqrt(max(var_pay, 0.0) / r),
        replications=r,
        master_seed=master_seed,
    )
    coeffs = CoefficientEstimate(
        a_hat=a_hat,
        b_hat=b_hat,
        a_se=math.sqrt(var_a / r),
        b_se=math.sqrt(var_b / r),
        mean_cov=cov_ab / r,
        replications=r,
    )
    return estimate, coeffs


def estimate_equilibrium_with_se(
    n: int,
    fc: float,
    tau: float,
    variant: ModelVariant,
    replications: int,
    master_seed: int,
    workers: int | None = None,
) -> tuple[float, float] | None:
    """Simulated equilibrium c/b with a delta-method standard error.

    The two roles run on disjoint streams of the same master seed. Returns
    None when the cooperator's kept-endowment mean pins the denominator
    1 - a_hat below 1e-9.
    """
    params = GameParams(n=n, fc=fc, c=1.0, b=1.0, tau=tau)
    _, coop = estimate_payoff(params, variant, Role.COOPERATOR, replications, master_seed, workers)
    _, defe = estimate_payoff(params, variant, Role.DEFECTOR, replications, master_seed, workers)
    denom = 1.0 - coop.a_hat
    if abs(denom) < 1e-9:
        return None
    diff = coop.b_hat - defe.b_hat
    value = diff / denom
    var = (
        (coop.b_se**2 + defe.b_se**2) / denom**2
        + (diff**2 / denom**4) * coop.a_se**2
        + 2.0 * (diff / denom**3) * coop.mean_cov
    )
    return value, math.sqrt(max(var, 0.0))


def estimate_equilibrium(
    n: int,
    fc: float,
    tau: float,
    variant: ModelVariant,
    replications: int,
    master_seed: int,
    workers: int | None = None,
) -> float | None:
    result = estimate_equilibrium_with_se(
        n, fc, tau, variant, replications, master_seed, workers
    )
    return None if result is None else result[0]


def replicator_step(fc: float, coop_payoff: float, defect_payoff: float) -> float:
    """Payoff-proportional generational update of the cooperator fraction.

    The source model leaves the generational rule open; this discrete
    replicator map is this package's choice and is flagged as such in the
    documentation. Fixed points sit at fc in {0, 1} and wherever the two
    payoffs are equal.
    """
    if coop_payoff <= 0.0 or defect_payoff <= 0.0:
        raise ValueError("replicator update needs positive payoffs")
    if fc <= 0.0:
        return 0.0
    if fc >= 1.0:
        return 1.0
    total = fc * coop_payoff + (1.0 - fc) * defect_payoff
    return fc * coop_payoff / total
