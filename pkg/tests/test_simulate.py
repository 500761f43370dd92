import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiergame.analytic import composition_weights, cooperator_payoff, defector_payoff
from hiergame.model import GameParams, ModelVariant, Role
from hiergame.simulate import (
    Roster,
    _composition_block,
    derive_seed,
    estimate_equilibrium_with_se,
    estimate_payoff,
    form_group,
    member_payoffs,
    replicator_step,
    run_contribution,
    run_round,
    run_signaling,
)

VARIANTS = list(ModelVariant)


def test_derive_seed_is_stable_and_spread():
    first = derive_seed(12345, 0)
    assert first == derive_seed(12345, 0)
    seeds = {derive_seed(12345, i) for i in range(500)}
    assert len(seeds) == 500
    assert derive_seed(12346, 0) != first


# ---------------------------------------------------------------------------
# scalar reference operations


def test_form_group_plants_focal():
    rng = np.random.default_rng(0)
    roster = form_group(6, 0.5, 0.0, Role.DEFECTOR, rng)
    assert len(roster.roles) == 6
    assert roster.roles[roster.focal_index] is Role.DEFECTOR
    assert roster.focal_index == 0


def test_form_group_random_mixing_rate():
    rng = np.random.default_rng(1)
    n, fc, draws = 5, 0.3, 4000
    counts = [form_group(n, fc, 0.0, Role.COOPERATOR, rng).cooperator_count - 1
              for _ in range(draws)]
    mean = np.mean(counts)
    se = math.sqrt((n - 1) * fc * (1 - fc) / draws)
    assert abs(mean - (n - 1) * fc) < 4.5 * se


def test_form_group_fully_assortative_is_two_point():
    rng = np.random.default_rng(2)
    n = 5
    for _ in range(300):
        roster = form_group(n, 0.4, 1.0, Role.COOPERATOR, rng)
        others = roster.cooperator_count - 1
        assert others in (0, n - 1)


def test_composition_block_matches_printed_weights():
    # verifies the vectorized assortative sampler against the analytic
    # composition weights at an interior tau
    n, fc, tau, size = 4, 0.45, 0.5, 200_000
    rng = np.random.default_rng(7)
    for role in Role:
        counts = np.bincount(_composition_block(n, fc, tau, role, size, rng), minlength=n)
        freq = counts / size
        w = composition_weights(n, fc, tau, role)
        for i in range(n):
            se = math.sqrt(max(w[i] * (1 - w[i]), 1e-12) / size)
            assert abs(freq[i] - w[i]) < 5 * se, (role, i, freq[i], w[i])


def test_signaling_terminal_states():
    rng = np.random.default_rng(3)
    for _ in range(400):
        x, _ = run_signaling(3, 3, ModelVariant.MARK_RETRY, rng)
        assert x in (0, 1)
        x, _ = run_signaling(3, 3, ModelVariant.MARK_WITH_MEMORY, rng)
        assert x in (0, 1)
        x, _ = run_signaling(3, 3, ModelVariant.MULTI_LEADER, rng)
        assert 0 <= x <= 3


def test_retry_terminal_odds_two_cooperators():
    # with two cooperators in a pair game, retrying until fewer than two
    # highs lands on exactly one with probability 2/3
    rng = np.random.default_rng(4)
    trials = 6000
    hits = sum(
        run_signaling(2, 2, ModelVariant.MARK_RETRY, rng)[0] == 1 for _ in range(trials)
    )
    p_hat = hits / trials
    se = math.sqrt((2 / 3) * (1 / 3) / trials)
    assert abs(p_hat - 2 / 3) < 4.5 * se


def test_with_memory_settles_iff_any_first_high():
    rng = np.random.default_rng(5)
    for _ in range(500):
        x, _ = run_signaling(4, 4, ModelVariant.MARK_WITH_MEMORY, rng)
        assert x in (0, 1)


def test_contribution_extremes():
    rng = np.random.default_rng(6)
    assert not run_contribution(4, 0, 5, ModelVariant.MULTI_LEADER, rng).any()
    assert run_contribution(4, 1, 5, ModelVariant.MULTI_LEADER, rng).all()
    assert run_contribution(3, 1, 5, ModelVariant.MARK_RETRY, rng).all()
    assert not run_contribution(3, 2, 5, ModelVariant.MARK_NO_MEMORY, rng).any()


def test_member_payoffs_accounting():
    roster = Roster(
        roles=(Role.COOPERATOR, Role.DEFECTOR, Role.COOPERATOR, Role.COOPERATOR),
        focal_index=0,
    )
    contributed = np.array([True, False, False, True])
    payoffs = member_payoffs(roster, contributed, c=0.2, b=1.0)
    k, n = 2, 4
    assert payoffs == pytest.approx([k / n, k / n + 0.2, k / n + 0.2, k / n])
    assert payoffs.sum() == pytest.approx(k * 1.0 + (n - k) * 0.2)


def test_member_payoffs_rejects_contributing_defector():
    roster = Roster(roles=(Role.COOPERATOR, Role.DEFECTOR), focal_index=0)
    with pytest.raises(ValueError):
        member_payoffs(roster, np.array([False, True]), 0.2, 1.0)


@given(
    n=st.integers(min_value=2, max_value=9),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    c=st.floats(min_value=0.01, max_value=2.0, allow_nan=False),
    b=st.floats(min_value=0.1, max_value=3.0, allow_nan=False),
)
@settings(max_examples=60, deadline=None)
def test_round_conserves_value(n, seed, c, b):
    # total payout is always k*b plus c for each non-contributor
    rng = np.random.default_rng(seed)
    roster = form_group(n, 0.6, 0.3, Role.COOPERATOR, rng)
    coop = roster.cooperator_count
    x, _ = run_signaling(coop, n, ModelVariant.MULTI_LEADER, rng)
    coop_flags = run_contribution(coop, x, n, ModelVariant.MULTI_LEADER, rng)
    flags = np.zeros(n, dtype=bool)
    flags[[i for i, r in enumerate(roster.roles) if r is Role.COOPERATOR]] = coop_flags
    payoffs = member_payoffs(roster, flags, c, b)
    k = int(flags.sum())
    assert payoffs.sum() == pytest.approx(k * b + (n - k) * c, rel=1e-12)


def test_run_round_defector_never_contributes():
    rng = np.random.default_rng(8)
    for variant in VARIANTS:
        for _ in range(50):
            result = run_round(
                GameParams(n=4, fc=0.7, c=0.2, b=1.0), variant, Role.DEFECTOR, rng
            )
            assert not result.focal_contributed
            assert result.focal_payoff >= 0.2


# ---------------------------------------------------------------------------
# block engine


def test_estimate_deterministic_across_workers():
    params = GameParams(n=6, fc=0.55, c=0.2, b=1.0, tau=0.3)
    for variant in VARIANTS:
        est1, coef1 = estimate_payoff(params, variant, Role.COOPERATOR, 40_000, 99, workers=1)
        est4, coef4 = estimate_payoff(params, variant, Role.COOPERATOR, 40_000, 99, workers=4)
        assert est1 == est4
        assert coef1 == coef4


def test_estimate_no_cooperators_is_exact():
    params = GameParams(n=5, fc=0.0, c=0.7, b=2.0)
    for variant in VARIANTS:
        est, coef = estimate_payoff(params, variant, Role.DEFECTOR, 5_000, 1)
        assert est.mean == 0.7
        assert est.std_error == 0.0
        assert coef.a_hat == 1.0
        assert coef.b_hat == 0.0


def test_estimate_matches_scalar_rounds():
    # ties the vectorized engine to the one-round reference implementation
    params = GameParams(n=4, fc=0.5, c=0.2, b=1.0)
    rng = np.random.default_rng(10)
    for variant in (ModelVariant.MULTI_LEADER, ModelVariant.MARK_RETRY):
        rounds = [
            run_round(params, variant, Role.COOPERATOR, rng).focal_payoff
            for _ in range(4000)
        ]
        est, _ = estimate_payoff(params, variant, Role.COOPERATOR, 100_000, 11)
        scalar_se = np.std(rounds, ddof=1) / math.sqrt(len(rounds))
        gap_se = math.sqrt(scalar_se**2 + est.std_error**2)
        assert abs(np.mean(rounds) - est.mean) < 4.5 * gap_se


def test_estimate_within_error_of_analytic():
    for variant in VARIANTS:
        for role in Role:
            params = GameParams(n=8, fc=0.4, c=0.2, b=1.0, tau=0.25)
            est, _ = estimate_payoff(params, variant, role, 200_000, 21)
            exact = (
                cooperator_payoff(params, variant)
                if role is Role.COOPERATOR
                else defector_payoff(params, variant)
            )
            assert abs(est.mean - exact) < 4.5 * est.std_error, (variant, role)


def test_retry_defector_certain_composition():
    # focal defector beside two sure cooperators: terminal single-leader
    # probability is 1/2, so the mean payoff is c + b/3
    est, _ = estimate_payoff(
        GameParams(n=3, fc=1.0, c=0.2, b=1.0), ModelVariant.MARK_RETRY,
        Role.DEFECTOR, 100_000, 31,
    )
    assert abs(est.mean - (0.2 + 1 / 3)) < 4.5 * est.std_error


def test_equilibrium_estimate_close_to_analytic():
    from hiergame.analytic import equilibrium_ratio

    sim = estimate_equilibrium_with_se(6, 0.5, 0.0, ModelVariant.MULTI_LEADER, 150_000, 17)
    assert sim is not None
    value, se = sim
    exact = equilibrium_ratio(6, 0.5, 0.0, ModelVariant.MULTI_LEADER)
    assert se > 0
    assert abs(value - exact) < 4.5 * se


# ---------------------------------------------------------------------------
# replicator map


def test_replicator_fixed_points():
    assert replicator_step(0.0, 1.0, 2.0) == 0.0
    assert replicator_step(1.0, 1.0, 2.0) == 1.0
    assert replicator_step(0.37, 1.3, 1.3) == pytest.approx(0.37, abs=1e-15)


def test_replicator_moves_toward_better_role():
    up = replicator_step(0.5, 2.0, 1.0)
    down = replicator_step(0.5, 1.0, 2.0)
    assert up > 0.5 > down
    assert up == pytest.approx(2 / 3, abs=1e-15)


def test_replicator_rejects_nonpositive_payoffs():
    with pytest.raises(ValueError):
        replicator_step(0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        replicator_step(0.5, 1.0, -0.2)
