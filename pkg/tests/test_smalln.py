import numpy as np
import pytest

from hiergame.analytic import cooperator_payoff, defector_payoff
from hiergame.model import GameParams, ModelVariant
from hiergame.smalln import (
    cooperator_payoff_n2,
    cooperator_payoff_n3,
    defector_payoff_n2,
    defector_payoff_n3,
)

FC_GRID = np.linspace(0.0, 1.0, 11)


def test_n2_endpoints_by_hand():
    # fc=0: the lone cooperator leads half the time and then contributes,
    # so W = c/2 + b/4; fc=1: the pair coordinates to one leader half the
    # time, giving W = c/2 + b/2
    assert cooperator_payoff_n2(0.0, 0.2, 1.0) == pytest.approx(0.35, abs=1e-15)
    assert cooperator_payoff_n2(1.0, 0.2, 1.0) == pytest.approx(0.60, abs=1e-15)
    # a defector next to a sure cooperator: c + b/4
    assert defector_payoff_n2(1.0, 0.2, 1.0) == pytest.approx(0.45, abs=1e-15)
    assert defector_payoff_n2(0.0, 0.2, 1.0) == pytest.approx(0.20, abs=1e-15)


def test_n3_all_cooperators_by_hand():
    # three cooperators: keep and pot weights both come to 1/2
    assert cooperator_payoff_n3(1.0, 0.2, 1.0) == pytest.approx(0.6, abs=1e-14)
    # defector among two cooperators: share weight is 17/54
    assert defector_payoff_n3(1.0, 0.2, 1.0) == pytest.approx(0.2 + 17 / 54, abs=1e-14)


def test_n2_matches_general_formula():
    for fc in FC_GRID:
        for c, b in ((0.2, 1.0), (1.0, 1.0), (0.05, 2.5)):
            params = GameParams(n=2, fc=float(fc), c=c, b=b)
            assert cooperator_payoff_n2(float(fc), c, b) == pytest.approx(
                cooperator_payoff(params, ModelVariant.MULTI_LEADER), abs=1e-12
            )
            assert defector_payoff_n2(float(fc), c, b) == pytest.approx(
                defector_payoff(params, ModelVariant.MULTI_LEADER), abs=1e-12
            )


def test_n3_matches_general_formula():
    for fc in FC_GRID:
        for c, b in ((0.2, 1.0), (0.7, 1.3)):
            params = GameParams(n=3, fc=float(fc), c=c, b=b)
            assert cooperator_payoff_n3(float(fc), c, b) == pytest.approx(
                cooperator_payoff(params, ModelVariant.MULTI_LEADER), abs=1e-12
            )
            assert defector_payoff_n3(float(fc), c, b) == pytest.approx(
                defector_payoff(params, ModelVariant.MULTI_LEADER), abs=1e-12
            )
