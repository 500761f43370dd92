import math

import pytest

from hiergame.experiments import (
    SWEEP_HEADER,
    SweepSpec,
    figures,
    format_value,
    group_average_retry_payoff,
    mark_original_cooperator_payoff,
    mark_original_defector_payoff,
    parse_config,
    run_sweep,
    validate,
    write_csv,
)
from hiergame.model import ModelVariant, Role


def test_format_value():
    assert format_value(None) == ""
    assert format_value(7) == "7"
    assert format_value(True) == "true"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(1 / 3) == "0.333333333333"
    assert format_value("retry") == "retry"


def test_parse_config():
    text = """
    # comment line
    variant = retry
    n = 2, 4   # trailing comment
    fc_min=0.2
    """
    mapping = parse_config(text)
    assert mapping == {"variant": "retry", "n": "2, 4", "fc_min": "0.2"}
    with pytest.raises(ValueError):
        parse_config("just words\n")


def test_sweep_spec_from_mapping():
    spec = SweepSpec.from_mapping(parse_config(
        "variant = withmem\nn = 3, 5\nfc_min = 0.2\nfc_max = 0.8\nfc_count = 4\n"
        "tau = 0, 0.5\nreps = 777\nseed = 3\nsimulate = false\n"
    ))
    assert spec.variant is ModelVariant.MARK_WITH_MEMORY
    assert spec.n_values == (3, 5)
    assert spec.tau_values == (0.0, 0.5)
    assert spec.replications == 777
    assert not spec.simulate
    assert len(spec.fc_grid) == 4


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec.from_mapping({"variant": "bogus"})
    with pytest.raises(ValueError):
        SweepSpec.from_mapping({"n": "1"})
    with pytest.raises(ValueError):
        SweepSpec.from_mapping({"fc_min": "0.9", "fc_max": "0.1"})
    with pytest.raises(ValueError):
        SweepSpec.from_mapping({"tau": "1.5"})


def _tiny_spec(**overrides):
    base = dict(
        variant=ModelVariant.MULTI_LEADER,
        n_values=(2,),
        fc_min=0.5,
        fc_max=0.5,
        fc_count=1,
        tau_values=(0.0,),
        replications=20_000,
        master_seed=5,
    )
    base.update(overrides)
    return SweepSpec(**base)


def test_run_sweep_single_cell(tmp_path):
    out = tmp_path / "sweep.csv"
    spec = _tiny_spec(output=str(out))
    rows = run_sweep(spec, workers=1)
    assert len(rows) == 1
    row = dict(zip(SWEEP_HEADER, rows[0]))
    assert row["variant"] == "multi"
    assert row["cb_analytic"] == pytest.approx(0.5, abs=1e-12)
    assert row["lower"] == pytest.approx(0.5)
    assert row["upper"] == pytest.approx(0.75)
    assert abs(row["cb_sim"] - 0.5) < 4.5 * row["se"]
    text = out.read_text().splitlines()
    assert text[0] == "# schema: hiergame.sweep/1"
    assert text[1] == ",".join(SWEEP_HEADER)
    assert len(text) == 3


def test_run_sweep_analytic_only():
    rows = run_sweep(_tiny_spec(simulate=False), workers=1)
    row = dict(zip(SWEEP_HEADER, rows[0]))
    assert row["cb_sim"] is None and row["se"] is None


def test_validate_passes_and_detects_corruption():
    spec = _tiny_spec(n_values=(2, 5), replications=30_000)
    report = validate(spec, z_threshold=4.5, min_pass_rate=0.95, workers=1)
    assert report.cells == 6
    assert report.passed, report.summary()
    assert report.summary().startswith("PASS")
    corrupted = validate(spec, z_threshold=4.5, min_pass_rate=0.95, workers=1,
                         analytic_offset=0.05)
    assert not corrupted.passed
    assert corrupted.summary().startswith("FAIL")


def test_validate_z_definition():
    spec = _tiny_spec(replications=20_000)
    report = validate(spec, z_threshold=3.5, workers=1)
    for row in report.rows:
        if row.std_error > 0:
            assert row.z == pytest.approx(
                (row.simulated - row.analytic) / row.std_error
            )
        assert row.within == (abs(row.z) <= 3.5)


# ---------------------------------------------------------------------------
# historical baseline and group-averaged runs


def test_mark_original_closed_forms_by_hand():
    # pair game: W_C = fc*(3b/4 + c/4) + (1-fc)*(b/4 + c/2), W_D = c + fc*b/4
    assert mark_original_cooperator_payoff(2, 0.7, 0.2, 1.0) == pytest.approx(
        0.7 * (0.75 + 0.05) + 0.3 * (0.25 + 0.1), abs=1e-14
    )
    assert mark_original_defector_payoff(2, 0.7, 0.2, 1.0) == pytest.approx(
        0.2 + 0.7 * 0.25, abs=1e-14
    )


def test_group_average_matches_enumeration():
    # conditioned enumeration over whole-group compositions is an exact
    # reference for the role-averaged runs
    from math import comb

    def exact(n, fc, role):
        probs = [comb(n, m) * fc**m * (1 - fc) ** (n - m) for m in range(n + 1)]
        sigma = (n - 1) / n
        acc, tot = 0.0, 0.0
        if role is Role.COOPERATOR:
            for m in range(1, n + 1):
                one, none = m / n * sigma ** (m - 1), sigma**m
                p1 = one / (one + none)
                acc += probs[m] * (p1 * m / n + (1 - p1) * 0.2)
                tot += probs[m]
        else:
            for m in range(n):
                if m:
                    one, none = m / n * sigma ** (m - 1), sigma**m
                    p1 = one / (one + none)
                else:
                    p1 = 0.0
                acc += probs[m] * (0.2 + p1 * m / n)
                tot += probs[m]
        return acc / tot

    for n, fc, role in ((2, 0.5, Role.COOPERATOR), (6, 0.35, Role.DEFECTOR)):
        mean, se, kept = group_average_retry_payoff(n, fc, role, 0.2, 1.0, 150_000, 9)
        assert kept > 0
        assert abs(mean - exact(n, fc, role)) < 4.5 * se


def test_group_average_requires_role_presence():
    with pytest.raises(ValueError):
        group_average_retry_payoff(2, 1.0, Role.DEFECTOR, 0.2, 1.0, 2_000, 1)


# ---------------------------------------------------------------------------
# figure presets


def test_fig1_contents(tmp_path):
    (path,) = figures("fig1", tmp_path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# schema: hiergame.fig1/1"
    assert lines[1] == "n,x,h"
    assert lines[2:] == ["5,0,0", "5,1,1", "5,2,0.5625", "5,3,0.25", "5,4,0.0625", "5,5,0"]


def test_fig2_row_count(tmp_path):
    (path,) = figures("fig2", tmp_path)
    rows = path.read_text().splitlines()[2:]
    # n from 2 to 11 with x = 0..n each
    assert len(rows) == sum(n + 1 for n in range(2, 12))


def test_fig4_stability_columns(tmp_path):
    (path,) = figures("fig4", tmp_path)
    lines = path.read_text().splitlines()
    assert lines[1] == "n,tau,lower,upper_ours,upper_mark"
    first = lines[2].split(",")
    assert first[0] == "2" and float(first[2]) == 0.5
    assert float(first[3]) == pytest.approx(0.75)
    assert len(lines) == 2 + 19  # n = 2..20


def test_fig8_is_analytic_only(tmp_path):
    (path,) = figures("fig8", tmp_path)
    lines = path.read_text().splitlines()
    assert len(lines) == 2 + 4 * 6 * 17
    assert all(line.endswith(",,") for line in lines[2:])


def test_unknown_preset():
    with pytest.raises(ValueError):
        figures("fig99", "/tmp")


def test_preset_determinism_across_thread_counts(tmp_path, monkeypatch):
    runs = {}
    for label, threads in (("a", "1"), ("b", "4")):
        monkeypatch.setenv("HIERGAME_THREADS", threads)
        out = tmp_path / label
        paths = figures("fig6", out, replications=4_000, master_seed=13)
        paths += figures("fig10", out, replications=4_000, master_seed=13)
        runs[label] = b"".join(p.read_bytes() for p in paths)
    assert runs["a"] == runs["b"]


def test_write_csv_roundtrip(tmp_path):
    path = write_csv(tmp_path / "t.csv", "x/1", ("a", "b"), [(1, 0.5), (None, 2.25)])
    assert path.read_text() == "# schema: hiergame.x/1\na,b\n1,0.5\n,2.25\n"
