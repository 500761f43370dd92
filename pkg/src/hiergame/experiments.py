"""Parameter sweeps, figure datasets and the sim-vs-analytics harness.

Everything here writes flat CSV: a schema comment line, a header row, then
data rows with floats at 12 significant digits. Sweep and figure cells are
independent, so they run in a process pool; per-cell seeds come from the
master seed and the cell's grid index, and rows are emitted in grid order,
which keeps every output byte-identical no matter how many workers ran.
The HIERGAME_THREADS environment variable caps the pool.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import (
    cooperator_payoff,
    defector_payoff,
    equilibrium_ratio,
    payoff_coefficients,
    stability_region,
)
from .binomial import binomial_pmf
from .hierarchy import two_level_hierarchy
from .model import GameParams, ModelVariant, Role
from .simulate import (
    _BLOCK,
    RETRY_ROUND_CAP,
    SimulationError,
    _block_rng,
    derive_seed,
    estimate_equilibrium_with_se,
    estimate_payoff,
)

DEFAULT_SEED = 20_240_901
DEFAULT_REPLICATIONS = 100_000

_SCHEMA_PREFIX = "# schema: hiergame."


def format_value(value) -> str:
    """CSV cell formatting: 12 significant digits, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_csv(path, schema: str, header: tuple, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"{_SCHEMA_PREFIX}{schema}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
    return path


# ---------------------------------------------------------------------------
# sweep configuration


def parse_config(text: str) -> dict:
    """Flat key=value config; '#' starts a comment, lists are comma-separated."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        if not key:
            raise ValueError(f"config line {lineno}: empty key")
        mapping[key] = value.strip()
    return mapping


_VARIANT_TOKENS = {v.value: v for v in ModelVariant}


@dataclass(frozen=True)
class SweepSpec:
    """A grid of (n, tau, fc) cells for one variant."""

    variant: ModelVariant
    n_values: tuple
    fc_min: float
    fc_max: float
    fc_count: int
    tau_values: tuple
    replications: int
    master_seed: int
    simulate: bool = True
    output: str | None = None

    def __post_init__(self):
        if not self.n_values or not self.tau_values:
            raise ValueError("sweep grids must be non-empty")
        if any((not isinstance(n, int)) or n < 2 for n in self.n_values):
            raise ValueError(f"group sizes must be integers >= 2, got {self.n_values!r}")
        for name, v in (("fc_min", self.fc_min), ("fc_max", self.fc_max)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.fc_min > self.fc_max:
            raise ValueError("fc_min must not exceed fc_max")
        if self.fc_count < 1:
            raise ValueError("fc_count must be at least 1")
        if any(not 0.0 <= t <= 1.0 for t in self.tau_values):
            raise ValueError(f"tau values must lie in [0, 1], got {self.tau_values!r}")
        if self.replications < 1:
            raise ValueError("replications must be at least 1")

    @property
    def fc_grid(self) -> np.ndarray:
        return np.linspace(self.fc_min, self.fc_max, self.fc_count)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "SweepSpec":
        def _floats(key, default):
            if key not in mapping:
                return default
            return tuple(float(tok) for tok in mapping[key].split(",") if tok.strip())

        variant_token = mapping.get("variant", "multi")
        if variant_token not in _VARIANT_TOKENS:
            raise ValueError(
                f"unknown variant {variant_token!r}; pick one of {sorted(_VARIANT_TOKENS)}"
            )
        n_values = tuple(
            int(tok) for tok in mapping.get("n", "10").split(",") if tok.strip()
        )
        return cls(
            variant=_VARIANT_TOKENS[variant_token],
            n_values=n_values,
            fc_min=float(mapping.get("fc_min", 0.1)),
            fc_max=float(mapping.get("fc_max", 0.9)),
            fc_count=int(mapping.get("fc_count", 17)),
            tau_values=_floats("tau", (0.0,)),
            replications=int(mapping.get("reps", DEFAULT_REPLICATIONS)),
            master_seed=int(mapping.get("seed", DEFAULT_SEED)),
            simulate=mapping.get("simulate", "true").lower() in ("1", "true", "yes"),
            output=mapping.get("out"),
        )


# ---------------------------------------------------------------------------
# process-pool plumbing


def _resolve_workers(requested: int | None, task_count: int) -> int:
    count = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("HIERGAME_THREADS", "").strip()
    if cap:
        count = min(count, max(1, int(cap)))
    return max(1, min(count, task_count))


def _map_cells(worker, tasks: list, workers: int | None) -> list:
    count = _resolve_workers(workers, len(tasks))
    if count <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    try:
        with ProcessPoolExecutor(max_workers=count) as pool:
            return list(pool.map(worker, tasks, chunksize=1))
    except (OSError, PermissionError):
        # sandboxes without fork support fall back to the serial path;
        # per-cell seeding makes the results identical either way
        return [worker(t) for t in tasks]


def _equilibrium_cell(task):
    variant_value, n, tau, fc, reps, seed = task
    return estimate_equilibrium_with_se(n, fc, tau, ModelVariant(variant_value), reps, seed)


def _coefficient_cell(task):
    variant_value, n, tau, fc, reps, seed = task
    variant = ModelVariant(variant_value)
    params = GameParams(n=n, fc=fc, c=1.0, b=1.0, tau=tau)
    _, coop = estimate_payoff(params, variant, Role.COOPERATOR, reps, seed)
    _, defe = estimate_payoff(params, variant, Role.DEFECTOR, reps, seed)
    return (coop.a_hat, coop.a_se, coop.b_hat, coop.b_se, defe.b_hat, defe.b_se)


def _appendix_cell(task):
    n, fc, role_value, reps, seed = task
    mean, se, _groups = group_average_retry_payoff(
        n, fc, Role(role_value), c=0.2, b=1.0, replications=reps, master_seed=seed
    )
    return mean, se


# ---------------------------------------------------------------------------
# sweeps and validation

SWEEP_HEADER = (
    "variant", "n", "tau", "fc", "cb_analytic",
    "a_c", "b_c", "b_d", "lower", "upper", "cb_sim", "se",
)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list:
    """One row per (n, tau, fc) cell; writes spec.output when set."""
    grid = [
        (n, tau, float(fc))
        for n in spec.n_values
        for tau in spec.tau_values
        for fc in spec.fc_grid
    ]
    sims: list = [None] * len(grid)
    if spec.simulate:
        tasks = [
            (spec.variant.value, n, tau, fc, spec.replications, derive_seed(spec.master_seed, idx))
            for idx, (n, tau, fc) in enumerate(grid)
        ]
        sims = _map_cells(_equilibrium_cell, tasks, workers)
    rows = []
    for (n, tau, fc), sim in zip(grid, sims):
        coop = payoff_coefficients(n, fc, tau, spec.variant, Role.COOPERATOR)
        defe = payoff_coefficients(n, fc, tau, spec.variant, Role.DEFECTOR)
        region = stability_region(n, tau, spec.variant)
        rows.append((
            spec.variant.value, n, tau, fc,
            equilibrium_ratio(n, fc, tau, spec.variant),
            coop.a, coop.bcoef, defe.bcoef,
            region.lower, region.upper,
            sim[0] if sim else None,
            sim[1] if sim else None,
        ))
    if spec.output:
        write_csv(spec.output, "sweep/1", SWEEP_HEADER, rows)
    return rows


@dataclass(frozen=True)
class ValidationRow:
    variant: str
    n: int
    tau: float
    fc: float
    coefficient: str
    analytic: float
    simulated: float
    std_error: float
    z: float
    within: bool


@dataclass(frozen=True)
class ValidationReport:
    rows: tuple
    z_threshold: float
    min_pass_rate: float

    @property
    def cells(self) -> int:
        return len(self.rows)

    @property
    def within(self) -> int:
        return sum(1 for r in self.rows if r.within)

    @property
    def pass_rate(self) -> float:
        return self.within / self.cells if self.rows else 0.0

    @property
    def passed(self) -> bool:
        return self.pass_rate >= self.min_pass_rate

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict}: {self.within}/{self.cells} coefficient cells within "
            f"z={format_value(self.z_threshold)} "
            f"(rate {self.pass_rate:.4f}, required {self.min_pass_rate:.4f})"
        )


VALIDATE_HEADER = (
    "variant", "n", "tau", "fc", "coefficient",
    "analytic", "simulated", "se", "z", "within",
)


def validate(
    spec: SweepSpec,
    z_threshold: float = 3.5,
    min_pass_rate: float = 0.95,
    workers: int | None = None,
    analytic_offset: float = 0.0,
) -> ValidationReport:
    """Compare simulated coefficient means with the analytic coefficients.

    Each grid cell contributes three comparisons: the cooperator's kept-
    endowment coefficient a_c, its share coefficient b_c and the defector's
    share coefficient b_d (a_d is 1 by construction on both sides).
    ``analytic_offset`` is a harness-sensitivity hook: shifting the analytic
    side must flip the report to FAIL.
    """
    if z_threshold <= 0:
        raise ValueError("z threshold must be positive")
    grid = [
        (n, tau, float(fc))
        for n in spec.n_values
        for tau in spec.tau_values
        for fc in spec.fc_grid
    ]
    tasks = [
        (spec.variant.value, n, tau, fc, spec.replications, derive_seed(spec.master_seed, idx))
        for idx, (n, tau, fc) in enumerate(grid)
    ]
    sims = _map_cells(_coefficient_cell, tasks, workers)
    rows = []
    for (n, tau, fc), sim in zip(grid, sims):
        a_hat, a_se, bc_hat, bc_se, bd_hat, bd_se = sim
        coop = payoff_coefficients(n, fc, tau, spec.variant, Role.COOPERATOR)
        defe = payoff_coefficients(n, fc, tau, spec.variant, Role.DEFECTOR)
        triples = (
            ("a_c", coop.a + analytic_offset, a_hat, a_se),
            ("b_c", coop.bcoef + analytic_offset, bc_hat, bc_se),
            ("b_d", defe.bcoef + analytic_offset, bd_hat, bd_se),
        )
        for name, analytic_value, simulated, se in triples:
            if se > 0.0:
                z = (simulated - analytic_value) / se
            else:
                z = 0.0 if simulated == analytic_value else float("inf")
            rows.append(ValidationRow(
                variant=spec.variant.value, n=n, tau=tau, fc=fc, coefficient=name,
                analytic=analytic_value, simulated=simulated, std_error=se,
                z=z, within=abs(z) <= z_threshold,
            ))
    return ValidationReport(rows=tuple(rows), z_threshold=z_threshold, min_pass_rate=min_pass_rate)


# ---------------------------------------------------------------------------
# historical single-leader baseline and the whole-group appendix runs


def mark_original_cooperator_payoff(n: int, fc: float, c: float, b: float) -> float:
    """Original single-leader cooperator payoff, the fig10 comparison baseline.

    Identical to the MARK_WITH_MEMORY closed form under random mixing; kept
    here, spelled out, so the harness does not depend on that equivalence.
    """
    total = 0.0
    for i in range(n):
        weight = binomial_pmf(i, n - 1, fc)
        no_leader = ((n - 1) / n) ** (i + 1)
        total += weight * ((1.0 - no_leader) * ((i + 1) * b / n) + no_leader * c)
    return total


def mark_original_defector_payoff(n: int, fc: float, c: float, b: float) -> float:
    """Original single-leader defector payoff, the fig11 comparison baseline."""
    total = c
    for i in range(n):
        weight = binomial_pmf(i, n - 1, fc)
        no_leader = ((n - 1) / n) ** i
        total += weight * (1.0 - no_leader) * (i * b / n)
    return total


def group_average_retry_payoff(
    n: int,
    fc: float,
    role: Role,
    c: float,
    b: float,
    replications: int,
    master_seed: int,
) -> tuple[float, float, int]:
    """Whole-group retry runs, averaging payoffs of one role per group.

    Unlike the focal-planted estimator, each replication draws an entire
    group from the population (members independently cooperators at fc),
    plays the retry protocol, and records the mean payoff of the role's
    members in that group; groups without such members are skipped. This is
    population-style bookkeeping: compositions are weighted by how many
    groups contain the role, not by how many members hold it, which is
    exactly what the focal formulas do not describe, so the gap between the
    two is the quantity the fig10/fig11 datasets measure.

    Returns (mean, standard error, number of groups kept).
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    tag = 2 if role is Role.COOPERATOR else 3  # streams disjoint from the focal engine
    total = 0.0
    total_sq = 0.0
    kept = 0
    remaining = replications
    block_index = 0
    while remaining > 0:
        size = min(_BLOCK, remaining)
        rng = _block_rng(master_seed, tag, block_index)
        m = rng.binomial(n, fc, size)  # cooperators per whole group
        x = rng.binomial(m, 1.0 / n)
        pending = x >= 2
        rounds = 1
        while pending.any():
            rounds += 1
            if rounds > RETRY_ROUND_CAP:
                raise SimulationError(f"signaling failed to settle in {RETRY_ROUND_CAP} rounds")
            redraw = rng.binomial(m, 1.0 / n)
            x = np.where(pending, redraw, x)
            pending = x >= 2
        one = x == 1
        if role is Role.COOPERATOR:
            present = m >= 1
            # every cooperator in a group earns the same amount: all of them
            # contribute under one leader, none otherwise
            value = np.where(one, m * b / n, c)
        else:
            present = m <= n - 1
            value = c + np.where(one, m * b / n, 0.0)
        vals = value[present]
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        kept += int(present.sum())
        remaining -= size
        block_index += 1
    if kept == 0:
        raise ValueError(f"no group contained a {role.value} member; widen fc or raise replications")
    mean = total / kept
    if kept > 1:
        var = max(total_sq - total * total / kept, 0.0) / (kept - 1)
    else:
        var = 0.0
    return mean, (var / kept) ** 0.5, kept


# ---------------------------------------------------------------------------
# figure datasets

_FC17 = tuple(np.linspace(0.1, 0.9, 17))
_FC19 = tuple(np.linspace(0.05, 0.95, 19))

EQUILIBRIUM_HEADER = ("variant", "n", "tau", "fc", "cb_analytic", "cb_sim", "se")
STABILITY_HEADER = ("n", "tau", "lower", "upper_ours", "upper_mark")
APPENDIX_HEADER = ("model", "n", "fc", "wc_or_wd_sim", "analytic_revised", "analytic_mark_original")


def _h_table_rows(n_values) -> list:
    return [(n, x, two_level_hierarchy(n, x)) for n in n_values for x in range(n + 1)]


def _equilibrium_dataset(variants, n_values, tau_values, fc_values,
                         simulate, replications, master_seed, workers):
    grid = [
        (variant, n, tau, float(fc))
        for variant in variants
        for n in n_values
        for tau in tau_values
        for fc in fc_values
    ]
    sims: list = [None] * len(grid)
    if simulate:
        tasks = [
            (variant.value, n, tau, fc, replications, derive_seed(master_seed, idx))
            for idx, (variant, n, tau, fc) in enumerate(grid)
        ]
        sims = _map_cells(_equilibrium_cell, tasks, workers)
    rows = []
    for (variant, n, tau, fc), sim in zip(grid, sims):
        rows.append((
            variant.value, n, tau, fc,
            equilibrium_ratio(n, fc, tau, variant),
            sim[0] if sim else None,
            sim[1] if sim else None,
        ))
    return rows


def _stability_dataset(n_values, tau_values) -> list:
    rows = []
    for tau in tau_values:
        for n in n_values:
            ours = stability_region(n, tau, ModelVariant.MULTI_LEADER)
            # baseline bound from the original single-leader equations; the
            # with-memory variant reproduces those closed forms exactly
            mark = stability_region(n, tau, ModelVariant.MARK_WITH_MEMORY)
            rows.append((n, tau, ours.lower, ours.upper, mark.upper))
    return rows


def _appendix_dataset(role, replications, master_seed, workers) -> list:
    n_values = (2, 4, 6, 8, 10)
    grid = [(n, float(fc)) for n in n_values for fc in _FC19]
    tasks = [
        (n, fc, role.value, replications, derive_seed(master_seed, idx))
        for idx, (n, fc) in enumerate(grid)
    ]
    sims = _map_cells(_appendix_cell, tasks, workers)
    rows = []
    for (n, fc), (mean, _se) in zip(grid, sims):
        params = GameParams(n=n, fc=fc, c=0.2, b=1.0, tau=0.0)
        if role is Role.COOPERATOR:
            revised = cooperator_payoff(params, ModelVariant.MARK_RETRY)
            original = mark_original_cooperator_payoff(n, fc, 0.2, 1.0)
        else:
            revised = defector_payoff(params, ModelVariant.MARK_RETRY)
            original = mark_original_defector_payoff(n, fc, 0.2, 1.0)
        rows.append((ModelVariant.MARK_RETRY.value, n, fc, mean, revised, original))
    return rows


def _build_preset(name, replications, master_seed, workers):
    multi = ModelVariant.MULTI_LEADER
    if name == "fig1":
        return "fig1/1", ("n", "x", "h"), _h_table_rows([5])
    if name == "fig2":
        return "fig2/1", ("n", "x", "h"), _h_table_rows(range(2, 12))
    if name == "fig3":
        rows = _equilibrium_dataset((multi,), (2, 4, 6, 8, 10), (0.0,), _FC17,
                                    True, replications, master_seed, workers)
        return "fig3/1", EQUILIBRIUM_HEADER, rows
    if name == "fig4":
        return "fig4/1", STABILITY_HEADER, _stability_dataset(range(2, 21), (0.0,))
    if name == "fig5":
        return "fig5/1", STABILITY_HEADER, _stability_dataset(range(2, 51), (0.0,))
    if name == "fig6":
        variants = (ModelVariant.MARK_NO_MEMORY, multi, ModelVariant.MARK_WITH_MEMORY)
        rows = _equilibrium_dataset(variants, (10,), (0.0,), _FC17,
                                    True, replications, master_seed, workers)
        return "fig6/1", EQUILIBRIUM_HEADER, rows
    if name == "fig7":
        rows = _equilibrium_dataset((multi,), (10,), (0.0, 0.25, 0.5, 0.75, 1.0), _FC17,
                                    True, replications, master_seed, workers)
        return "fig7/1", EQUILIBRIUM_HEADER, rows
    if name == "fig8":
        rows = _equilibrium_dataset((multi,), (5, 10, 15, 20),
                                    (0.0, 0.2, 0.4, 0.6, 0.8, 1.0), _FC17,
                                    False, replications, master_seed, workers)
        return "fig8/1", EQUILIBRIUM_HEADER, rows
    if name == "fig9":
        return "fig9/1", STABILITY_HEADER, _stability_dataset(range(3, 21),
                                                              (0.0, 0.2, 0.4, 0.6, 0.8, 1.0))
    if name == "fig10":
        return "fig10/1", APPENDIX_HEADER, _appendix_dataset(
            Role.COOPERATOR, replications, master_seed, workers)
    if name == "fig11":
        return "fig11/1", APPENDIX_HEADER, _appendix_dataset(
            Role.DEFECTOR, replications, master_seed, workers)
    raise ValueError(f"unknown preset {name!r}")


FIGURE_PRESETS = (
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6",
    "fig7", "fig8", "fig9", "fig10", "fig11",
)


def figures(
    preset: str,
    out_dir,
    replications: int = DEFAULT_REPLICATIONS,
    master_seed: int = DEFAULT_SEED,
    workers: int | None = None,
) -> list:
    """Write the dataset(s) behind a figure preset; returns the paths."""
    names = FIGURE_PRESETS if preset == "all" else (preset,)
    paths = []
    for name in names:
        schema, header, rows = _build_preset(name, replications, master_seed, workers)
        paths.append(write_csv(Path(out_dir) / f"{name}.csv", schema, header, rows))
    return paths
