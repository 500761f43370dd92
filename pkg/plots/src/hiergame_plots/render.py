"""Figure rendering from experiment datasets.

One renderer per dataset preset. The plotting convention throughout:
simulated values are dots, analytic values are lines, stability plots
shade the region between the lower and upper bounds. Rendering never
modifies the input CSVs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .csvio import PRESETS, CsvFormatError, Table, read_table  # noqa: E402


@dataclass(frozen=True)
class StyleOptions:
    dot_size: float = 5.0
    palette: str = "tab10"
    dpi: int = 150


@dataclass(frozen=True)
class FigureJob:
    preset: str
    csv_path: Path
    out_path: Path
    style: StyleOptions = field(default_factory=StyleOptions)

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise CsvFormatError(f"unknown preset {self.preset!r}")


def _colors(style: StyleOptions, count: int) -> list:
    cmap = plt.get_cmap(style.palette)
    if hasattr(cmap, "colors"):
        base = list(cmap.colors)
        return [base[i % len(base)] for i in range(count)]
    return [cmap(i / max(1, count - 1)) for i in range(count)]


def _series_keys(values) -> list:
    return list(dict.fromkeys(values))


def _split(table: Table, key_column: str, keys=None):
    """Row indices grouped by the raw value of one column, in file order."""
    raw = table.raw_column(key_column)
    keys = _series_keys(raw) if keys is None else keys
    return [(key, [i for i, v in enumerate(raw) if v == key]) for key in keys]


def _dots_and_line(ax, xs, analytic, simulated, color, label, style):
    ax.plot(xs, analytic, "-", color=color, label=label)
    if simulated is not None:
        pairs = [(x, y) for x, y in zip(xs, simulated) if y is not None]
        if pairs:
            ax.plot(*zip(*pairs), "o", color=color, markersize=style.dot_size,
                    label=f"{label} sim")


def _render_h_values(table: Table, style: StyleOptions):
    fig, ax = plt.subplots()
    groups = _split(table, "n")
    colors = _colors(style, len(groups))
    xs_all = table.column("x")
    hs_all = table.column("h")
    for color, (n_key, idx) in zip(colors, groups):
        xs = [xs_all[i] for i in idx]
        hs = [hs_all[i] for i in idx]
        ax.plot(xs, hs, "-o", color=color, markersize=style.dot_size, label=f"n={n_key}")
    ax.set_xlabel("x")
    ax.set_ylabel("H")
    ax.legend()
    return fig


def _render_equilibrium(table: Table, key_column: str, label_fmt, style: StyleOptions):
    fig, ax = plt.subplots()
    groups = _split(table, key_column)
    colors = _colors(style, len(groups))
    fc_all = table.column("fc")
    analytic_all = table.column("cb_analytic")
    sim_all = table.column("cb_sim")
    for color, (key, idx) in zip(colors, groups):
        xs = [fc_all[i] for i in idx]
        analytic = [analytic_all[i] for i in idx]
        simulated = [sim_all[i] for i in idx]
        _dots_and_line(ax, xs, analytic, simulated, color, label_fmt(key), style)
    ax.set_xlabel("f_c")
    ax.set_ylabel("c/b")
    ax.legend()
    return fig


def _render_equilibrium_two_keys(table: Table, style: StyleOptions):
    # one analytic line per (n, tau) pair; these datasets carry no dots
    fig, ax = plt.subplots()
    ns = table.raw_column("n")
    taus = table.raw_column("tau")
    pair_keys = _series_keys(list(zip(ns, taus)))
    colors = _colors(style, len(pair_keys))
    fc_all = table.column("fc")
    analytic_all = table.column("cb_analytic")
    sim_all = table.column("cb_sim")
    for color, (n_key, tau_key) in zip(colors, pair_keys):
        idx = [i for i in range(len(ns)) if ns[i] == n_key and taus[i] == tau_key]
        label = f"n={n_key}, τ={tau_key}"
        _dots_and_line(ax, [fc_all[i] for i in idx], [analytic_all[i] for i in idx],
                       [sim_all[i] for i in idx], color, label, style)
    ax.set_xlabel("f_c")
    ax.set_ylabel("c/b")
    ax.legend(fontsize="x-small", ncols=2)
    return fig


def _render_stability(table: Table, style: StyleOptions):
    fig, ax = plt.subplots()
    groups = _split(table, "tau")
    colors = _colors(style, len(groups))
    n_all = table.column("n")
    lower_all = table.column("lower")
    ours_all = table.column("upper_ours")
    mark_all = table.column("upper_mark")
    for color, (tau_key, idx) in zip(colors, groups):
        ns = [n_all[i] for i in idx]
        lower = [lower_all[i] for i in idx]
        ours = [ours_all[i] for i in idx]
        mark = [mark_all[i] for i in idx]
        suffix = f" (τ={tau_key})" if len(groups) > 1 else ""
        ax.fill_between(ns, lower, ours, color=color, alpha=0.15)
        ax.plot(ns, ours, "-", color=color, label=f"upper{suffix}")
        ax.plot(ns, mark, "--", color=color, label=f"upper, single-leader{suffix}")
        if tau_key == groups[0][0]:
            ax.plot(ns, lower, ":", color="black", label="lower (1/n)")
    ax.set_xlabel("n")
    ax.set_ylabel("c/b")
    ax.legend(fontsize="x-small")
    return fig


def _render_payoff_comparison(table: Table, ylabel: str, style: StyleOptions):
    fig, ax = plt.subplots()
    groups = _split(table, "n")
    colors = _colors(style, len(groups))
    fc_all = table.column("fc")
    sim_all = table.column("wc_or_wd_sim")
    revised_all = table.column("analytic_revised")
    original_all = table.column("analytic_mark_original")
    for color, (n_key, idx) in zip(colors, groups):
        xs = [fc_all[i] for i in idx]
        ax.plot(xs, [revised_all[i] for i in idx], "-", color=color, label=f"n={n_key}")
        ax.plot(xs, [original_all[i] for i in idx], "--", color=color,
                label=f"n={n_key} single-leader")
        ax.plot(xs, [sim_all[i] for i in idx], "o", color=color,
                markersize=style.dot_size, label=f"n={n_key} sim")
    ax.set_xlabel("f_c")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize="x-small", ncols=2)
    return fig


def build_figure(table: Table, style: StyleOptions = StyleOptions()):
    """Build the matplotlib figure for a parsed dataset."""
    preset = table.preset
    if preset in ("fig1", "fig2"):
        return _render_h_values(table, style)
    if preset == "fig3":
        return _render_equilibrium(table, "n", lambda n: f"n={n}", style)
    if preset == "fig6":
        return _render_equilibrium(table, "variant", str, style)
    if preset == "fig7":
        return _render_equilibrium(table, "tau", lambda t: f"τ={t}", style)
    if preset == "fig8":
        return _render_equilibrium_two_keys(table, style)
    if preset in ("fig4", "fig5", "fig9"):
        return _render_stability(table, style)
    if preset == "fig10":
        return _render_payoff_comparison(table, "W(C)", style)
    if preset == "fig11":
        return _render_payoff_comparison(table, "W(D)", style)
    raise CsvFormatError(f"unknown preset {preset!r}")


def render(job: FigureJob) -> Path:
    """Validate the CSV, draw the figure and write the image file."""
    table = read_table(job.csv_path, job.preset)
    fig = build_figure(table, job.style)
    out = Path(job.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=job.style.dpi)
    finally:
        plt.close(fig)
    return out
