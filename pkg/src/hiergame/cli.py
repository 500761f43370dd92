"""Command line front end.

Every subcommand prints CSV with a header row to stdout (floats at 12
significant digits); file-writing commands report the written paths on
stderr so stdout stays parseable.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analytic import (
    cooperator_payoff,
    defector_payoff,
    equilibrium_ratio,
    stability_region,
)
from .experiments import (
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
    SWEEP_HEADER,
    VALIDATE_HEADER,
    SweepSpec,
    figures,
    format_value,
    parse_config,
    run_sweep,
    validate,
)
from .experiments import FIGURE_PRESETS
from .hierarchy import general_reaching_centrality, read_edge_list, two_level_hierarchy
from .model import GameParams, ModelVariant, Role
from .simulate import estimate_payoff, replicator_step

_VARIANT_CHOICES = tuple(v.value for v in ModelVariant)


def _emit(header, rows) -> None:
    sys.stdout.write(",".join(header) + "\n")
    for row in rows:
        sys.stdout.write(",".join(format_value(v) for v in row) + "\n")


def _add_selectors(parser, with_cost=False) -> None:
    parser.add_argument("--variant", choices=_VARIANT_CHOICES, default="multi")
    parser.add_argument("--n", type=int, required=True, help="group size")
    parser.add_argument("--fc", type=float, required=True, help="cooperator fraction")
    parser.add_argument("--tau", type=float, default=0.0, help="assortativity")
    if with_cost:
        parser.add_argument("--c", type=float, default=0.2, help="endowment kept by defectors")
        parser.add_argument("--b", type=float, default=1.0, help="pot multiplier")


def _cmd_hier(args) -> int:
    if args.hier_command == "table":
        if args.n < 2:
            raise ValueError("--n must be at least 2")
        _emit(("x", "h"), [(x, two_level_hierarchy(args.n, x)) for x in range(args.n + 1)])
        return 0
    text = sys.stdin.read() if args.edges == "-" else Path(args.edges).read_text()
    graph = read_edge_list(text)
    sys.stdout.write(format_value(general_reaching_centrality(graph)) + "\n")
    return 0


def _cmd_analytic(args) -> int:
    params = GameParams(n=args.n, fc=args.fc, c=args.c, b=args.b, tau=args.tau)
    variant = ModelVariant(args.variant)
    _emit(("W_C", "W_D"),
          [(cooperator_payoff(params, variant), defector_payoff(params, variant))])
    return 0


def _cmd_equilibrium(args) -> int:
    ratio = equilibrium_ratio(args.n, args.fc, args.tau, ModelVariant(args.variant))
    _emit(("fc", "cb_star"), [(args.fc, ratio)])
    return 0


def _cmd_stability(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise ValueError("need 2 <= n-min <= n-max")
    variant = ModelVariant(args.variant)
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        region = stability_region(n, args.tau, variant)
        rows.append((n, region.lower, region.upper))
    _emit(("n", "lower", "upper"), rows)
    return 0


def _cmd_simulate(args) -> int:
    params = GameParams(n=args.n, fc=args.fc, c=args.c, b=args.b, tau=args.tau)
    variant = ModelVariant(args.variant)
    roles = (Role.COOPERATOR, Role.DEFECTOR) if args.role == "both" else (Role(args.role),)
    rows = []
    for role in roles:
        estimate, coefs = estimate_payoff(
            params, variant, role, args.reps, args.seed, workers=args.workers
        )
        rows.append((role.value, estimate.mean, estimate.std_error,
                     coefs.a_hat, coefs.b_hat, args.reps, args.seed))
    _emit(("role", "mean", "se", "a_hat", "b_hat", "reps", "seed"), rows)
    return 0


def _cmd_evolve(args) -> int:
    if not 0.0 <= args.f0 <= 1.0:
        raise ValueError("--f0 must lie in [0, 1]")
    if args.generations < 0:
        raise ValueError("--generations must be non-negative")
    variant = ModelVariant(args.variant)
    fc = args.f0
    rows = [(0, fc)]
    for t in range(1, args.generations + 1):
        params = GameParams(n=args.n, fc=fc, c=args.cb, b=1.0, tau=args.tau)
        fc = replicator_step(fc, cooperator_payoff(params, variant),
                             defector_payoff(params, variant))
        rows.append((t, fc))
    _emit(("t", "f_c"), rows)
    return 0


def _cmd_sweep(args) -> int:
    spec = SweepSpec.from_mapping(parse_config(Path(args.config).read_text()))
    rows = run_sweep(spec, workers=args.workers)
    if spec.output:
        sys.stderr.write(f"wrote {spec.output}\n")
    else:
        _emit(SWEEP_HEADER, rows)
    return 0


def _cmd_validate(args) -> int:
    spec = SweepSpec.from_mapping(parse_config(Path(args.config).read_text()))
    report = validate(spec, z_threshold=args.z, min_pass_rate=args.pass_rate,
                      workers=args.workers)
    rows = [
        (r.variant, r.n, r.tau, r.fc, r.coefficient,
         r.analytic, r.simulated, r.std_error, r.z, r.within)
        for r in report.rows
    ]
    _emit(VALIDATE_HEADER, rows)
    sys.stderr.write(report.summary() + "\n")
    return 0 if report.passed else 1


def _cmd_figures(args) -> int:
    paths = figures(args.preset, args.out, replications=args.reps,
                    master_seed=args.seed, workers=args.workers)
    for path in paths:
        sys.stderr.write(f"wrote {path}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiergame",
        description="Status-hierarchy cooperation games: analytics, simulation, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    hier = sub.add_parser("hier", help="hierarchicalness of two-level and arbitrary graphs")
    hier_sub = hier.add_subparsers(dest="hier_command", required=True)
    table = hier_sub.add_parser("table", help="two-level hierarchy values for all top sizes")
    table.add_argument("--n", type=int, required=True, help="group size")
    grc = hier_sub.add_parser("grc", help="global reaching centrality of an edge list")
    grc.add_argument("--edges", required=True, help="edge list file, '-' for stdin")
    hier.set_defaults(func=_cmd_hier)

    analytic = sub.add_parser("analytic", help="expected payoffs for both roles")
    _add_selectors(analytic, with_cost=True)
    analytic.set_defaults(func=_cmd_analytic)

    equilibrium = sub.add_parser("equilibrium", help="cost-benefit ratio equalizing the roles")
    _add_selectors(equilibrium)
    equilibrium.set_defaults(func=_cmd_equilibrium)

    stability = sub.add_parser("stability", help="cooperation stability bounds over group sizes")
    stability.add_argument("--variant", choices=_VARIANT_CHOICES, default="multi")
    stability.add_argument("--n-min", type=int, required=True)
    stability.add_argument("--n-max", type=int, required=True)
    stability.add_argument("--tau", type=float, default=0.0)
    stability.set_defaults(func=_cmd_stability)

    simulate = sub.add_parser("simulate", help="Monte Carlo payoff estimate for one cell")
    _add_selectors(simulate, with_cost=True)
    simulate.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    simulate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    simulate.add_argument("--role", choices=("C", "D", "both"), default="both")
    simulate.add_argument("--workers", type=int, default=None)
    simulate.set_defaults(func=_cmd_simulate)

    evolve = sub.add_parser("evolve", help="discrete replicator trajectory of f_c")
    evolve.add_argument("--variant", choices=_VARIANT_CHOICES, default="multi")
    evolve.add_argument("--n", type=int, required=True)
    evolve.add_argument("--cb", type=float, required=True, help="cost-benefit ratio c/b")
    evolve.add_argument("--f0", type=float, required=True, help="initial cooperator fraction")
    evolve.add_argument("--generations", type=int, default=50)
    evolve.add_argument("--tau", type=float, default=0.0)
    evolve.set_defaults(func=_cmd_evolve)

    sweep = sub.add_parser("sweep", help="run a config-driven parameter sweep")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--workers", type=int, default=None)
    sweep.set_defaults(func=_cmd_sweep)

    validate_p = sub.add_parser("validate", help="check simulated coefficients against analytics")
    validate_p.add_argument("--config", required=True)
    validate_p.add_argument("--z", type=float, default=3.5)
    validate_p.add_argument("--pass-rate", type=float, default=0.95, dest="pass_rate")
    validate_p.add_argument("--workers", type=int, default=None)
    validate_p.set_defaults(func=_cmd_validate)

    figures_p = sub.add_parser("figures", help="write the dataset behind a figure preset")
    figures_p.add_argument("preset", choices=FIGURE_PRESETS + ("all",))
    figures_p.add_argument("--out", required=True, help="output directory")
    figures_p.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    figures_p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    figures_p.add_argument("--workers", type=int, default=None)
    figures_p.set_defaults(func=_cmd_figures)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
