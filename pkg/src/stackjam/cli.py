"""Command-line entry point: ``stackjam {channel,power,sweep,oracle,compare}``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import channel_game as cg
from . import experiments as ex
from . import power_game as pg
from .config import parse_toml, read_config, shipped_config
from .errors import ConfigError, StackjamError
from .scenario import scenario_from_doc

DEFAULT_EPSILONS = (-0.2, 0.0, 0.2)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from exc


def _load(path: str | None, fallback: str) -> dict:
    return read_config(path) if path else parse_toml(shipped_config(fallback))


def _emit(text: str, args) -> None:
    if args.out:
        ex.write_text(args.out, text)
        if getattr(args, "plot", False):
            from .plotting import figure_path, plot_report

            plot_report(text, figure_path(args.out), title=args.command)
    else:
        if getattr(args, "plot", False):
            raise ConfigError("--plot needs --out; the figure is written next to the CSV")
        sys.stdout.write(text)


def _run_plan(args, doc, **fields) -> None:
    plan = ex.ExperimentPlan.from_doc(
        doc, reps=args.reps, master_seed=args.seed, jobs=args.jobs, out=None, **fields
    )
    _emit(ex.run_plan(plan, doc), args)


def cmd_channel(args) -> None:
    doc = _load(args.config, "default.toml")
    _run_plan(args, doc, kind="sweep", sweep_param=ex.NO_SWEEP, sweep_values=(0.0,))


def cmd_power(args) -> None:
    doc = _load(args.config, "default.toml")
    if args.reps is None:
        # the power game has no randomness; one replication is exact
        args.reps = 1
    _run_plan(args, doc, kind="sweep", sweep_param="epsilon", sweep_values=args.epsilons)


def cmd_sweep(args) -> None:
    doc = _load(args.config, "default.toml")
    _run_plan(args, doc, kind=args.kind, sweep_param=args.param, sweep_values=args.values)


def _oracle_rows(doc) -> list[tuple]:
    rows = []

    def add(param, value, metric, x):
        rows.append((param, value, metric, float(x), 0.0, 0.0, 1))

    if "network" in doc:
        sc = scenario_from_doc(doc)
        for c in range(sc.num_channels):
            label = str(c + 1)
            nash = cg.brute_force_nash(sc, c)
            prof, phi = cg.potential_maximizer(sc, c)
            add("jammer_channel", label, "nash_count", len(nash))
            add("jammer_channel", label, "max_potential", phi)
            add("jammer_channel", label, "jammer_utility", cg.jammer_utility(sc, prof))
            add("jammer_channel", label, "ewaij", cg.ewaij(sc, prof))
        sol = cg.brute_force_stackelberg(sc)
        add("stackelberg", "-", "jammer_channel", sol.jammer_channel + 1)
        for n, a in enumerate(sol.profile.user_channels):
            add("stackelberg", "-", f"user_channel.{n + 1}", a + 1)
        add("stackelberg", "-", "jammer_utility", sol.jammer_utility)
        add("stackelberg", "-", "ewaij", sol.ewaij)
        add("stackelberg", "-", "potential", sol.potential)
        add("stackelberg", "-", "sum_rate", cg.rates(sc, sol.profile).sum_rate)
    if "power_game" in doc:
        spec = pg.PowerGameSpec.from_doc(doc)
        for name, rep in (("grid_oracle", pg.grid_oracle(spec)), ("leader_optimize", pg.leader_optimize(spec))):
            for metric, x in rep.as_dict().items():
                add("power_solver", name, metric, x)
    if not rows:
        raise ConfigError("oracle needs a [network] or [power_game] section")
    return rows


def cmd_oracle(args) -> None:
    doc = _load(args.config, "oracle_small.toml")
    _emit(ex.rows_to_csv(_oracle_rows(doc)), args)


def cmd_compare(args) -> None:
    texts = []
    for path in (args.arm_a, args.arm_b):
        try:
            with open(path) as fh:
                texts.append(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read report {path}: {exc}") from exc
    items = ex.compare(texts[0], texts[1], args.metric, args.metric_b)
    _emit(ex.improvements_to_csv(items), args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stackjam", description="Anti-jamming Stackelberg game simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_runs=True):
        p.add_argument("--config", help="TOML config (default: the shipped reference config)")
        p.add_argument("--out", help="write the CSV here instead of stdout")
        p.add_argument("--plot", action="store_true", help="also render a PNG next to --out")
        if with_runs:
            p.add_argument("--seed", type=int, help="master seed; replication r uses seed + r")
            p.add_argument("--reps", type=int, help="replications per configuration")
            p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("channel", help="HLA vs. random channel selection on one scenario")
    common(p)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("power", help="Bayesian vs. average power game over an epsilon sweep")
    common(p)
    p.add_argument("--epsilons", type=_float_list, default=DEFAULT_EPSILONS,
                   help="comma-separated observation errors (default -0.2,0,0.2)")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("sweep", help="experiment plan from the [experiment] section")
    common(p)
    p.add_argument("--kind", choices=ex.KINDS)
    p.add_argument("--param", help="sweep parameter")
    p.add_argument("--values", type=_float_list, help="comma-separated sweep values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exhaustive solutions for small instances")
    common(p, with_runs=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="relative improvement of one report over another")
    p.add_argument("arm_a")
    p.add_argument("arm_b")
    p.add_argument("--metric", required=True)
    p.add_argument("--metric-b", help="metric name in arm_b if it differs")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except StackjamError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
