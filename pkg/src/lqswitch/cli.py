"""Command-line entry point: load a game configuration, run one pipeline stage,
emit CSV artifacts.

Commands: riccati, values, schedule, simulate, compare, poa.
Exit codes: 0 ok, 1 usage, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .estimator import ERASURE
from .model import SpecFormatError, SpecValidationError, load_spec, validate_spec
from .riccati import SingularSystemError, solve_riccati
from .simulate import compare_baselines, monte_carlo, noise_for_run, rollout
from .switching import backward_induction, centralized_induction, price_of_anarchy


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int,)):
        return str(x)
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lqswitch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, with_seed=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON game configuration")
        p.add_argument("--output", default=".", help="directory for emitted CSV files")
        if with_seed:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--runs", type=int, default=10000)
        return p

    add("riccati", "control gains and cost matrices per stage -> riccati.csv")
    add("values", "covariance-tree values and decisions -> values.csv")
    add("schedule", "replayed equilibrium switching schedule -> schedule.csv")
    add("simulate", "seeded Monte Carlo -> trajectory.csv + summary.csv", with_seed=True)
    add("compare", "equilibrium vs never-close baseline -> compare.csv", with_seed=True)
    add("poa", "per-node social loss -> values.csv (k, age, poa)")
    return parser


def _solved_tables(spec):
    ric = solve_riccati(spec)
    tables, policy = backward_induction(spec, ric)
    centralized_induction(spec, ric, tables)
    price_of_anarchy(tables)
    return ric, tables, policy


def _emit_riccati(spec, out: Path):
    ric = solve_riccati(spec)
    rows = []
    for name, arr in (("P1", ric.P1), ("P2", ric.P2), ("L1", ric.L1), ("L2", ric.L2)):
        for t in range(arr.shape[0]):
            for i in range(arr.shape[1]):
                for j in range(arr.shape[2]):
                    rows.append((t, name, i, j, float(arr[t, i, j])))
    write_csv(out / "riccati.csv", ["t", "matrix", "i", "j", "value"], rows)


def _values_rows(tables):
    for k, stage in enumerate(tables.nodes):
        for age in sorted(stage, key=lambda a: -1 if a.is_init else a.tau):
            node = stage[age]
            yield (k, age.label, node.V1, node.V2, node.Vw,
                   node.delta_star, node.delta_central, node.poa)


def _emit_values(spec, out: Path):
    _, tables, _ = _solved_tables(spec)
    write_csv(out / "values.csv",
              ["k", "age", "V1", "V2", "Vw", "delta_star", "delta_central", "poa"],
              _values_rows(tables))


def _emit_poa(spec, out: Path):
    _, tables, _ = _solved_tables(spec)
    rows = ((k, age, poa) for (k, age, _, _, _, _, _, poa) in _values_rows(tables))
    write_csv(out / "values.csv", ["k", "age", "poa"], rows)


def _emit_schedule(spec, out: Path):
    ric = solve_riccati(spec)
    _, policy = backward_induction(spec, ric)
    rows = list(enumerate(policy.replay()))
    write_csv(out / "schedule.csv", ["k", "delta"], rows)


def _emit_simulate(spec, out: Path, seed: int, runs: int):
    ric = solve_riccati(spec)
    _, policy = backward_induction(spec, ric)
    summary = monte_carlo(spec, ric, policy, seed, runs)
    write_csv(out / "summary.csv",
              ["n_runs", "mean_cost1", "mean_cost2", "se1", "se2",
               "closure_count", "analytic1", "analytic2"],
              [(summary.n_runs, summary.mean_cost1, summary.mean_cost2,
                summary.se1, summary.se2, summary.closure_count,
                summary.analytic1, summary.analytic2)])

    x0, w = noise_for_run(spec, seed, 0)
    rec = rollout(spec, ric, policy, x0, w)
    n, m, T = spec.n, spec.m, spec.T
    header = (["t", "delta"]
              + [f"x{i}" for i in range(n)]
              + [f"xhat{i}" for i in range(n)]
              + [f"xhat_pred{i}" for i in range(n)]
              + [f"u1_{i}" for i in range(m)]
              + [f"u2_{i}" for i in range(m)]
              + [f"y{i}" for i in range(n)]
              + [f"w{i}" for i in range(n)]
              + ["c1", "c2"])
    rows = []
    for t in range(T + 1):
        y = rec.y[t]
        row = [t, int(rec.delta[t])]
        row += [float(v) for v in rec.x[t]]
        row += [float(v) for v in rec.xhat[t]]
        row += [float(v) for v in rec.xhat_pred[t]]
        row += ([float(v) for v in rec.u1[t]] if t < T else [None] * m)
        row += ([float(v) for v in rec.u2[t]] if t < T else [None] * m)
        row += ([None] * n if y is ERASURE else [float(v) for v in y])
        row += ([float(v) for v in rec.w[t]] if t < T else [None] * n)
        row += [float(rec.c1[t]), float(rec.c2[t])]
        rows.append(row)
    write_csv(out / "trajectory.csv", header, rows)


def _emit_compare(spec, out: Path, seed: int, runs: int):
    ric = solve_riccati(spec)
    table = compare_baselines(spec, ric, seed, runs)
    header = ["player", "analytic_switching", "analytic_never", "empirical_switching",
              "empirical_never", "se_switching", "se_never", "closures_switching",
              "closures_never", "ratio_analytic", "ratio_empirical"]
    s, b = table.switching, table.never_close
    rows = [
        (1, s.analytic1, b.analytic1, s.mean_cost1, b.mean_cost1, s.se1, b.se1,
         s.closure_count, b.closure_count, table.ratio_analytic1, table.ratio_empirical1),
        (2, s.analytic2, b.analytic2, s.mean_cost2, b.mean_cost2, s.se2, b.se2,
         s.closure_count, b.closure_count, table.ratio_analytic2, table.ratio_empirical2),
    ]
    write_csv(out / "compare.csv", header, rows)


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1

    try:
        text = Path(ns.config).read_text()
        spec = validate_spec(load_spec(text))
    except OSError as exc:
        print(f"lqswitch: cannot read configuration: {exc}", file=sys.stderr)
        return 2
    except (SpecFormatError, SpecValidationError) as exc:
        print(f"lqswitch: invalid configuration: {exc}", file=sys.stderr)
        return 2

    out = Path(ns.output)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if ns.command == "riccati":
            _emit_riccati(spec, out)
        elif ns.command == "values":
            _emit_values(spec, out)
        elif ns.command == "schedule":
            _emit_schedule(spec, out)
        elif ns.command == "simulate":
            _emit_simulate(spec, out, ns.seed, ns.runs)
        elif ns.command == "compare":
            _emit_compare(spec, out, ns.seed, ns.runs)
        elif ns.command == "poa":
            _emit_poa(spec, out)
    except SingularSystemError as exc:
        print(f"lqswitch: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"lqswitch: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
