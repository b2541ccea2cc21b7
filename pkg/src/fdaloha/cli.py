"""``fdaloha`` command line: figure data, parameter sweeps, simulator validation, delta tables.

Exit status: 0 success, 1 usage or parameter error, 2 numerical failure
(quadrature or optimiser), 3 validation failure (some ``|z| > 4``).
Output goes to ``--out``; otherwise to ``$FDALOHA_OUTPUT_DIR`` (default: the
working directory) under a name derived from the subcommand.  ``--out -``
writes to standard output.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .figures import (
    FIGURES,
    METRICS,
    SIM_DURATIONS,
    SIM_QS,
    SWEEP_VARIABLES,
    CurveData,
    Operating,
    SweepSpec,
    delta_table,
    figure,
    sweep,
    validation_grid,
)
from .model import ParameterError, SystemParams
from .montecarlo import ConfigError, SimConfig
from .quadrature import QuadConfig, QuadratureError
from .search import OptimizationError

OUTPUT_ENV = "FDALOHA_OUTPUT_DIR"
Z_LIMIT = 4.0

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_common(p: argparse.ArgumentParser) -> None:
    d = SystemParams()
    g = p.add_argument_group("model parameters")
    g.add_argument("--lambda", dest="lambda_", type=float, default=d.lambda_, help="link density (default %(default)s)")
    g.add_argument("--r", type=float, default=d.r, help="link distance (default %(default)s)")
    g.add_argument("--alpha", type=float, default=d.alpha, help="path-loss exponent (default %(default)s)")
    g.add_argument("--theta", type=float, default=d.theta, help="SIR threshold (default %(default)s)")
    g.add_argument("--eta", type=float, default=d.eta, help="cancellation efficiency (default %(default)s)")
    g.add_argument("--w", type=float, default=d.w, help="bitrate (default %(default)s)")
    g.add_argument("--q", type=float, default=0.0, help="full-duplex fraction (default %(default)s)")
    g.add_argument("--d", type=float, default=1.0, help="half-duplex packet duration (default %(default)s)")
    g.add_argument("--gamma", type=float, default=1.0, help="full/half duration ratio (default %(default)s)")
    g.add_argument("--load", type=float, default=0.05, help="network load G (default %(default)s)")
    p.add_argument("--tol", type=float, default=QuadConfig().rel_tol, help="quadrature relative tolerance")
    p.add_argument("--out", default=None, help="output CSV path, '-' for stdout")


def _add_sim(p: argparse.ArgumentParser, reps: int) -> None:
    s = SimConfig()
    g = p.add_argument_group("simulation")
    g.add_argument("--seed", type=int, default=s.base_seed, help="base seed (default %(default)s)")
    g.add_argument("--reps", type=int, default=reps, help="replications (default %(default)s)")
    g.add_argument("--window", type=float, default=s.window_side, help="torus side L (default %(default)s)")
    g.add_argument("--backoff", type=float, default=s.backoff_max, help="maximum backoff B (default %(default)s)")
    g.add_argument("--measure", type=float, default=s.measure_time, help="measurement time (default %(default)s)")
    g.add_argument("--warmup", type=float, default=None, help="warm-up time (default two cycles)")
    g.add_argument(
        "--fresh-positions", action="store_true", help="relocate every packet (space-time Poisson traffic)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdaloha", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("figure", help="data behind one figure")
    f.add_argument("fig_id", type=int, choices=FIGURES)
    _add_common(f)
    _add_sim(f, reps=0)

    s = sub.add_parser("sweep", help="evaluate metrics along one parameter")
    s.add_argument("variable", choices=SWEEP_VARIABLES)
    s.add_argument("lo", type=float)
    s.add_argument("hi", type=float)
    s.add_argument("--steps", type=int, default=21)
    s.add_argument("--scale", choices=("linear", "log"), default="linear")
    s.add_argument("--metrics", default="throughput", help=f"comma list from: {', '.join(sorted(METRICS))}")
    _add_common(s)

    v = sub.add_parser("validate", help="simulator against analytic throughput")
    _add_common(v)
    _add_sim(v, reps=SimConfig().replications)
    v.add_argument("--grid", action="store_true", help="run the full q x D grid instead of the single (--q, --d)")
    v.add_argument("--qs", type=_floats, default=None, help="comma list of q values for --grid")
    v.add_argument("--ds", type=_floats, default=None, help="comma list of durations for --grid")
    v.add_argument("--analytic-eta", type=float, default=None, help="eta used on the analytic side only")

    t = sub.add_parser("tables", help="delta(theta, alpha) table with error columns")
    t.add_argument("--thetas", type=_floats, default=[0.5, 1.0, 2.0, 4.0, 8.0])
    t.add_argument("--alphas", type=_floats, default=[2.5, 3.0, 3.5, 4.0, 5.0, 6.0])
    t.add_argument("--tol", type=float, default=QuadConfig().rel_tol)
    t.add_argument("--out", default=None)
    return parser


def _operating(args) -> Operating:
    params = SystemParams(
        lambda_=args.lambda_, r=args.r, alpha=args.alpha, theta=args.theta, eta=args.eta, w=args.w
    )
    if not 0.0 <= args.q <= 1.0:
        raise ParameterError(f"q must lie in [0, 1], got {args.q}")
    for name in ("d", "gamma", "load"):
        if not getattr(args, name) > 0:
            raise ParameterError(f"{name} must be positive")
    return Operating(params, args.q, args.d, args.gamma, args.load)


def _sim(args) -> SimConfig:
    return SimConfig(
        window_side=args.window,
        backoff_max=args.backoff,
        warmup=args.warmup,
        measure_time=args.measure,
        replications=args.reps,
        base_seed=args.seed,
        fresh_positions=args.fresh_positions,
    )


def _emit(data: CurveData, args, default_name: str) -> Path | None:
    if args.out == "-":
        sys.stdout.write(data.to_csv())
        return None
    path = Path(args.out) if args.out else Path(os.environ.get(OUTPUT_ENV, ".")) / default_name
    path.parent.mkdir(parents=True, exist_ok=True)
    data.write(path)
    print(f"wrote {len(data)} rows to {path}", file=sys.stderr)
    return path


def _run(args) -> int:
    cfg = QuadConfig(rel_tol=args.tol)
    if args.command == "tables":
        _emit(delta_table(args.thetas, args.alphas, cfg), args, "delta_table.csv")
        return EXIT_OK

    base = _operating(args)
    if args.command == "figure":
        sim = _sim(args) if args.reps > 0 else None
        suffix = "_sim" if sim else ""
        _emit(figure(args.fig_id, base, cfg, sim), args, f"fig{args.fig_id}{suffix}.csv")
        return EXIT_OK

    if args.command == "sweep":
        spec = SweepSpec(args.variable, args.lo, args.hi, args.steps, args.scale)
        metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
        _emit(sweep(spec, metrics, base, cfg), args, f"sweep_{args.variable}.csv")
        return EXIT_OK

    # validate
    sim = _sim(args)
    if args.grid:
        qs, ds = args.qs or SIM_QS, args.ds or SIM_DURATIONS
    else:
        qs, ds = [base.q], [base.d]
    analytic = base.params.replace(eta=args.analytic_eta) if args.analytic_eta is not None else None
    data = validation_grid(base, cfg, sim, qs, ds, analytic)
    _emit(data, args, "validate.csv")
    worst = max((abs(z) for z in data.columns["z"] if not math.isnan(z)), default=0.0)
    for row in zip(*(data.columns[k] for k in ("q", "d", "analytic", "sim_mean", "sim_stderr", "z"))):
        q, d, a, m, se, z = row
        flag = "low-power" if math.isnan(z) else ("FAIL" if abs(z) > Z_LIMIT else "ok")
        print(f"q={q:<4g} D={d:<5g} analytic={a:.5f} sim={m:.5f}+-{se:.5f} z={z:+.2f} {flag}", file=sys.stderr)
    if sim.replications < 2:
        print("warning: a single replication gives no standard error (low power)", file=sys.stderr)
    return EXIT_VALIDATION if worst > Z_LIMIT else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (ParameterError, ConfigError) as exc:
        print(f"fdaloha: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, OptimizationError, ArithmeticError) as exc:
        print(f"fdaloha: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
