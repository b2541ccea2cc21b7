"""Write the data behind every figure plus the delta table as CSV files.

    python scripts/reproduce_figures.py --out results/figures [--sim-reps 20]

With ``--sim-reps`` greater than zero the duration figure also carries the
simulated points (this takes several minutes).
"""

import argparse
import time
from pathlib import Path

from fdaloha.figures import FIGURES, Operating, delta_table, figure
from fdaloha.montecarlo import SimConfig
from fdaloha.quadrature import QuadConfig


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/figures"))
    ap.add_argument("--sim-reps", type=int, default=0)
    ap.add_argument("--seed", type=int, default=SimConfig().base_seed)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    cfg = QuadConfig()
    sim = SimConfig(replications=args.sim_reps, base_seed=args.seed) if args.sim_reps > 0 else None
    for fig_id in FIGURES:
        t0 = time.perf_counter()
        data = figure(fig_id, Operating(), cfg, sim if fig_id == 3 else None)
        path = args.out / f"fig{fig_id}.csv"
        data.write(path)
        print(f"fig{fig_id}: {len(data)} rows -> {path} ({time.perf_counter() - t0:.1f}s)")
    table = delta_table([0.5, 1.0, 2.0, 4.0, 8.0], [2.5, 3.0, 3.5, 4.0, 5.0, 6.0], cfg)
    table.write(args.out / "delta_table.csv")
    print(f"delta table: {len(table)} rows -> {args.out / 'delta_table.csv'}")


if __name__ == "__main__":
    main()
