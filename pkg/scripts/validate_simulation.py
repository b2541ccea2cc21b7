"""Simulated against analytic throughput on the 3 x 5 (q, D) grid.

Runs the renewal simulator (each cluster keeps its location across packets)
and, for contrast, the fresh-position variant in which every packet is placed
anew.  Prints one line per cell and writes both grids as CSV.

    python scripts/validate_simulation.py --reps 20
"""

import argparse
import time
from pathlib import Path

from fdaloha.figures import SIM_DURATIONS, SIM_QS, Operating, validation_grid
from fdaloha.montecarlo import SimConfig
from fdaloha.quadrature import QuadConfig


def run(label: str, sim: SimConfig, out: Path) -> None:
    t0 = time.perf_counter()
    data = validation_grid(Operating(), QuadConfig(), sim, SIM_QS, SIM_DURATIONS)
    data.write(out / f"validate_{label}.csv")
    cols = data.columns
    inside = sum(abs(z) <= 3 for z in cols["z"])
    print(f"== {label}: {inside}/{len(data)} cells within 3 SE ({time.perf_counter() - t0:.0f}s)")
    for q, d, a, m, se, z in zip(*(cols[k] for k in ("q", "d", "analytic", "sim_mean", "sim_stderr", "z"))):
        print(f"  q={q:<4g} D={d:<4g} analytic={a:.5f} sim={m:.5f} +- {se:.5f}  z={z:+.2f}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--out", type=Path, default=Path("results/validation"))
    ap.add_argument("--skip-fresh", action="store_true")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    base = SimConfig(window_side=40.0, backoff_max=14.0, measure_time=60.0, replications=args.reps, base_seed=args.seed)
    run("renewal", base, args.out)
    if not args.skip_fresh:
        run("fresh_positions", SimConfig(**{**base.__dict__, "fresh_positions": True}), args.out)


if __name__ == "__main__":
    main()
