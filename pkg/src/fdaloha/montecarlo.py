"""Event-level simulation of a renewal-Aloha network on a square torus.

Every cluster alternates between a transmission and a backoff drawn uniformly
in ``[0, B]``.  At each transmission start the duplex mode is redrawn (full
duplex with probability ``q``; full-duplex exchanges last ``gamma D``).  A
packet is decoded when its signal, with unit-mean exponential fading, beats
``theta`` times the interference averaged over the packet window, plus the
residual self-interference ``1 - eta`` at full-duplex receivers.

The whole transmission schedule of a replication is drawn up front; the
interferers of each measured packet are then located by binary search on the
sorted start times, which keeps the inner loop in numpy.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import DurationConfig, SystemParams

PAIR_CHUNK = 2_000_000


class ConfigError(ValueError):
    """Malformed simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    window_side: float = 40.0
    backoff_max: float = 14.0
    warmup: float | None = None
    measure_time: float = 60.0
    replications: int = 20
    base_seed: int = 12345
    fresh_positions: bool = False

    def __post_init__(self):
        if not self.window_side > 0:
            raise ConfigError(f"window_side must be positive, got {self.window_side}")
        if not self.backoff_max >= 0:
            raise ConfigError(f"backoff_max must be nonnegative, got {self.backoff_max}")
        if not self.measure_time > 0:
            raise ConfigError(f"measure_time must be positive, got {self.measure_time}")
        if self.replications < 1:
            raise ConfigError(f"replications must be at least 1, got {self.replications}")
        if self.warmup is not None and self.warmup < 0:
            raise ConfigError(f"warmup must be nonnegative, got {self.warmup}")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("base_seed must fit in 64 unsigned bits")

    def warmup_for(self, max_duration: float) -> float:
        """Warm-up time, defaulting to two full cycles of the longest packet."""
        return 2.0 * (max_duration + self.backoff_max) if self.warmup is None else self.warmup

    def check(self, params: SystemParams, dur: DurationConfig) -> None:
        if self.window_side <= 10.0 * params.r:
            raise ConfigError(f"window_side {self.window_side} must exceed 10 r = {10 * params.r}")
        longest = max(dur.d, dur.d_fd)
        need = 2.0 * (longest + self.backoff_max)
        if self.warmup_for(longest) < need:
            raise ConfigError(f"warmup {self.warmup} shorter than two cycles ({need})")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class ReplicationCounts:
    seed: int
    clusters: int
    attempts_hd: int
    attempts_fd: int
    successes_hd: int
    successes_fd: int
    delivered_bits: float
    throughput: float


@dataclass(frozen=True)
class SimEstimate:
    throughput_mean: float
    throughput_stderr: float
    attempts: int
    successes_hd: int
    successes_fd: int
    replicates: tuple[ReplicationCounts, ...] = field(repr=False, default=())

    @property
    def success_rate(self) -> float:
        return (self.successes_hd + self.successes_fd) / self.attempts if self.attempts else float("nan")


@dataclass(frozen=True)
class Layout:
    """Cluster geometry plus the full transmission schedule, sorted by start."""

    side: float
    centers: np.ndarray  # (n, 2)
    companions: np.ndarray  # (n, 2)
    start: np.ndarray
    duration: np.ndarray
    cluster: np.ndarray
    full_duplex: np.ndarray

    def shifted(self, offset: Sequence[float]) -> "Layout":
        off = np.asarray(offset, dtype=float)
        return Layout(
            self.side,
            np.mod(self.centers + off, self.side),
            np.mod(self.companions + off, self.side),
            self.start,
            self.duration,
            self.cluster,
            self.full_duplex,
        )


def match_density(lambda_: float, d: float, b: float) -> float:
    """Cluster density whose renewal traffic starts ``lambda_`` packets per unit area and time.

    A cluster starts one packet per mean cycle ``d + b/2`` (``d`` the mean
    packet duration, backoff uniform on ``[0, b]``).
    """
    if not (lambda_ > 0 and d > 0 and b >= 0):
        raise ValueError("need lambda > 0, d > 0, b >= 0")
    return lambda_ * (d + 0.5 * b)


def torus_distance(a: np.ndarray, b: np.ndarray, side: float) -> np.ndarray:
    delta = np.abs(np.mod(a - b, side))
    delta = np.minimum(delta, side - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def time_average_interference(
    receiver: Sequence[float],
    own_window: tuple[float, float],
    interferers: Iterable[tuple[Sequence[float], float, tuple[float, float]]],
    alpha: float,
    side: float | None = None,
) -> float:
    """Interference power averaged over ``own_window = (start, duration)``.

    Each interferer is ``(position, fading, (start, duration))``.  Distances are
    Euclidean, or toroidal when ``side`` is given.
    """
    t0, dur = own_window
    rx = np.asarray(receiver, dtype=float)
    total = 0.0
    for pos, fading, (s, d) in interferers:
        if fading < 0:
            raise ValueError("fading must be nonnegative")
        overlap = max(0.0, min(t0 + dur, s + d) - max(t0, s)) / dur
        if overlap == 0.0:
            continue
        p = np.asarray(pos, dtype=float)
        dist = float(torus_distance(p, rx, side)) if side else float(np.hypot(*(p - rx)))
        total += fading * dist ** (-alpha) * overlap
    return total


def draw_layout(
    params: SystemParams,
    q: float,
    dur: DurationConfig,
    sim: SimConfig,
    rng: np.random.Generator,
    fresh_positions: bool | None = None,
) -> Layout:
    """Place clusters on the torus and draw every transmission up to the horizon.

    With ``fresh_positions`` each packet is relocated uniformly at random, which
    removes the spatial memory of the renewal traffic while keeping its timing.
    """
    if fresh_positions is None:
        fresh_positions = sim.fresh_positions
    side = sim.window_side
    b = sim.backoff_max
    mean_dur = dur.d * (1.0 + q * (dur.gamma - 1.0))
    longest = max(dur.d, dur.d_fd)
    horizon = sim.warmup_for(longest) + sim.measure_time + longest
    n = rng.poisson(match_density(params.lambda_, mean_dur, b) * side * side)
    centers = rng.uniform(0.0, side, size=(n, 2))
    phi = rng.uniform(0.0, 2.0 * np.pi, size=n)
    companions = np.mod(centers + params.r * np.column_stack((np.cos(phi), np.sin(phi))), side)

    first = rng.uniform(0.0, longest + b, size=n)
    cycles = int(math.ceil(horizon / (min(dur.d, dur.d_fd) + 0.5 * b) * 1.5)) + 8
    starts, durs, fds, owners = [], [], [], []
    pending = np.arange(n)
    t = first
    while pending.size:
        fd = rng.random((pending.size, cycles)) < q
        d = np.where(fd, dur.d_fd, dur.d)
        gap = d + rng.uniform(0.0, b, size=(pending.size, cycles))
        offsets = np.concatenate((np.zeros((pending.size, 1)), np.cumsum(gap[:, :-1], axis=1)), axis=1)
        st = t[:, None] + offsets
        keep = st < horizon
        starts.append(st[keep])
        durs.append(d[keep])
        fds.append(fd[keep])
        owners.append(np.broadcast_to(pending[:, None], st.shape)[keep])
        last = st[:, -1] + gap[:, -1]
        more = last < horizon
        pending, t = pending[more], last[more]

    start = np.concatenate(starts + [np.empty(0)])
    duration = np.concatenate(durs + [np.empty(0)])
    full = np.concatenate(fds + [np.empty(0, dtype=bool)])
    cluster = np.concatenate(owners + [np.empty(0, dtype=np.intp)])
    order = np.lexsort((cluster, start))
    start, duration, cluster, full = start[order], duration[order], cluster[order], full[order]
    if fresh_positions:
        # Every transmission gets its own location: the space-time process becomes Poisson.
        m = start.size
        centers = rng.uniform(0.0, side, size=(m, 2))
        phi = rng.uniform(0.0, 2.0 * np.pi, size=m)
        companions = np.mod(centers + params.r * np.column_stack((np.cos(phi), np.sin(phi))), side)
        cluster = np.arange(m)
    return Layout(side, centers, companions, start, duration, cluster, full)


def _receptions(layout: Layout, measured: np.ndarray):
    """Expand measured packets into receptions: one for half duplex, two for full duplex."""
    fd = layout.full_duplex[measured]
    pkt = np.concatenate((measured, measured[fd]))
    cl = layout.cluster[pkt]
    rx = np.concatenate((layout.companions[layout.cluster[measured]], layout.centers[layout.cluster[measured[fd]]]))
    is_fd = layout.full_duplex[pkt]
    order = np.argsort(pkt, kind="stable")
    return pkt[order], cl[order], rx[order], is_fd[order]


def evaluate_layout(
    layout: Layout,
    params: SystemParams,
    window: tuple[float, float],
    rng: np.random.Generator,
    w: float | None = None,
) -> dict:
    """Decode every packet ending inside ``window = (t0, t1)``.

    Fading draws are consumed in time order of the receptions, so two layouts
    differing only by a rigid shift see identical draws.
    """
    t0, t1 = window
    end = layout.start + layout.duration
    measured = np.flatnonzero((end >= t0) & (end < t1))
    pkt, own_cluster, rx, is_fd = _receptions(layout, measured)
    m = pkt.size
    s_rx, d_rx = layout.start[pkt], layout.duration[pkt]
    longest = float(layout.duration.max()) if layout.duration.size else 0.0
    lo = np.searchsorted(layout.start, s_rx - longest, side="right")
    hi = np.searchsorted(layout.start, s_rx + d_rx, side="left")
    counts = hi - lo

    signal = rng.exponential(size=m)
    interference = np.zeros(m)
    alpha = params.alpha
    side = layout.side
    bounds = np.concatenate(([0], np.cumsum(counts)))
    i = 0
    while i < m:
        j = int(np.searchsorted(bounds, bounds[i] + PAIR_CHUNK, side="right")) - 1
        j = max(j, i + 1)
        c = counts[i:j]
        row = np.repeat(np.arange(i, j), c)
        k = lo[row] + (np.arange(row.size) - np.repeat(bounds[i:j] - bounds[i], c))
        s_k, d_k = layout.start[k], layout.duration[k]
        ov = np.minimum(s_rx[row] + d_rx[row], s_k + d_k) - np.maximum(s_rx[row], s_k)
        ok = (ov > 0) & (layout.cluster[k] != own_cluster[row])
        row, k, ov = row[ok], k[ok], ov[ok] / d_rx[row[ok]]
        cl_k = layout.cluster[k]
        fd_k = layout.full_duplex[k]
        gain = rng.exponential(size=row.size) * torus_distance(layout.centers[cl_k], rx[row], side) ** (-alpha)
        fd_rows = row[fd_k]
        fd_gain = rng.exponential(size=fd_rows.size) * torus_distance(
            layout.companions[cl_k[fd_k]], rx[fd_rows], side
        ) ** (-alpha)
        interference[i:j] += np.bincount(row - i, weights=gain * ov, minlength=j - i)
        interference[i:j] += np.bincount(fd_rows - i, weights=fd_gain * ov[fd_k], minlength=j - i)
        i = j

    residual = np.where(is_fd, 1.0 - params.eta, 0.0)
    sir_ok = signal * params.r ** (-alpha) >= params.theta * (interference + residual)
    w = params.w if w is None else w
    return {
        "attempts_hd": int(np.count_nonzero(~is_fd)),
        "attempts_fd": int(np.count_nonzero(is_fd)),
        "successes_hd": int(np.count_nonzero(sir_ok & ~is_fd)),
        "successes_fd": int(np.count_nonzero(sir_ok & is_fd)),
        "delivered_bits": float(w * np.sum(d_rx[sir_ok])),
    }


def replication_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([base_seed, index])))


def run_replication(
    params: SystemParams, q: float, dur: DurationConfig, sim: SimConfig, seed_index: int
) -> ReplicationCounts:
    if not 0.0 <= q <= 1.0:
        raise ConfigError(f"q must lie in [0, 1], got {q}")
    sim.check(params, dur)
    rng = replication_rng(sim.base_seed, seed_index)
    layout = draw_layout(params, q, dur, sim, rng)
    t0 = sim.warmup_for(max(dur.d, dur.d_fd))
    c = evaluate_layout(layout, params, (t0, t0 + sim.measure_time), rng)
    area_time = sim.window_side ** 2 * sim.measure_time
    return ReplicationCounts(
        seed=seed_index,
        clusters=int(layout.centers.shape[0]),
        throughput=c["delivered_bits"] / area_time,
        **c,
    )


def _run_star(args):
    return run_replication(*args)


def estimate_throughput(
    params: SystemParams,
    q: float,
    dur: DurationConfig,
    sim: SimConfig,
    workers: int = 1,
) -> SimEstimate:
    """Mean throughput density over ``sim.replications`` independent runs.

    Replication ``i`` is seeded from ``(base_seed, i)`` so results do not
    depend on ``workers``; the standard error is the sample standard deviation
    over replications divided by its square root (zero for a single run).
    """
    sim.check(params, dur)
    jobs = [(params, q, dur, sim, i) for i in range(sim.replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reps = list(pool.map(_run_star, jobs))
    else:
        reps = [_run_star(j) for j in jobs]
    tp = np.array([r.throughput for r in reps])
    stderr = float(tp.std(ddof=1) / math.sqrt(tp.size)) if tp.size > 1 else 0.0
    return SimEstimate(
        throughput_mean=float(tp.mean()),
        throughput_stderr=stderr,
        attempts=sum(r.attempts_hd + r.attempts_fd for r in reps),
        successes_hd=sum(r.successes_hd for r in reps),
        successes_fd=sum(r.successes_fd for r in reps),
        replicates=tuple(reps),
    )


REPLICATION_COLUMNS = tuple(ReplicationCounts.__dataclass_fields__)


def write_replications_csv(estimate: SimEstimate, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPLICATION_COLUMNS)
        for r in estimate.replicates:
            writer.writerow([getattr(r, c) for c in REPLICATION_COLUMNS])
