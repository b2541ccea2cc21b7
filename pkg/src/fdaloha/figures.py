"""Curve generation behind the command line: figure data sets and generic sweeps.

Every generator returns a :class:`CurveData`, a set of equal-length named
columns plus a metadata dictionary echoing all inputs.  ``CurveData.write``
emits CSV preceded by ``#``-prefixed JSON lines; no timestamps or host data
are recorded, so equal inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from . import __version__
from .analytic import (
    chi_gain,
    delta,
    eta_min,
    omega_set,
    optimal_duration,
    optimal_q,
    success_prob_fd,
    success_prob_hd,
    throughput,
)
from .hetero import gamma_star, optimize_duration_pair, throughput_hetero
from .model import DurationConfig, ParameterError, SystemParams, beta_coeff
from .montecarlo import SimConfig, estimate_throughput
from .quadrature import QuadConfig
from .slotted import throughput_slotted, xi_ratio

SWEEP_VARIABLES = ("D", "q", "G", "r", "gamma", "theta", "alpha", "eta")
FIGURES = tuple(range(2, 12))


@dataclass
class CurveData:
    columns: dict[str, list]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have unequal lengths {sorted(lengths)}")

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()), []))

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in json.dumps(self.metadata, sort_keys=True, indent=1).splitlines():
            buf.write("# " + line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        writer.writerow(names)
        for row in zip(*(self.columns[n] for n in names)):
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()

    def write(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "CurveData":
        meta_lines, body = [], []
        for line in text.splitlines():
            (meta_lines if line.startswith("# ") else body).append(line)
        metadata = json.loads("\n".join(l[2:] for l in meta_lines)) if meta_lines else {}
        rows = list(csv.reader(body))
        names, data = rows[0], rows[1:]
        columns = {n: [_parse(r[i]) for r in data] for i, n in enumerate(names)}
        return cls(columns, metadata)


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _parse(s: str):
    try:
        return int(s)
    except ValueError:
        try:
            return float(s)
        except ValueError:
            return s


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    steps: int
    scale: Literal["linear", "log"] = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ParameterError(f"unknown sweep variable {self.variable!r}; choose from {SWEEP_VARIABLES}")
        if not self.lo < self.hi:
            raise ParameterError("sweep needs lo < hi")
        if self.steps < 2:
            raise ParameterError("sweep needs at least 2 steps")
        if self.scale not in ("linear", "log"):
            raise ParameterError(f"unknown scale {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise ParameterError("log sweep needs lo > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.steps)
        return np.linspace(self.lo, self.hi, self.steps)


@dataclass(frozen=True)
class Operating:
    """A single evaluation point: physical parameters plus the traffic knobs."""

    params: SystemParams = SystemParams()
    q: float = 0.0
    d: float = 1.0
    gamma: float = 1.0
    load: float = 0.05

    def with_value(self, variable: str, value: float) -> "Operating":
        value = float(value)
        if variable in ("r", "theta", "alpha", "eta"):
            return Operating(self.params.replace(**{variable: value}), self.q, self.d, self.gamma, self.load)
        key = {"D": "d", "G": "load"}.get(variable, variable)
        data = asdict(self)
        data["params"] = self.params
        data[key] = value
        return Operating(**data)

    def echo(self) -> dict:
        return {"params": self.params.to_dict(), "q": self.q, "d": self.d, "gamma": self.gamma, "load": self.load}


MetricFn = Callable[[Operating, QuadConfig], float]

METRICS: dict[str, MetricFn] = {
    "throughput": lambda o, c: throughput(o.params, o.q, o.d, c),
    "success_hd": lambda o, c: success_prob_hd(o.params, o.q, o.d, c),
    "success_fd": lambda o, c: success_prob_fd(o.params, o.q, o.d, c),
    "q_star": lambda o, c: optimal_q(o.params, o.d, c).q_star,
    "d_star": lambda o, c: optimal_duration(o.params, o.q, c)[0],
    "t_star": lambda o, c: optimal_duration(o.params, o.q, c)[1],
    "delta": lambda o, c: delta(o.params.theta, o.params.alpha, c),
    "omega_fd": lambda o, c: omega_set(o.params, c).omega_fd,
    "chi_gain": lambda o, c: chi_gain(o.params, c),
    "beta": lambda o, c: beta_coeff(o.params),
    "eta_min": lambda o, c: eta_min(o.params.r, o.params.theta, o.params.alpha),
    "throughput_hetero": lambda o, c: throughput_hetero(o.params, o.q, DurationConfig(o.d, o.gamma), c),
    "gamma_star": lambda o, c: gamma_star(o.params, o.q, o.d, c),
    "throughput_opt_hetero": lambda o, c: optimize_duration_pair(o.params, o.q, o.load, c).throughput,
    "throughput_slotted": lambda o, c: throughput_slotted(o.params, o.q, o.load, c),
    "xi": lambda o, c: xi_ratio(o.params, o.q, o.load, "homogeneous", c),
    "xi_opt": lambda o, c: xi_ratio(o.params, o.q, o.load, "optimized_hetero", c),
}


def _meta(kind: str, cfg: QuadConfig, **extra) -> dict:
    meta = {"tool": "fdaloha", "version": __version__, "kind": kind, "quadrature": asdict(cfg)}
    meta.update(extra)
    return meta


def sweep(spec: SweepSpec, metrics: Sequence[str], base: Operating, cfg: QuadConfig = QuadConfig()) -> CurveData:
    unknown = [m for m in metrics if m not in METRICS]
    if unknown:
        raise ParameterError(f"unknown metric(s) {unknown}; choose from {sorted(METRICS)}")
    xs = spec.values()
    cols: dict[str, list] = {spec.variable: [float(x) for x in xs]}
    for m in metrics:
        cols[m] = [METRICS[m](base.with_value(spec.variable, x), cfg) for x in xs]
    return CurveData(cols, _meta("sweep", cfg, sweep=asdict(spec), metrics=list(metrics), base=base.echo()))


# Figure grids.  Each returns CurveData; the figure number is recorded in metadata.

FIG5_ETAS = (1.0, 0.95, 0.9, 0.8, 0.7)
FIG6_THETAS = (0.5, 1.0, 2.0, 4.0, 8.0)
FIG7_ETAS = (1.0, 0.999, 0.99, 0.95)
FIG8_QS = (0.25, 0.5, 0.75)
FIG9_DHD = (0.5, 1.0, 2.0, 4.0, 8.0)
FIG11_LOADS = (0.05, 0.2, 0.35)
SIM_DURATIONS = (0.5, 1.0, 2.0, 4.0, 8.0)
SIM_QS = (0.0, 0.5, 1.0)


def fig2(base: Operating, cfg: QuadConfig) -> CurveData:
    thetas, alphas = np.geomspace(0.25, 16.0, 9), np.linspace(2.5, 6.0, 15)
    cols = {"theta": [], "alpha": [], "delta": []}
    for th in thetas:
        for a in alphas:
            cols["theta"].append(float(th))
            cols["alpha"].append(float(a))
            cols["delta"].append(delta(float(th), float(a), cfg))
    return CurveData(cols)


def fig3(base: Operating, cfg: QuadConfig, sim: SimConfig | None = None) -> CurveData:
    if sim is not None:
        return validation_grid(base, cfg, sim, SIM_QS, SIM_DURATIONS)
    ds = np.geomspace(0.1, 50.0, 121)
    cols: dict[str, list] = {"d": [float(d) for d in ds]}
    for q in SIM_QS:
        cols[f"throughput_q{q:g}"] = [throughput(base.params, q, float(d), cfg) for d in ds]
    return CurveData(cols)


def _q_star_curves(base: Operating, cfg: QuadConfig, etas) -> CurveData:
    ds = np.geomspace(0.05, 20.0, 161)
    cols: dict[str, list] = {"d": [float(d) for d in ds]}
    for eta in etas:
        p = base.params.replace(eta=eta)
        cols[f"q_star_eta{eta:g}"] = [optimal_q(p, float(d), cfg).q_star for d in ds]
    return CurveData(cols)


def fig4(base: Operating, cfg: QuadConfig) -> CurveData:
    return _q_star_curves(base, cfg, (1.0,))


def fig5(base: Operating, cfg: QuadConfig) -> CurveData:
    return _q_star_curves(base, cfg, FIG5_ETAS)


def fig6(base: Operating, cfg: QuadConfig) -> CurveData:
    alphas = np.linspace(2.5, 6.0, 36)
    cols: dict[str, list] = {"alpha": [float(a) for a in alphas]}
    p = base.params.replace(eta=1.0)
    for th in FIG6_THETAS:
        cols[f"chi_theta{th:g}"] = [chi_gain(p.replace(theta=th, alpha=float(a)), cfg) for a in alphas]
    return CurveData(cols)


def fig7(base: Operating, cfg: QuadConfig) -> CurveData:
    rs = np.linspace(1.0, 3.0, 41)
    cols: dict[str, list] = {"r": [float(r) for r in rs]}
    for eta in FIG7_ETAS:
        cols[f"chi_eta{eta:g}"] = [chi_gain(base.params.replace(eta=eta, r=float(r)), cfg) for r in rs]
    return CurveData(cols)


def fig8(base: Operating, cfg: QuadConfig) -> CurveData:
    lam = base.params.lambda_
    norm = np.geomspace(0.1, 20.0, 31)
    cols: dict[str, list] = {"g_over_lambda": [float(x) for x in norm]}
    for q in FIG8_QS:
        hom, opt, gam = [], [], []
        for x in norm:
            g = float(x) * lam
            hom.append(throughput(base.params, q, g / lam, cfg))
            best = optimize_duration_pair(base.params, q, g, cfg)
            opt.append(best.throughput)
            gam.append(best.gamma)
        cols[f"homogeneous_q{q:g}"] = hom
        cols[f"optimized_q{q:g}"] = opt
        cols[f"gamma_q{q:g}"] = gam
    return CurveData(cols)


def fig9(base: Operating, cfg: QuadConfig) -> CurveData:
    qs = np.linspace(0.0, 1.0, 21)
    cols: dict[str, list] = {"q": [float(q) for q in qs]}
    for d in FIG9_DHD:
        cols[f"gamma_star_d{d:g}"] = [gamma_star(base.params, float(q), d, cfg) for q in qs]
    return CurveData(cols)


def fig10(base: Operating, cfg: QuadConfig) -> CurveData:
    qs, gs = np.linspace(0.0, 1.0, 11), np.linspace(0.01, 0.5, 50)
    cols = {"q": [], "load": [], "xi": []}
    for q in qs:
        for g in gs:
            cols["q"].append(float(q))
            cols["load"].append(float(g))
            cols["xi"].append(xi_ratio(base.params, float(q), float(g), "homogeneous", cfg))
    return CurveData(cols)


def fig11(base: Operating, cfg: QuadConfig) -> CurveData:
    qs = np.linspace(0.0, 1.0, 21)
    cols: dict[str, list] = {"q": [float(q) for q in qs]}
    for g in FIG11_LOADS:
        cols[f"xi_load{g:g}"] = [xi_ratio(base.params, float(q), g, "homogeneous", cfg) for q in qs]
        cols[f"xi_opt_load{g:g}"] = [xi_ratio(base.params, float(q), g, "optimized_hetero", cfg) for q in qs]
    return CurveData(cols)


FIGURE_BUILDERS = {2: fig2, 3: fig3, 4: fig4, 5: fig5, 6: fig6, 7: fig7, 8: fig8, 9: fig9, 10: fig10, 11: fig11}


def figure(fig_id: int, base: Operating = Operating(), cfg: QuadConfig = QuadConfig(), sim: SimConfig | None = None):
    if fig_id not in FIGURE_BUILDERS:
        raise ParameterError(f"unsupported figure {fig_id}; choose from {FIGURES}")
    build = FIGURE_BUILDERS[fig_id]
    data = build(base, cfg, sim) if fig_id == 3 else build(base, cfg)
    extra = {"figure": fig_id, "base": base.echo()}
    if fig_id == 3 and sim is not None:
        extra["simulation"] = asdict(sim)
    data.metadata = {**_meta("figure", cfg, **extra), **data.metadata}
    return data


def validation_grid(
    base: Operating,
    cfg: QuadConfig,
    sim: SimConfig,
    qs: Sequence[float],
    ds: Sequence[float],
    analytic_params: SystemParams | None = None,
) -> CurveData:
    """Simulated against analytic throughput on a ``q x D`` grid, with z-scores.

    ``analytic_params`` lets the analytic side use different parameters than
    the simulator, which is how a deliberately wrong model is fed in to check
    that the comparison catches it.
    """
    ap = analytic_params or base.params
    cols = {k: [] for k in ("q", "d", "gamma", "analytic", "sim_mean", "sim_stderr", "z", "low_power")}
    for q in qs:
        for d in ds:
            dur = DurationConfig(float(d), base.gamma)
            est = estimate_throughput(base.params, float(q), dur, sim)
            if base.gamma == 1.0:
                ref = throughput(ap, float(q), float(d), cfg)
            else:
                ref = throughput_hetero(ap, float(q), dur, cfg)
            se = est.throughput_stderr
            z = (est.throughput_mean - ref) / se if se > 0 else math.nan
            for k, v in zip(cols, (float(q), float(d), base.gamma, ref, est.throughput_mean, se, z, sim.replications < 2)):
                cols[k].append(v)
    return CurveData(cols, _meta("validate", cfg, simulation=asdict(sim), base=base.echo(), analytic_params=ap.to_dict()))


def delta_table(thetas: Sequence[float], alphas: Sequence[float], cfg: QuadConfig = QuadConfig()) -> CurveData:
    cols = {k: [] for k in ("theta", "alpha", "omega_hd", "omega_fd", "delta", "delta_abs_error")}
    for th in thetas:
        for a in alphas:
            om = omega_set(SystemParams(theta=float(th), alpha=float(a)), cfg)
            for k, v in zip(cols, (float(th), float(a), om.omega_hd, om.omega_fd, om.delta, om.fd_error_estimate / om.omega_hd)):
                cols[k].append(v)
    return CurveData(cols, _meta("tables", cfg))
