"""Quantitative run summaries and paired-run comparisons.

The headline tracking error averages, per node, the RMS deviation of the
*broadcast* states from the command (the held values are what neighbors
actually act on); the continuous-state variant is exported alongside.
Control effort is the per-sample mean of the summed squared controls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .graph import assemble_system_matrix, spectral_monitor
from .sim import RunArtifacts
from .triggering import min_inter_event_gap


class EmptyTraceError(ValueError):
    pass


class ConfigMismatchError(ValueError):
    pass


def compute_rmse(xs: np.ndarray, c: np.ndarray) -> float:
    """(1/n) * sum_i sqrt((1/M) * sum_k (x_si(k) - c(k))^2)."""
    if xs.ndim != 2 or xs.shape[0] < 1:
        raise EmptyTraceError("need at least one sample")
    dev = xs - c[:, None]
    per_node = np.sqrt(np.mean(dev**2, axis=0))
    return float(np.mean(per_node))


def compute_effort(u: np.ndarray) -> float:
    """(1/M) * sum_k sum_i u_i(k)^2."""
    if u.ndim != 2 or u.shape[0] < 1:
        raise EmptyTraceError("need at least one sample")
    return float(np.mean(np.sum(u**2, axis=1)))


@dataclass(frozen=True)
class StabilityReport:
    """Spectral witnesses sampled along the weight trace."""

    sample_steps: np.ndarray
    max_real_parts: np.ndarray  # max Re eig(-F) per sample
    sup_f_norm: float           # sup over samples of ||F||_2
    fdot_proxy: float           # max finite-difference ||dF/dt||_2 between samples

    @property
    def worst(self) -> float:
        return float(np.max(self.max_real_parts))


def stability_trace(run: RunArtifacts, stride: int = 10) -> StabilityReport:
    """Evaluate the spectral monitor every ``stride`` steps.

    For constant-weight runs the trace is evaluated once and broadcast,
    since F never moves.
    """
    if stride < 1:
        raise ValueError("stride must be >= 1")
    top = run.config.topology
    if not run.record_weights:
        sysm = assemble_system_matrix(top, run.a_tr[0])
        val = spectral_monitor(sysm)
        steps = np.arange(0, run.n_samples, stride)
        norm = float(np.linalg.norm(sysm.F, 2))
        return StabilityReport(
            sample_steps=steps,
            max_real_parts=np.full(len(steps), val),
            sup_f_norm=norm,
            fdot_proxy=0.0,
        )
    steps = np.arange(0, run.n_samples, stride)
    n = top.n
    flags = top.leader_flags()
    a = run.a_tr[steps]
    deg = a.sum(axis=2)
    f = -a.copy()
    idx = np.arange(n)
    # F = (D_row - A) + K * D_row, assembled over the whole sample stack
    f[:, idx, idx] += deg * (1.0 + flags)
    lam = np.linalg.eigvals(-f)
    vals = np.max(lam.real, axis=1)
    norms = np.linalg.svd(f, compute_uv=False)[:, 0]
    fdot = 0.0
    if len(steps) > 1:
        df = np.linalg.svd(np.diff(f, axis=0), compute_uv=False)[:, 0]
        spans = np.diff(steps) * run.config.dt
        fdot = float(np.max(df / spans))
    return StabilityReport(
        sample_steps=steps,
        max_real_parts=vals,
        sup_f_norm=float(np.max(norms)),
        fdot_proxy=fdot,
    )


@dataclass(frozen=True)
class RunMetrics:
    scenario: str
    seed: int
    mode: str
    rmse: float            # broadcast-state variant (headline)
    rmse_state: float      # continuous-state variant
    effort: float
    total_events: int
    per_node_events: tuple[int, ...]
    min_gap_s: float
    peak_control: float
    max_spectral_real_part: float
    sup_f_norm: float
    fdot_proxy: float
    n: int
    dt: float
    horizon: float

    def as_dict(self) -> dict:
        d = asdict(self)
        d["per_node_events"] = list(self.per_node_events)
        return d


def summarize_run(run: RunArtifacts, stability_stride: int = 10,
                  stability: StabilityReport | None = None) -> RunMetrics:
    cfg = run.config
    n = cfg.topology.n
    if stability is None:
        stability = stability_trace(run, stability_stride)
    per_node = tuple(int(run.fired[:, i].sum()) for i in range(n))
    gaps = min_inter_event_gap(run.event_log(), n)
    return RunMetrics(
        scenario=cfg.name,
        seed=cfg.seed,
        mode=cfg.mode,
        rmse=compute_rmse(run.xs, run.c),
        rmse_state=compute_rmse(run.x, run.c),
        effort=compute_effort(run.u),
        total_events=run.total_events(),
        per_node_events=per_node,
        min_gap_s=float(np.min(gaps)),
        peak_control=float(np.max(np.abs(run.u))),
        max_spectral_real_part=stability.worst,
        sup_f_norm=stability.sup_f_norm,
        fdot_proxy=stability.fdot_proxy,
        n=n,
        dt=cfg.dt,
        horizon=cfg.horizon,
    )


@dataclass(frozen=True)
class ComparisonReport:
    """Ratios of a proposed run over a baseline run (same seed/topology)."""

    proposed: str
    baseline: str
    seed: int
    rmse_ratio: float
    effort_ratio: float
    event_ratio: float
    peak_ratio: float
    fewer_events: bool
    lower_effort: bool
    lower_rmse: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _ratio(a: float, b: float) -> float:
    if b == 0:
        return math.inf if a > 0 else 1.0
    return a / b


def compare_runs(proposed: RunMetrics, baseline: RunMetrics) -> ComparisonReport:
    if proposed.seed != baseline.seed:
        raise ConfigMismatchError(
            f"paired runs must share a seed ({proposed.seed} vs {baseline.seed})"
        )
    if (proposed.n, proposed.dt, proposed.horizon) != (
        baseline.n, baseline.dt, baseline.horizon
    ):
        raise ConfigMismatchError("paired runs must share topology size, dt, horizon")
    return ComparisonReport(
        proposed=proposed.scenario,
        baseline=baseline.scenario,
        seed=proposed.seed,
        rmse_ratio=_ratio(proposed.rmse, baseline.rmse),
        effort_ratio=_ratio(proposed.effort, baseline.effort),
        event_ratio=_ratio(proposed.total_events, baseline.total_events),
        peak_ratio=_ratio(proposed.peak_control, baseline.peak_control),
        fewer_events=proposed.total_events <= baseline.total_events,
        lower_effort=proposed.effort <= baseline.effort,
        lower_rmse=proposed.rmse <= baseline.rmse,
    )
