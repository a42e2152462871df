"""CSV/JSON artifact writers.

All CSVs are comma-separated, UTF-8, LF line endings, with a header row.
Floats are serialized with 17 significant digits so round-trips are
bit-stable and reruns diff clean.  Node indices are 1-based in every
exported file, matching the config format.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from .metrics import ComparisonReport, RunMetrics
from .sim import RunArtifacts
from .triggering import gap_stats


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _write(path: Path, header: str, lines: Iterable[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for line in lines:
            fh.write(line + "\n")


def write_state_trace(run: RunArtifacts, path: str | Path) -> None:
    """Long-format per-node state trace: (time_s, node_id, x, x_s, u, e)."""
    e = run.errors
    lines = (
        f"{fmt(run.times[k])},{i + 1},{fmt(run.x[k, i])},{fmt(run.xs[k, i])},"
        f"{fmt(run.u[k, i])},{fmt(e[k, i])}"
        for k in range(run.n_samples)
        for i in range(run.config.topology.n)
    )
    _write(Path(path), "time_s,node_id,x,x_s,u,e", lines)


def write_weight_trace(run: RunArtifacts, path: str | Path) -> None:
    """Per-step directed edge weight trace.

    For constant-weight runs only the initial frame exists and a single
    row per directed pair is written.
    """
    pairs = [
        (i, j)
        for i, j in np.argwhere(run.config.topology.edge_mask())
    ]
    frames = range(run.n_samples) if run.record_weights else [0]
    lines = (
        f"{fmt(k * run.config.dt)},{i + 1},{j + 1},{fmt(run.a_tr[k, i, j])},"
        f"{fmt(run.theta_tr[k, i, j])},{fmt(run.gamma_tr[k, i, j])},"
        f"{int(run.excl_tr[k, i, j])}"
        for k in frames
        for i, j in pairs
    )
    _write(Path(path), "time_s,i,j,a_ij,theta_ij,gamma_ij,excluded", lines)


def write_events(run: RunArtifacts, path: str | Path) -> None:
    times, nodes = run.event_arrays()
    lines = (f"{fmt(t)},{i + 1}" for t, i in zip(times, nodes))
    _write(Path(path), "time_s,node_id", lines)


def write_gap_stats(run: RunArtifacts, path: str | Path) -> None:
    rows = gap_stats(run.event_log(), run.config.topology.n)
    lines = (
        f"{i + 1},{count},{fmt(mn)},{fmt(mean)}" for i, count, mn, mean in rows
    )
    _write(Path(path), "node_id,events,min_gap_s,mean_gap_s", lines)


def write_metrics_json(metrics: RunMetrics, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(metrics.as_dict(), indent=2, sort_keys=True) + "\n")


SUMMARY_COLUMNS = (
    "scenario,seed,mode,rmse,rmse_state,effort,total_events,min_gap_s,"
    "peak_control,max_spectral_real_part,status"
)


def summary_row(m: RunMetrics, status: str = "ok") -> str:
    return (
        f"{m.scenario},{m.seed},{m.mode},{fmt(m.rmse)},{fmt(m.rmse_state)},"
        f"{fmt(m.effort)},{m.total_events},{fmt(m.min_gap_s)},"
        f"{fmt(m.peak_control)},{fmt(m.max_spectral_real_part)},{status}"
    )


def failed_row(scenario: str, seed: int, mode: str, reason: str) -> str:
    nan = "nan"
    return f"{scenario},{seed},{mode},{nan},{nan},{nan},0,{nan},{nan},{nan},{reason}"


def write_summary(rows: list[str], path: str | Path) -> None:
    _write(Path(path), SUMMARY_COLUMNS, rows)


def write_comparison(
    pairing_name: str,
    per_seed: list[ComparisonReport],
    path: str | Path,
) -> None:
    """Per-seed ratios plus the median row used by the trend assertions."""
    header = "pairing,seed,rmse_ratio,effort_ratio,event_ratio,peak_ratio"
    lines = [
        f"{pairing_name},{r.seed},{fmt(r.rmse_ratio)},{fmt(r.effort_ratio)},"
        f"{fmt(r.event_ratio)},{fmt(r.peak_ratio)}"
        for r in per_seed
    ]
    med = comparison_medians(per_seed)
    lines.append(
        f"{pairing_name},median,{fmt(med['rmse_ratio'])},{fmt(med['effort_ratio'])},"
        f"{fmt(med['event_ratio'])},{fmt(med['peak_ratio'])}"
    )
    _write(Path(path), header, lines)


def comparison_medians(per_seed: list[ComparisonReport]) -> dict[str, float]:
    return {
        key: float(np.median([getattr(r, key) for r in per_seed]))
        for key in ("rmse_ratio", "effort_ratio", "event_ratio", "peak_ratio")
    }


def write_tables_report(
    campaign_name: str,
    medians: dict[str, dict[str, float]],
    path: str | Path,
) -> None:
    """Plain-text comparison table: one column per scenario, rows for the
    median RMSE, control effort, and total event count across seeds."""
    names = list(medians)
    width = max(14, *(len(n) + 2 for n in names))
    header = f"{campaign_name}: median metrics over seeds"
    sep = "-" * (14 + width * len(names))
    rows = [header, sep, "".ljust(14) + "".join(n.rjust(width) for n in names)]
    for label, key in (("RMSE", "rmse"), ("E", "effort"), ("Total Events", "total_events")):
        cells = []
        for n in names:
            v = medians[n][key]
            cells.append((f"{v:.4f}" if key != "total_events" else f"{v:.0f}").rjust(width))
        rows.append(label.ljust(14) + "".join(cells))
    rows.append(sep)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(rows) + "\n")


def write_plot_data(run: RunArtifacts, out_dir: str | Path) -> None:
    """Tidy (time_s, series_id, value) CSVs for external plotting."""
    out = Path(out_dir)
    n = run.config.topology.n
    _write(
        out / "plot_states.csv",
        "time_s,series_id,value",
        (
            f"{fmt(run.times[k])},x{i + 1},{fmt(run.x[k, i])}"
            for k in range(run.n_samples)
            for i in range(n)
        ),
    )
    _write(
        out / "plot_controls.csv",
        "time_s,series_id,value",
        (
            f"{fmt(run.times[k])},u{i + 1},{fmt(run.u[k, i])}"
            for k in range(run.n_samples)
            for i in range(n)
        ),
    )
    times, nodes = run.event_arrays()
    _write(
        out / "plot_events.csv",
        "time_s,series_id,value",
        (f"{fmt(t)},node{i + 1},1" for t, i in zip(times, nodes)),
    )
    pairs = [(i, j) for i, j in np.argwhere(run.config.topology.edge_mask())]
    frames = range(run.n_samples) if run.record_weights else [0]
    _write(
        out / "plot_weights.csv",
        "time_s,series_id,value",
        (
            f"{fmt(k * run.config.dt)},a_{i + 1}_{j + 1},{fmt(run.a_tr[k, i, j])}"
            for k in frames
            for i, j in pairs
        ),
    )
