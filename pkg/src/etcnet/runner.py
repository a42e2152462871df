"""Campaign orchestration: seed sweeps, paired comparisons, artifacts.

Output layout, per campaign run::

    <out>/<scenario>/seed<seed>/   state_trace.csv, weight_trace.csv,
                                   events.csv, gap_stats.csv, metrics.json
    <out>/summary.csv              one row per (scenario, seed)
    <out>/comparison_<pairing>.csv per-seed + median ratios
    <out>/tables_report.txt        with --replicate-tables

Per-run failures are recorded in the summary and do not abort siblings.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from . import export
from .config import Campaign
from .metrics import (
    ComparisonReport,
    RunMetrics,
    compare_runs,
    stability_trace,
    summarize_run,
)
from .sim import NumericalDivergenceError, RunArtifacts, run_scenario


@dataclass
class CampaignResult:
    metrics: dict[tuple[str, int], RunMetrics] = field(default_factory=dict)
    failures: dict[tuple[str, int], str] = field(default_factory=dict)
    comparisons: dict[str, list[ComparisonReport]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_campaign(
    campaign: Campaign,
    out_dir: str | Path | None = None,
    stability_stride: int = 10,
    write_traces: bool = True,
    plot_data: bool = False,
    tables_report: bool = False,
    exclusion_clear: str | None = None,
) -> CampaignResult:
    """Execute every (scenario, seed) run and write all artifacts."""
    out = Path(out_dir if out_dir is not None else campaign.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = CampaignResult()
    summary_rows: list[str] = []

    for scenario in campaign.scenarios:
        if exclusion_clear is not None:
            scenario = dataclasses.replace(scenario, exclusion_clear=exclusion_clear)
        for seed in campaign.seeds:
            cfg = scenario.with_seed(seed)
            run_dir = out / scenario.name / f"seed{seed}"
            try:
                run = run_scenario(cfg)
                stab = stability_trace(run, stability_stride)
                m = summarize_run(run, stability=stab)
            except NumericalDivergenceError as exc:
                result.failures[(scenario.name, seed)] = str(exc)
                summary_rows.append(
                    export.failed_row(scenario.name, seed, cfg.mode, "diverged")
                )
                continue
            result.metrics[(scenario.name, seed)] = m
            summary_rows.append(export.summary_row(m))
            _write_run_artifacts(run, m, run_dir, write_traces, plot_data)

    export.write_summary(summary_rows, out / "summary.csv")

    for pairing in campaign.pairings:
        reports = []
        for seed in campaign.seeds:
            a = result.metrics.get((pairing.proposed, seed))
            b = result.metrics.get((pairing.baseline, seed))
            if a is None or b is None:
                continue
            reports.append(compare_runs(a, b))
        if reports:
            result.comparisons[pairing.name] = reports
            export.write_comparison(
                pairing.name, reports, out / f"comparison_{pairing.name}.csv"
            )

    if tables_report:
        export.write_tables_report(
            campaign.name, scenario_medians(campaign, result), out / "tables_report.txt"
        )
    return result


def _write_run_artifacts(
    run: RunArtifacts,
    metrics: RunMetrics,
    run_dir: Path,
    write_traces: bool,
    plot_data: bool,
) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    export.write_metrics_json(metrics, run_dir / "metrics.json")
    if write_traces:
        export.write_state_trace(run, run_dir / "state_trace.csv")
        export.write_weight_trace(run, run_dir / "weight_trace.csv")
        export.write_events(run, run_dir / "events.csv")
        export.write_gap_stats(run, run_dir / "gap_stats.csv")
    if plot_data:
        export.write_plot_data(run, run_dir)


def scenario_medians(
    campaign: Campaign, result: CampaignResult
) -> dict[str, dict[str, float]]:
    """Median rmse/effort/event metrics per scenario across seeds."""
    import numpy as np

    med: dict[str, dict[str, float]] = {}
    for scenario in campaign.scenarios:
        vals = [
            result.metrics[(scenario.name, seed)]
            for seed in campaign.seeds
            if (scenario.name, seed) in result.metrics
        ]
        if not vals:
            continue
        med[scenario.name] = {
            "rmse": float(np.median([m.rmse for m in vals])),
            "effort": float(np.median([m.effort for m in vals])),
            "total_events": float(np.median([m.total_events for m in vals])),
            "peak_control": float(np.median([m.peak_control for m in vals])),
        }
    return med
