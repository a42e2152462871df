"""Command-line entry point.

    etcnet run configs/example1.cfg --seeds 0:20 --out runs/example1

Exit codes: 0 all runs passed, 1 at least one run failed, 2 bad config.
The default output directory can be set with the ETCNET_OUT env var.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import Campaign, ParseError, parse_config, parse_seed_list
from .runner import run_campaign
from .sim import ConfigError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etcnet",
        description="Event-triggered consensus simulator with adaptive edge weights",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="execute a campaign config")
    run.add_argument("config", help="campaign file (.cfg/.ini or .json)")
    run.add_argument("--seeds", help="override seed list, e.g. 0:20 or 0,1,2")
    run.add_argument(
        "--out",
        default=os.environ.get("ETCNET_OUT"),
        help="output directory (default: config value, or $ETCNET_OUT)",
    )
    run.add_argument(
        "--replicate-tables",
        action="store_true",
        help="emit a comparison-table report of median RMSE/E/events",
    )
    run.add_argument("--stability-stride", type=int, default=10)
    run.add_argument(
        "--exclusion-clear",
        choices=["phase-end", "eq3"],
        help="override the exclusion-flag clearing rule for all scenarios",
    )
    run.add_argument(
        "--plot-data", action="store_true", help="also write tidy plot CSVs"
    )
    run.add_argument(
        "--traces",
        choices=["full", "none"],
        default="full",
        help="write per-run trace CSVs (default full)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        campaign = parse_config(args.config)
        if args.seeds:
            campaign = dataclasses.replace(campaign, seeds=parse_seed_list(args.seeds))
            if not campaign.seeds:
                raise ParseError("empty --seeds list")
    except (ParseError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    result = run_campaign(
        campaign,
        out_dir=args.out,
        stability_stride=args.stability_stride,
        write_traces=args.traces == "full",
        plot_data=args.plot_data,
        tables_report=args.replicate_tables,
        exclusion_clear=args.exclusion_clear,
    )
    n_runs = len(campaign.scenarios) * len(campaign.seeds)
    print(f"{campaign.name}: {len(result.metrics)}/{n_runs} runs ok")
    for (scenario, seed), reason in sorted(result.failures.items()):
        print(f"  FAILED {scenario} seed={seed}: {reason}", file=sys.stderr)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
