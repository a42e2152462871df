#!/usr/bin/env python3
"""Check that the compiled and reference simulation engines agree.

Runs one scenario from a campaign config through both engines and
reports the maximum absolute difference per trace (all must be exactly
zero).

Usage::

    python3 scripts/compare_engines.py configs/example1.cfg petc_low \
        [--seed 0] [--horizon 2.0]
"""

import argparse
import dataclasses
import sys

import numpy as np

from etcnet.config import parse_config
from etcnet.sim import run_scenario


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("scenario")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--horizon", type=float, default=2.0,
                        help="shortened horizon in seconds (default 2.0)")
    args = parser.parse_args()

    campaign = parse_config(args.config)
    cfg = dataclasses.replace(
        campaign.scenario(args.scenario), seed=args.seed, horizon=args.horizon
    )
    fast = run_scenario(cfg, engine="fast")
    ref = run_scenario(cfg, engine="reference")

    clean = True
    for label in ("x", "xs", "u", "fired", "a_tr", "theta_tr", "gamma_tr"):
        a, b = getattr(fast, label), getattr(ref, label)
        diff = float(np.max(np.abs(a.astype(float) - b.astype(float))))
        flag = "ok" if diff == 0.0 else "MISMATCH"
        print(f"{label:10s} max |fast - reference| = {diff:.3e}  {flag}")
        clean = clean and diff == 0.0
    print("engines agree bit for bit" if clean else "engines disagree")
    return 0 if clean else 1


if __name__ == "__main__":
    sys.exit(main())
