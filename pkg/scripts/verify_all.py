#!/usr/bin/env python3
"""Run every verification suite at a meaningful sample size and write the
JSON reports under results/.

Usage: python scripts/verify_all.py [--seed SEED] [--out-dir DIR]
"""

import argparse
import pathlib
import sys

from hardylab import COMMANDS, HarnessConfig, write_json_report


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20260809)
    parser.add_argument("--out-dir", type=str, default="results")
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    runs = {
        "identities": HarnessConfig(n_points=16, depth=3, max_degree=5,
                                    samples=1000, seed=args.seed),
        "lemmas": HarnessConfig(n_points=16, depth=1, max_degree=7,
                                samples=100_000, seed=args.seed),
        "theorem": HarnessConfig(n_points=8, depth=3, max_degree=3,
                                 samples=1000, seed=args.seed),
    }

    exit_code = 0
    for name, config in runs.items():
        report = COMMANDS[name](config)
        path = out_dir / f"{name}.json"
        write_json_report(report, str(path))
        agg = report.aggregates
        print(
            f"{name}: violations={agg['violation_count']} "
            f"runtime={agg['runtime_seconds']:.2f}s -> {path}"
        )
        if agg["violation_count"]:
            exit_code = 1
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
