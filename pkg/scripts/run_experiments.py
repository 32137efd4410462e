#!/usr/bin/env python3
"""Produce all four experiment tables in one go.

Runs the solution design, the outage table, and the three capacity sweeps
with the reference configuration (or a supplied config file), writing CSVs
under the chosen output directory.  ``--quick`` shrinks the sample counts
about a hundredfold for a fast smoke run.
"""

import argparse
import sys
import time

from rislink.cli import main as rislink_main


def run(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="TOML config file")
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--quick", action="store_true", help="small sample counts")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    common = ["--out", args.out, "--workers", str(args.workers)]
    if args.config:
        common += ["--config", args.config]

    jobs = [("design", [])]
    if args.quick:
        jobs += [
            ("outage", ["--samples", "10000"]),
            ("capacity-vs-n", ["--samples", "2000"]),
            ("capacity-vs-mu", ["--samples", "2000"]),
            ("capacity-vs-theta", ["--samples", "2000"]),
            ("validate", ["--samples", "20000"]),
        ]
    else:
        jobs += [
            ("outage", []),
            ("capacity-vs-n", []),
            ("capacity-vs-mu", []),
            ("capacity-vs-theta", []),
            ("validate", []),
        ]

    for command, extra in jobs:
        started = time.time()
        code = rislink_main(common + extra + [command])
        print(f"[{command}] exit {code} in {time.time() - started:.1f}s")
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
