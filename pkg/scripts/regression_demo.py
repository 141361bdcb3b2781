#!/usr/bin/env python3
"""Linear-regression experiment: pSGLD with a learned noise scale.

Runs the ``regression`` preset (4 weights + log-sigma), then scores the chain
against the full-batch random-walk Metropolis oracle on the same dataset.
The compare report is the scatter-vs-contour check in numeric form.
"""

import argparse
import sys

from sgmc.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="runs/regression")
    parser.add_argument("--chains", type=int, default=2)
    parser.add_argument("--oracle-steps", type=int, default=200000)
    args = parser.parse_args()

    code = cli_main(["run", "--demo", "regression", "--output", args.output,
                     "--chains", str(args.chains)])
    if code != 0:
        return code
    return cli_main(["compare", "--run", args.output, "--reference", "rwmh",
                     "--oracle-steps", str(args.oracle_steps)])


if __name__ == "__main__":
    sys.exit(main())
