"""Run every experiment with its default config into runs/<name>/.

A smoke tour of the whole surface; each run prints its one-line summary.
GRAPE dominates the wall time, pass --skip-grape to leave it out.
"""

import sys

from nmrqip.cli import EXPERIMENTS, run_experiment


def main(argv):
    names = sorted(EXPERIMENTS)
    if "--skip-grape" in argv:
        names.remove("grape")
    failures = []
    for name in names:
        code = run_experiment(name, seed=0)
        if code != 0:
            failures.append((name, code))
    if failures:
        print("nonzero exits:", failures, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
