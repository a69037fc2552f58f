"""Compare intersections of spam-filter regexes.

Each query builds one automaton holding every regex involved and compares
two conjunctions of initial states.  A primed index adds an isomorphic copy
of that regex, so ``1&2 = 1&2&2'`` always holds but still has to be proved.

    python demos/regex_filters.py [--engine bisim|reverse-sfa|sfa-eq]
"""

import argparse
from pathlib import Path

from symafa.runner import ENGINES, run_regex_file

HERE = Path(__file__).parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--engine", choices=ENGINES, default="bisim")
    args = ap.parse_args()
    path = HERE / "inputs" / "filters.txt"
    print(path.read_text(encoding="utf-8"))
    for rec in run_regex_file(path, engine=args.engine):
        line = f"{rec.inputs['query']:<18} {rec.verdict or 'timeout':<12} explored={rec.stats.get('explored')}"
        if rec.counterexample is not None:
            line += f'  e.g. "{rec.counterexample_text}"'
        print(line)


if __name__ == "__main__":
    main()
