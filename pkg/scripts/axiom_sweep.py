"""Run every axiom schema in both models and print a table of verdicts.

    python3 scripts/axiom_sweep.py --sizes 2 3 --worlds 3 --jobs 1
"""

from __future__ import annotations

import argparse
import collections

from sheaflogic import suites


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--worlds", type=int, default=3)
    ap.add_argument("--max-length", type=int, default=2)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    lengths = tuple(range(args.max_length + 1))
    tasks = suites.axiom_tasks("multiteam", args.sizes, lengths) + suites.axiom_tasks("schanuel", lengths=lengths, worlds=args.worlds)
    results = suites.run_tasks(tasks, args.jobs)
    results.append(suites.negative_control(2))

    table: dict[str, collections.Counter] = collections.defaultdict(collections.Counter)
    seconds: dict[str, float] = collections.defaultdict(float)
    for r in results:
        key = r.name.split("[")[0].split("@")[0]
        table[key][r.status] += 1
        seconds[key] += r.seconds
    print(f"{'schema':40} {'pass':>6} {'fail':>6} {'capped':>7} {'seconds':>8}")
    for key in sorted(table):
        c = table[key]
        print(f"{key:40} {c['pass']:>6} {c['fail']:>6} {c['resource-exceeded']:>7} {seconds[key]:>8.2f}")
    for r in results:
        if not r.passed:
            print("FAILED", r.name, r.counterexample)


if __name__ == "__main__":
    main()
