"""Compare the team evaluator with the forcing oracle over several seeds and witness bounds.

    python3 scripts/oracle_diff.py --seeds 0 1 2 --size 500
"""

from __future__ import annotations

import argparse

from sheaflogic import suites
from sheaflogic.corpus import CorpusConfig


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--size", type=int, default=500)
    ap.add_argument("--max-sample", type=int, default=3)
    ap.add_argument("--literal", action="store_true", help="also run the literal enumeration at 1x and 2x bounds")
    args = ap.parse_args()

    runs = [("canonical", 1)]
    if args.literal:
        runs += [("literal", 1), ("literal", 2)]
    for seed in args.seeds:
        for mode, factor in runs:
            sample = args.max_sample if mode == "canonical" else min(args.max_sample, 2)
            cfg = CorpusConfig(size=args.size, seed=seed, max_sample=sample, mode=mode, bound_factor=factor)
            r, divergences = suites.oracle_diff(cfg, mode, factor)
            print(f"{r.status:>6}  {r.name:48} {r.checked:>5} pairs {len(divergences):>3} divergences {r.seconds:>7.2f}s")
            for d in divergences[:3]:
                print("   ", d.entry["formula"], "team", d.team_value, "oracle", d.oracle_value)


if __name__ == "__main__":
    main()
