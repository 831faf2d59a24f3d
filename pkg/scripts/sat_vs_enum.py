"""Time the symbolic and enumerative validity engines on the axiom instances.

Both engines must agree; the table shows where each one is faster.

    python3 scripts/sat_vs_enum.py --size 2 --max-teams 70000
"""

from __future__ import annotations

import argparse
import time

from sheaflogic.satcheck import valid_sat
from sheaflogic.schemas import SCHEMAS, instances
from sheaflogic.signature import uniform
from sheaflogic.teams import ResourceExceeded, count_teams, strip_universal_prefix, valid


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=2)
    ap.add_argument("--max-length", type=int, default=1)
    ap.add_argument("--max-teams", type=int, default=2 ** 16, help="skip enumeration above this many base teams")
    args = ap.parse_args()

    sig = uniform({"A": args.size})
    print(f"{'instance':60} {'teams':>7} {'sat s':>8} {'enum s':>8}")
    for sid in SCHEMAS:
        for ins in instances(sid, tuple(range(args.max_length + 1))):
            ctx, _ = strip_universal_prefix(ins.formula)
            n = count_teams(ctx, sig)
            t0 = time.perf_counter()
            sat = valid_sat(ins.formula, sig).valid
            t_sat = time.perf_counter() - t0
            t_enum = float("nan")
            if n <= args.max_teams:
                t0 = time.perf_counter()
                try:
                    enum = valid(ins.formula, sig, engine="enumerate", cap=args.max_teams).valid
                    t_enum = time.perf_counter() - t0
                    if enum != sat:
                        print("DISAGREE", sid, ins.label)
                except ResourceExceeded:
                    pass
            print(f"{sid + '[' + ins.label + ']':60} {n:>7} {t_sat:>8.3f} {t_enum:>8.3f}")


if __name__ == "__main__":
    main()
