"""Print the N-term l_infinity witness norms next to the matching T_1 sums.

    python3 scripts/growth_table.py --d 3 --theta 1/2 --max-n 8
"""
import argparse

from ellentuck.codec import parse_rational
from ellentuck.harness import growth_table, growth_text
from ellentuck.space import T_A, T_K, Params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--theta", default="1/2")
    ap.add_argument("--max-n", type=int, default=8)
    args = ap.parse_args()
    for variant in (T_K, T_A):
        params = Params(args.k, args.d, parse_rational(args.theta), variant)
        print(f"{variant}: k={params.k} d={params.d} theta={params.theta}")
        print(growth_text(growth_table(params, range(1, args.max_n + 1))))
        print()


if __name__ == "__main__":
    main()
