"""List the first vertices and sequences of the well-order with their ranks."""
import argparse

from ellentuck.combinatorics import unrank_seq, unrank_vertex


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--count", type=int, default=12)
    args = ap.parse_args()
    for k in args.k:
        verts = ", ".join(str(unrank_vertex(n, k)) for n in range(1, args.count + 1))
        seqs = ", ".join(str(unrank_seq(n, k)) for n in range(1, args.count + 1))
        print(f"k={k} vertices: {verts}")
        print(f"k={k} sequences: {seqs}")


if __name__ == "__main__":
    main()
