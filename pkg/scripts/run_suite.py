"""Run the inequality suite over seeds and summarise the observed constants.

    python3 scripts/run_suite.py --seeds 0 1 2 --workers 4
"""
import argparse
import sys
from collections import Counter
from fractions import Fraction

from ellentuck.harness import SuiteConfig, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--corpus-size", type=int, default=40)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    failed = 0
    for seed in args.seeds:
        report = run_suite(SuiteConfig(seed=seed, corpus_size=args.corpus_size, workers=args.workers))
        counts = Counter(r.check for r in report.reports)
        bad = [r for r in report.reports if not r.passed]
        failed += len(bad)
        strict = sum(r.note == "strict" for r in report.reports)
        ratios = sorted({Fraction(r.mid) / Fraction(r.left) for r in report.reports
                         if r.check.startswith("linfty")})
        print(f"seed {seed}: {sum(counts.values())} checks, {len(bad)} failed, "
              f"{strict} strict dominance cases, linfty ratios {[str(q) for q in ratios]}")
        for r in bad:
            print(f"  FAIL {r.check} {r.instance}: {r.left} / {r.mid} / {r.right} {r.note}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
