"""Run the experiment harness and print the summary table."""

import argparse
import time

from apstrip import harness as hs


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("target", nargs="?", default="all", choices=hs.EXPERIMENTS + ("all",))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", default="apstrip-out")
    p.add_argument("--threads", type=int, default=None)
    args = p.parse_args()
    t0 = time.perf_counter()
    reps = hs.run_all(args.target, args.seed, args.out, args.threads)
    for r in reps:
        print(f"{r.id:12s} {r.corpus:22s} {'pass' if r.verdict else 'FAIL'}  key={r.key_metric:.6g}")
    print(f"{sum(r.verdict for r in reps)}/{len(reps)} passed in {time.perf_counter() - t0:.1f} s; "
          f"reports in {args.out}/reports")


if __name__ == "__main__":
    main()
