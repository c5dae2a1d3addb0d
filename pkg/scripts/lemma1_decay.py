"""Line-integral error of G^{delta_{1/n}} - G^{delta_0} on B(0, R) for growing n.

Compares the harness midpoint value with adaptive quadrature and prints the
n needed to reach a target error.
"""

import argparse
import math

from scipy.integrate import quad

from apstrip import harness as hs


def adaptive(n, R, t1, ys):
    a = 1.0 / n

    def G(z, w):
        return math.log(abs(R * R - z * w) / (R * abs(z - w))) if z != w else 0.0

    best = 0.0
    for y in ys:
        f = lambda x: abs(G(complex(x, y), a) - G(complex(x, y), 0.0))
        pts = [0.0, a] if y == 0 and a < t1 else None
        best = max(best, quad(f, -t1, t1, points=pts, limit=400, epsabs=1e-12)[0])
    return best


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--R", type=float, default=0.4)
    p.add_argument("--t", type=float, default=0.2)
    p.add_argument("--target", type=float, default=1e-2)
    args = p.parse_args()
    sched = (4, 8, 16, 32, 64)
    r = hs.lemma12_experiment("dirac_shift", sched, args.R, args.t, args.t, args.target)
    ys = (0.0, 1e-3, 1e-2, 0.05)
    print("n,harness,adaptive")
    for n in sched:
        print(f"{n},{r.values[f'line_sup_l1[n={n}]']:.6f},{adaptive(n, args.R, args.t, ys):.6f}")
    n = 64
    while adaptive(n, args.R, args.t, ys) > args.target:
        n = int(n * 1.25)
    print(f"first n (25% steps) with error <= {args.target}: {n}")


if __name__ == "__main__":
    main()
