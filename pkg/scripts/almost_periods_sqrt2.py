"""Almost periods of cos x + cos(sqrt2 x) in the uniform metric on the real axis."""

import argparse

from apstrip import metrics as me
from apstrip import model as md


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--lmax", type=float, default=200.0)
    p.add_argument("--window", type=float, default=100.0)
    args = p.parse_args()
    u = md.Sum((md.cosine(1.0), md.cosine(2 ** 0.5)))
    cfg = me.MetricConfig(x_window=(0.0, args.window), hx=1e-2, htau=1e-2, scan_hx=1e-2)
    res = me.find_almost_periods(u, args.eps, "uniform", args.lmax, cfg)
    nontrivial = [(t, v) for t, v in zip(res.taus, res.values) if t > 1.0]
    print(f"{len(res.taus)} periods, {len(nontrivial)} beyond tau = 1")
    for t, v in nontrivial[:10]:
        print(f"tau={t:.6f} distance={v:.4g}")
    print(f"largest gap: {me.relative_density_gap(res.taus, args.lmax):.3f}")


if __name__ == "__main__":
    main()
