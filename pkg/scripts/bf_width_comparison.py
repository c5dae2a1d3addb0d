"""Stepanov distance of Bochner-Fejer sums under the two Fejer widths."""

import argparse

from apstrip import harness as hs


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--items", default="cos,log_sin,log_one_minus_half")
    p.add_argument("--mmax", type=int, default=4)
    args = p.parse_args()
    C = hs.corpus()
    ms = tuple(range(1, args.mmax + 1))
    print("item,width," + ",".join(f"m={m}" for m in ms))
    for name in args.items.split(","):
        for width in ("contract", "classical"):
            r = hs.theorem4_experiment(C[name], ms, width=width, n_centers=20)
            print(f"{name},{width}," + ",".join(f"{r.values[f'distance[m={m}]']:.4f}" for m in ms))


if __name__ == "__main__":
    main()
