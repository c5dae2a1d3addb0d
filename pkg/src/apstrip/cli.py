"""Command-line front end."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import fourier as fo
from . import harness as ha
from . import metrics as me
from . import model as md
from . import potential as po


class UsageError(Exception):
    pass


def _floats(text: str, n: int | None = None) -> list:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} numbers, got {text!r}")
    return vals


def _point(text: str) -> complex:
    x, y = _floats(text, 2)
    return complex(x, y)


def _load(path):
    if path is None:
        raise UsageError("--spec is required")
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return md.loads(text)


def _strip(args, spec_strip):
    if getattr(args, "strip", None):
        lo, hi = _floats(args.strip, 2)
        return md.StripSpec(lo, hi)
    return spec_strip


def _emit(args, name: str, text: str) -> None:
    """Print ``text`` and, with ``--out``, also write it atomically to ``out/name``."""
    sys.stdout.write(text)
    if args.out:
        ha.write_atomic(Path(args.out) / name, text)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(md.fmt(v) if isinstance(v, (float, int, np.floating)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _cfg(args, strip) -> me.MetricConfig:
    window = tuple(_floats(args.window, 2)) if args.window else (0.0, 100.0)
    return me.MetricConfig(x_window=window, hx=args.hx, hy=args.hy, htau=args.htau,
                           scan_hx=args.htau, strip=strip)


def _plot(args, name: str, draw) -> None:
    if not (args.plot and args.out):
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "apstrip"
    fig, ax = plt.subplots(figsize=(6, 4))
    draw(ax)
    path = Path(args.out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    fig.savefig(tmp, format="svg", metadata={"Date": None})
    plt.close(fig)
    tmp.replace(path)


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args):
    expr, strip = _load(args.spec)
    zs = [_point(p) for p in args.z]
    vals = md.evaluate(expr, np.array(zs), _strip(args, strip))
    _emit(args, "eval.csv", _csv(["x", "y", "value"], [(z.real, z.imag, v) for z, v in zip(zs, vals)]))


def cmd_grid(args):
    expr, strip = _load(args.spec)
    rect = _floats(args.rect, 4)
    g = md.sample_grid(expr, rect, args.h, args.h if args.hy_grid is None else args.hy_grid,
                       _strip(args, strip))
    _emit(args, "grid.csv", g.to_csv())


def cmd_stepanov(args):
    expr, strip = _load(args.spec)
    other = _load(args.spec2)[0] if args.spec2 else md.const(0.0)
    strip = _strip(args, strip)
    r = me.stepanov(expr, other, args.alpha, args.beta, _cfg(args, strip))
    _emit(args, "stepanov.json", _json(r.to_json()))


def cmd_periods(args):
    expr, strip = _load(args.spec)
    strip = _strip(args, strip)
    metric = "uniform" if args.metric == "uniform" else ("stepanov", args.alpha, args.beta)
    K = _floats(args.lines) if args.lines else (0.0,)
    res = me.find_almost_periods(expr, args.eps, metric, args.lmax, _cfg(args, strip), K)
    if args.out:
        ha.write_atomic(Path(args.out) / "scan.csv", res.scan_csv())
    _emit(args, "periods.csv", res.periods_csv())


def cmd_mean(args):
    expr, strip = _load(args.spec)
    r = fo.mean_value(expr, args.y, args.tol, args.tmax, window=args.weight, strip=_strip(args, strip))
    out = {"value": [r.value.real, r.value.imag], "T_final": r.T_final, "converged": r.converged,
           "clippedSamples": r.clipped, "history": [{"T": T, "re": v.real, "im": v.imag} for T, v in r.history]}
    _emit(args, "mean.json", _json(out))
    _plot(args, "mean.svg", lambda ax: (ax.semilogx([h[0] for h in r.history], [h[1].real for h in r.history], "o-"),
                                        ax.set_xlabel("T"), ax.set_ylabel("windowed mean")))


def cmd_coeffs(args):
    expr, strip = _load(args.spec)
    strip = _strip(args, strip)
    lams = [float(v) for v in args.lam]
    ys = [float(v) for v in args.y]
    if strip is not None and not strip.contains(np.array(ys)):
        raise md.DomainError("a sampled line lies outside the strip")
    t = fo.coefficient_table(expr, lams, ys, args.tol, args.tmax, window=args.weight)
    _emit(args, "coeffs.csv", t.to_csv())

    def draw(ax):
        for i, lam in enumerate(t.lams):
            ax.plot(t.ys, np.abs(t.values[i]), "o-", label=f"lambda={lam:g}")
        ax.set_xlabel("y")
        ax.set_ylabel("|a_lambda(y)|")
        ax.legend()

    _plot(args, "coeffs.svg", draw)


def cmd_spectrum(args):
    expr, strip = _load(args.spec)
    probes = [float(v) for v in args.y]
    basis = md.frequency_hints(expr)
    cands = fo.lattice_candidates(basis, args.order, args.lam_max)
    found = fo.spectrum_scan(expr, cands, probes, args.threshold, args.tol, args.tmax)
    t = fo.coefficient_table(expr, found, probes, args.tol, args.tmax) if found else None
    rows = [(lam, float(np.max(np.abs(t.values[i])))) for i, lam in enumerate(found)] if found else []
    _emit(args, "spectrum.csv", _csv(["lambda", "max_abs_coefficient"], rows))


def cmd_bf(args):
    expr, strip = _load(args.spec)
    strip = _strip(args, strip)
    if args.basis:
        basis = _floats(args.basis)
        spectrum = None
    else:
        probes = [args.alpha, 0.5 * (args.alpha + args.beta), args.beta]
        cands = fo.lattice_candidates(md.frequency_hints(expr), 10, args.lam_max)
        spectrum = fo.spectrum_scan(expr, cands, probes, 1e-8, 1e-9, args.tmax)
        basis = fo.rational_basis(spectrum)
    width = math.factorial(args.m) ** 2 if args.width == "classical" else None
    spec = fo.bochner_fejer_multipliers(basis, args.m, width)
    out = spec.to_json()
    if not args.multipliers_only:
        ys = me.y_rows(args.alpha, args.beta, args.hy)
        P = fo.bochner_fejer_sum(expr, spec, ys, spectrum=spectrum, tol=1e-10, tmax=args.tmax)
        out["approximant"] = md.to_json(P)
        out["stepanov_distance"] = me.stepanov(P, expr, args.alpha, args.beta, _cfg(args, strip)).value
    _emit(args, "bf.json", _json(out))


def _parse_atoms(text):
    try:
        flat = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"--atoms: line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(flat, list) or len(flat) % 3:
        raise UsageError("--atoms expects a flat JSON list [x, y, mass, ...]")
    return tuple((complex(flat[i], flat[i + 1]), flat[i + 2]) for i in range(0, len(flat), 3))


def cmd_green(args):
    if args.measure:
        try:
            mu = po.MeasureSpec.from_json(json.loads(Path(args.measure).read_text()))
        except (OSError, KeyError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read measure {args.measure}: {e}") from None
    elif args.atoms:
        mu = po.MeasureSpec(_parse_atoms(args.atoms))
    else:
        raise UsageError("give --atoms or --measure")
    disk = po.DiskSpec(_point(args.center), args.R)
    zs = [_point(p) for p in args.z]
    vals = po.green_potential(mu, disk, np.array(zs))
    _emit(args, "green.csv", _csv(["x", "y", "value"], [(z.real, z.imag, v) for z, v in zip(zs, vals)]))


def cmd_riesz(args):
    expr, strip = _load(args.spec)
    rect = _floats(args.rect, 4)
    g = md.sample_grid(expr, rect, args.h, args.h, _strip(args, strip))
    mu = po.riesz_measure(g)
    out = mu.to_json() if args.density else {"atoms": mu.to_json()["atoms"]}
    out["total_mass"] = mu.total_mass()
    out["clipped"] = mu.clipped
    _emit(args, "riesz.json", _json(out))


def cmd_kernel(args):
    lo, hi = _floats(args.strip or "-1,1", 2)
    spec = po.StripKernelSpec(args.gamma, md.StripSpec(lo, hi))
    ws = [_point(p) for p in args.w]
    K = np.atleast_1d(po.strip_kernel(spec, np.array(ws)))
    rows = []
    if args.N:
        K1, K2 = po.kernel_split(spec, args.N, np.array(ws))
        rows = [(w.real, w.imag, k, a, b) for w, k, a, b in zip(ws, K, K1, K2)]
        text = _csv(["x", "y", "K", "K1", "K2"], rows)
    else:
        text = _csv(["x", "y", "K"], [(w.real, w.imag, k) for w, k in zip(ws, K)])
    _emit(args, "kernel.csv", text)


def cmd_verify(args):
    reps = ha.run_all(args.target, args.seed, args.out or "apstrip-out")
    for rep in reps:
        sys.stdout.write(f"{rep.id},{rep.corpus},{'pass' if rep.verdict else 'fail'}\n")
    return 0 if all(r.verdict for r in reps) else 1


# ---------------------------------------------------------------------------
# parser


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{text} is not positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON function spec")
    common.add_argument("--strip", help="strip bounds lo,hi (overrides the spec)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("--plot", action="store_true", help="also write SVG plots into --out")
    common.add_argument("--tol", type=_positive, default=1e-6)
    common.add_argument("--tmax", type=_positive, default=fo.TMAX_DEFAULT)
    common.add_argument("--window", help="x-window X0,X1 of the metrics")
    common.add_argument("--hx", type=_positive, default=1e-3)
    common.add_argument("--hy", type=_positive, default=0.05)
    common.add_argument("--htau", type=_positive, default=1e-2)
    common.add_argument("--alpha", type=float, default=0.0)
    common.add_argument("--beta", type=float, default=1.0)

    p = argparse.ArgumentParser(prog="apstrip", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate a spec at points")
    s.add_argument("--z", action="append", required=True, help="point x,y (repeatable)")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("grid", parents=[common], help="sample a spec on a grid")
    s.add_argument("--rect", required=True, help="x0,x1,y0,y1")
    s.add_argument("--h", type=_positive, required=True)
    s.add_argument("--hy-grid", type=_positive)
    s.set_defaults(func=cmd_grid)

    s = sub.add_parser("stepanov", parents=[common], help="Stepanov distance on [alpha, beta]")
    s.add_argument("--spec2", help="second spec (default: zero)")
    s.set_defaults(func=cmd_stepanov)

    s = sub.add_parser("periods", parents=[common], help="eps-almost periods")
    s.add_argument("--eps", type=_positive, required=True)
    s.add_argument("--lmax", type=_positive, default=20.0)
    s.add_argument("--metric", choices=("uniform", "stepanov"), default="stepanov")
    s.add_argument("--lines", help="y values of the uniform metric")
    s.set_defaults(func=cmd_periods)

    s = sub.add_parser("mean", parents=[common], help="mean value along a line")
    s.add_argument("--y", type=float, default=0.0)
    s.add_argument("--weight", choices=("hann", "box"), default="hann")
    s.set_defaults(func=cmd_mean)

    s = sub.add_parser("coeffs", parents=[common], help="Fourier-Bohr coefficients")
    s.add_argument("--lambda", dest="lam", action="append", required=True)
    s.add_argument("--y", action="append", required=True)
    s.add_argument("--weight", choices=("hann", "box"), default="hann")
    s.set_defaults(func=cmd_coeffs)

    s = sub.add_parser("spectrum", parents=[common], help="spectrum scan over lattice candidates")
    s.add_argument("--y", action="append", required=True)
    s.add_argument("--threshold", type=_positive, default=1e-6)
    s.add_argument("--order", type=int, default=10)
    s.add_argument("--lam-max", type=_positive, default=10.0)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("bf", parents=[common], help="Bochner-Fejer multipliers and approximant")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--basis", help="comma-separated basis (default: detected)")
    s.add_argument("--width", choices=("contract", "classical"), default="contract")
    s.add_argument("--lam-max", type=_positive, default=10.0)
    s.add_argument("--multipliers-only", action="store_true")
    s.set_defaults(func=cmd_bf)

    s = sub.add_parser("green", parents=[common], help="Green potential of a disk")
    s.add_argument("--atoms", help='flat JSON list "[x, y, mass, ...]"')
    s.add_argument("--measure", help="MeasureSpec JSON file")
    s.add_argument("--R", type=_positive, required=True)
    s.add_argument("--center", default="0,0")
    s.add_argument("--z", action="append", required=True)
    s.set_defaults(func=cmd_green)

    s = sub.add_parser("riesz", parents=[common], help="Riesz measure of sampled data")
    s.add_argument("--rect", required=True)
    s.add_argument("--h", type=_positive, required=True)
    s.add_argument("--density", action="store_true", help="include the density grid")
    s.set_defaults(func=cmd_riesz)

    s = sub.add_parser("kernel", parents=[common], help="strip kernel and its split")
    s.add_argument("--gamma", type=_positive, required=True)
    s.add_argument("--w", action="append", required=True)
    s.add_argument("--N", type=_positive)
    s.set_defaults(func=cmd_kernel)

    s = sub.add_parser("verify", parents=[common], help="run the experiment harness")
    s.add_argument("target", choices=("thm1", "thm2", "thm3", "thm4", "lem12", "lem4", "all"))
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        code = args.func(args)
    except (UsageError, md.DomainError, md.SpecError) as e:
        print(f"apstrip {args.command}: {e}", file=sys.stderr)
        return 2
    return 0 if code is None else code


if __name__ == "__main__":
    sys.exit(main())
