"""Uniform and Stepanov distances, and the search for almost periods.

The supremum over the real axis is replaced by a finite window of starting
points ``[X0, X1]``; every result records the window it was computed on.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .model import DomainError, FunctionExpr, StripSpec, fmt, horizontal_shift

DEFAULT_FLOOR = -1e6


class UnboundedFunctionError(DomainError):
    """A ``-inf`` sample reached a metric that needs finite values."""


@dataclass(frozen=True)
class MetricConfig:
    """Discretization of the distances.

    ``hx`` is the midpoint step for the unit-interval integral and must divide
    1; ``hy`` is the largest spacing between sampled lines; ``htau`` is the
    almost-period scan step and ``scan_hx`` the x-step of the coarse scan.
    """

    x_window: tuple = (0.0, 100.0)
    hx: float = 1e-3
    hy: float = 0.05
    htau: float = 1e-2
    scan_hx: float = 1e-2
    floor: float = DEFAULT_FLOOR
    strip: StripSpec | None = None

    def __post_init__(self):
        x0, x1 = self.x_window
        if x1 - x0 < 1:
            raise DomainError("x window must have length at least 1")
        for name in ("hx", "hy", "htau", "scan_hx"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        n = 1 / self.hx
        if abs(n - round(n)) > 1e-9 * n:
            raise DomainError("hx must divide 1")

    @property
    def n_unit(self) -> int:
        return int(round(1 / self.hx))


def y_rows(alpha: float, beta: float, hy: float) -> np.ndarray:
    """Sampled lines of ``[alpha, beta]``: both ends plus the lattice ``k*hy`` inside.

    Anchoring to a global lattice keeps the rows of a sub-interval with lattice
    ends a subset of the rows of the larger interval.
    """
    if beta < alpha:
        raise DomainError(f"[{alpha}, {beta}] is empty")
    if beta == alpha:
        return np.array([float(alpha)])
    k0 = math.floor(alpha / hy) + 1
    k1 = math.ceil(beta / hy) - 1
    inner = np.arange(k0, k1 + 1) * hy
    inner = inner[(inner > alpha + 1e-12 * hy) & (inner < beta - 1e-12 * hy)]
    return np.concatenate(([alpha], inner, [beta]))


@dataclass
class SeminormResult:
    value: float
    window: tuple
    steps: dict
    clipped_samples: int

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        return {"value": self.value, "window": list(self.window),
                "steps": self.steps, "clippedSamples": self.clipped_samples}


def _clip(vals: np.ndarray, floor: float) -> tuple[np.ndarray, int]:
    low = vals < floor
    n = int(np.count_nonzero(low))
    if n:
        vals = np.where(low, floor, vals)
    return vals, n


def stepanov(u: FunctionExpr, v: FunctionExpr, alpha: float, beta: float,
             cfg: MetricConfig = MetricConfig()) -> SeminormResult:
    """Sampled ``sup_z int_0^1 |u(z+t) - v(z+t)| dt`` over the window and ``[alpha, beta]``.

    Samples below ``cfg.floor`` (the ``-inf`` sentinel in particular) are
    clipped to the floor before differencing; the count is reported.
    """
    if cfg.strip is not None:
        cfg.strip.check_substrip(alpha, beta)
    x0, x1 = map(float, cfg.x_window)
    h, n = cfg.hx, cfg.n_unit
    n_start = int(round((x1 - x0) / h)) + 1
    mids = x0 + (np.arange(n_start + n - 1) + 0.5) * h
    best, clipped = 0.0, 0
    for y in y_rows(alpha, beta, cfg.hy):
        z = mids + 1j * y
        a, ca = _clip(u(z), cfg.floor)
        b, cb = _clip(v(z), cfg.floor)
        clipped += ca + cb
        c = np.concatenate(([0.0], np.cumsum(np.abs(a - b))))
        sums = (c[n:] - c[:-n]) * h
        best = max(best, float(sums.max()))
    return SeminormResult(best, (x0, x1), {"hx": h, "hy": cfg.hy}, clipped)


def stepanov_seminorm(u, v, alpha, beta, cfg: MetricConfig = MetricConfig()) -> float:
    return stepanov(u, v, alpha, beta, cfg).value


def uniform_nodes(cfg: MetricConfig) -> np.ndarray:
    """x-nodes of the uniform distance: every node and midpoint used by :func:`stepanov`."""
    x0, x1 = map(float, cfg.x_window)
    m = int(round((x1 + 1 - x0) / (cfg.hx / 2)))
    return x0 + np.arange(m + 1) * (cfg.hx / 2)


def uniform_distance(u: FunctionExpr, v: FunctionExpr, K, cfg: MetricConfig = MetricConfig()) -> float:
    """``max |u - v|`` over the sampled window times the lines ``Im z in K``."""
    xs = uniform_nodes(cfg)
    best = 0.0
    for y in np.atleast_1d(np.asarray(K, dtype=float)):
        z = xs + 1j * y
        a, b = u(z), v(z)
        if np.isneginf(a).any() or np.isneginf(b).any():
            raise UnboundedFunctionError(f"unbounded function on the line y={y}")
        best = max(best, float(np.max(np.abs(a - b))))
    return best


# ---------------------------------------------------------------------------
# almost periods


@dataclass
class AlmostPeriods:
    """Verified ε-almost periods plus the coarse scan that produced them."""

    taus: list
    values: list
    eps: float
    metric: str
    lmax: float
    scan_tau: np.ndarray = field(repr=False, default=None)
    scan_value: np.ndarray = field(repr=False, default=None)

    def __iter__(self):
        return iter(self.taus)

    def __len__(self):
        return len(self.taus)

    def scan_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "metric_value"])
        for t, m in zip(self.scan_tau, self.scan_value):
            w.writerow([fmt(t), fmt(m)])
        return buf.getvalue()

    def periods_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau", "metric_value"])
        for t, m in zip(self.taus, self.values):
            w.writerow([fmt(t), fmt(m)])
        return buf.getvalue()


def _parse_metric(metric):
    if metric == "uniform":
        return "uniform", None
    if isinstance(metric, tuple) and metric[0] == "stepanov":
        return "stepanov", (float(metric[1]), float(metric[2]))
    raise DomainError(f"unknown metric {metric!r}; use 'uniform' or ('stepanov', alpha, beta)")


def shift_distance(u: FunctionExpr, tau: float, metric, cfg: MetricConfig, K=(0.0,)) -> float:
    """Distance between ``u(. + tau)`` and ``u`` by direct evaluation."""
    kind, band = _parse_metric(metric)
    shifted = horizontal_shift(u, tau)
    if kind == "uniform":
        return uniform_distance(shifted, u, K, cfg)
    return stepanov(shifted, u, band[0], band[1], cfg).value


def _coarse_scan(u, kind, band, K, lmax, cfg):
    sh = cfg.scan_hx
    r = max(1, int(round(cfg.htau / sh)))
    sh = cfg.htau / r
    q_max = int(math.floor(lmax / cfg.htau + 1e-9))
    qs = np.arange(1, q_max + 1)
    x0, x1 = map(float, cfg.x_window)
    if kind == "uniform":
        rows = np.atleast_1d(np.asarray(K, dtype=float))
        n_base = int(round((x1 + 1 - x0) / sh)) + 1
        xs = x0 + np.arange(n_base + q_max * r) * sh
        S = u(xs[None, :] + 1j * rows[:, None])
        if np.isneginf(S).any():
            raise UnboundedFunctionError("unbounded function in the uniform scan")
        base = S[:, :n_base]
        vals = np.array([np.max(np.abs(S[:, q * r:q * r + n_base] - base)) for q in qs])
    else:
        rows = y_rows(band[0], band[1], cfg.hy)
        n1 = max(1, int(round(1 / sh)))
        n_start = int(round((x1 - x0) / sh)) + 1
        n_base = n_start + n1 - 1
        xs = x0 + (np.arange(n_base + q_max * r) + 0.5) * sh
        S, _ = _clip(u(xs[None, :] + 1j * rows[:, None]), cfg.floor)
        base = S[:, :n_base]
        vals = np.empty(len(qs))
        for i, q in enumerate(qs):
            c = np.cumsum(np.abs(S[:, q * r:q * r + n_base] - base), axis=1)
            c = np.concatenate((np.zeros((len(rows), 1)), c), axis=1)
            vals[i] = np.max(c[:, n1:] - c[:, :-n1]) * sh
    return qs * cfg.htau, vals


def _golden(f, a, b, xtol):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def find_almost_periods(u: FunctionExpr, eps: float, metric="uniform", lmax: float = 100.0,
                        cfg: MetricConfig = MetricConfig(), K=(0.0,), refine: bool = True) -> AlmostPeriods:
    """ε-almost periods of ``u`` in ``(0, lmax]``.

    A coarse scan on the grid ``k*htau`` locates candidates; local minima of
    the scan that miss ``eps`` are refined by golden-section search.  Every
    returned τ is re-verified by direct evaluation of the shifted function at
    the resolution of ``cfg``.  ``metric`` is ``'uniform'`` (lines ``K``) or
    ``('stepanov', alpha, beta)``.
    """
    if not eps > 0 or not lmax > 0:
        raise DomainError("eps and lmax must be positive")
    kind, band = _parse_metric(metric)
    if kind == "stepanov" and cfg.strip is not None:
        cfg.strip.check_substrip(*band)
    taus, vals = _coarse_scan(u, kind, band, K, lmax, cfg)

    def full(t):
        return shift_distance(u, t, metric, cfg, K)

    cands = [float(t) for t, m in zip(taus, vals) if m < eps]
    if refine and len(vals) >= 3:
        for i in range(1, len(vals) - 1):
            m = vals[i]
            if m < eps or m > vals[i - 1] or m > vals[i + 1]:
                continue
            slack = max(vals[i - 1] - m, vals[i + 1] - m)
            if m >= eps + slack:
                continue
            t, ft = _golden(full, taus[i - 1], taus[i + 1], 1e-12 * max(1.0, taus[i]))
            if ft < eps:
                cands.append(float(t))
    out_t, out_v = [], []
    for t in sorted(set(cands)):
        d = full(t)
        if d < eps:
            out_t.append(t)
            out_v.append(d)
    return AlmostPeriods(out_t, out_v, eps, kind if band is None else f"stepanov[{band[0]},{band[1]}]",
                         lmax, taus, vals)


def relative_density_gap(periods, lmax: float) -> float:
    """Largest gap in ``{0} U periods U {lmax}``."""
    pts = np.concatenate(([0.0], np.sort(np.asarray(list(periods), dtype=float)), [float(lmax)]))
    return float(np.max(np.diff(pts)))
