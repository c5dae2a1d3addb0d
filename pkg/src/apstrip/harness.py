"""Reproducible numerical experiments over a fixed corpus of generators.

Each experiment returns a :class:`Report` whose verdict is the conjunction
of its recorded checks, so a reader can re-derive it from the JSON alone.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal
from scipy.special import exp1

from . import fourier as fo
from . import metrics as me
from . import model as md
from . import potential as po

BUMP_MASS = math.exp(-1) - exp1(1.0)  # int_0^1 exp(-1/t) dt


# ---------------------------------------------------------------------------
# mollifiers and pairings


@dataclass(frozen=True)
class Mollifier:
    """Radial bump ``c * exp(-1/(1 - |z/eps|^2))`` of unit integral."""

    eps: float
    center_y: float = 0.0

    def __post_init__(self):
        if not self.eps > 0:
            raise md.DomainError("mollifier radius must be positive")

    @property
    def c(self) -> float:
        return 1.0 / (self.eps ** 2 * math.pi * BUMP_MASS)

    @property
    def sup(self) -> float:
        return self.c * math.exp(-1.0)

    def __call__(self, w):
        r2 = np.abs(np.asarray(w)) ** 2 / self.eps ** 2
        out = np.zeros(np.shape(r2))
        inside = r2 < 1
        out[inside] = self.c * np.exp(-1.0 / (1.0 - r2[inside]))
        return out


def _check_support(phi: Mollifier, strip):
    if strip is None:
        return
    lo, hi = phi.center_y - phi.eps, phi.center_y + phi.eps
    if not (strip.y_low < lo and hi < strip.y_high):
        raise md.DomainError("mollifier support leaves the strip")


def _square_nodes(phi: Mollifier, n: int):
    h = 2 * phi.eps / n
    off = -phi.eps + (np.arange(n) + 0.5) * h
    return h, off


def convolution_pairing(u, phi: Mollifier, t: float, n: int = 200, strip=None) -> float:
    """``int u(z) phi(z - t - i*center_y) dx dy`` by the midpoint rule on the support square."""
    _check_support(phi, strip)
    h, off = _square_nodes(phi, n)
    W = phi(off[:, None] + 1j * off[None, :])
    Z = (t + off)[:, None] + 1j * (phi.center_y + off)[None, :]
    U = np.maximum(np.asarray(u(Z), dtype=float), po.FLOOR)
    return float(np.sum(U * W) * h * h)


def pairing_sweep(u, phi: Mollifier, t0: float, count: int, n: int = 200, strip=None):
    """Pairings at ``t_k = t0 + k*h`` (``h = 2 eps / n``) for ``k < count``, via FFT correlation."""
    _check_support(phi, strip)
    h, off = _square_nodes(phi, n)
    W = phi(off[:, None] + 1j * off[None, :])
    xs = t0 + off[0] + np.arange(n + count - 1) * h
    Z = xs[:, None] + 1j * (phi.center_y + off)[None, :]
    U = np.maximum(np.asarray(u(Z), dtype=float), po.FLOOR)
    vals = signal.correlate(U, W, mode="valid", method="fft")[:, 0] * h * h
    return t0 + np.arange(count) * h, vals


# ---------------------------------------------------------------------------
# reports


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else md.fmt(v)


@dataclass
class Check:
    name: str
    value: float
    bound: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        if self.relation == "<=":
            return bool(self.value <= self.bound)
        if self.relation == ">=":
            return bool(self.value >= self.bound)
        if self.relation == ">":
            return bool(self.value > self.bound)
        raise ValueError(self.relation)

    def to_json(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "relation": self.relation,
                "bound": _num(self.bound), "passed": self.passed}


@dataclass
class Report:
    id: str
    corpus: str
    params: dict
    measurements: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    caveats: list = field(default_factory=list)

    def measure(self, name: str, value) -> float:
        self.measurements.append((name, float(value)))
        return float(value)

    def check(self, name: str, value, bound, relation: str = "<=") -> bool:
        c = Check(name, float(value), float(bound), relation)
        self.checks.append(c)
        return c.passed

    @property
    def verdict(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def values(self) -> dict:
        return dict(self.measurements)

    @property
    def key_metric(self) -> float:
        return self.measurements[-1][1] if self.measurements else math.nan

    def to_json(self) -> dict:
        return {"id": self.id, "corpus": self.corpus, "params": self.params,
                "measurements": [{"name": n, "value": _num(v)} for n, v in self.measurements],
                "verdict": "pass" if self.verdict else "fail",
                "caveats": list(self.caveats),
                "checks": [c.to_json() for c in self.checks]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def rederive_verdict(obj: dict) -> bool:
    """Verdict recomputed from the checks recorded in a report JSON."""
    ops = {"<=": lambda a, b: a <= b, ">=": lambda a, b: a >= b, ">": lambda a, b: a > b}
    return all(ops[c["relation"]](float(c["value"]), float(c["bound"])) for c in obj["checks"])


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusItem:
    name: str
    expr: md.FunctionExpr
    band: tuple          # substrip used by the experiments
    lam: float           # frequency probed by the coefficient experiments
    note: str = ""


STRIP = md.StripSpec(-1.0, 2.0)


def corpus() -> dict:
    """The fixed generator corpus.

    The two cosine entries are the harmonic functions ``Re exp(i lam z)``,
    which reduce to ``cos(lam x)`` on the real axis; the literal
    ``cos(lam x)`` has Laplacian ``-lam^2 cos(lam x)`` and is not subharmonic.
    """
    f_em1 = md.holo((1, 1), (0, -1))
    f_half = md.holo((0, 1), (1, -0.5))
    f_sin = md.holo((1, -0.5j), (-1, 0.5j))
    items = [
        CorpusItem("const", md.const(1.5), (0.0, 1.0), 0.0),
        CorpusItem("minus_y", md.minus_y(), (0.0, 1.0), 0.0),
        CorpusItem("cos", md.harmonic_cosine(1.0), (0.0, 1.0), 1.0, "Re exp(iz)"),
        CorpusItem("cos_sqrt2", md.Sum((md.harmonic_cosine(1.0), md.harmonic_cosine(math.sqrt(2)))),
                   (0.0, 1.0), 1.0, "Re exp(iz) + Re exp(i sqrt2 z)"),
        CorpusItem("log_exp_minus_1", md.LogAbs(f_em1), (0.2, 1.0), 1.0),
        CorpusItem("log_one_minus_half", md.LogAbs(f_half), (0.0, 1.0), 1.0),
        CorpusItem("log_sin", md.LogAbs(f_sin), (0.3, 1.0), 2.0),
        CorpusItem("exp_minus_y", md.Exp(md.LogAbs(md.holo((1, 1)))), (0.0, 1.0), 0.0),
        CorpusItem("abs_one_minus_half", md.Exp(md.LogAbs(f_half)), (0.0, 1.0), 1.0),
    ]
    return {c.name: c for c in items}


def corpus_closure(item: CorpusItem, seed: int, n: int = 50, tol: float = 1e-6) -> Report:
    """Sub-mean-value check of a corpus generator at random circles in the strip."""
    rng = np.random.default_rng(seed)
    rho = 0.2
    cx = rng.uniform(0, 20, n)
    cy = rng.uniform(STRIP.y_low + rho + 0.05, STRIP.y_high - rho - 0.05, n)
    s = po.submean_check(item.expr, cx + 1j * cy, [rho], tol, domain=STRIP)
    r = Report("closure", item.name, {"seed": seed, "centers": n, "radius": rho, "tol": tol})
    r.measure("min_deficit", s.min_deficit)
    r.check("min_deficit", s.min_deficit, -tol, ">=")
    return r


# ---------------------------------------------------------------------------
# experiments


def _cfg(window=(0.0, 20.0), hx=1e-3, hy=0.05, htau=1e-2):
    return me.MetricConfig(x_window=window, hx=hx, hy=hy, htau=htau, scan_hx=htau, strip=STRIP)


def theorem1_experiment(item: CorpusItem, shifts, band=None, cfg=None, eps_moll: float = 0.3,
                        t_width: float = 100.0, expect=None, n: int = 120) -> Report:
    """Stepanov displacement versus mollified (convolution) displacement of shifts.

    ``expect`` maps a shift to ``'small'`` or ``'large'``; small shifts must
    have both displacements below 1e-6 (or below the given threshold pair),
    large ones need Stepanov above 0.1 and convolution above 1e-3.  The bound ``conv <= C step`` with
    ``C = sup(phi) * 2 eps * ceil(2 eps)`` is checked for every shift.
    """
    band = band or item.band
    cfg = cfg or _cfg()
    yc = 0.5 * (band[0] + band[1])
    eps = min(eps_moll, 0.5 * (band[1] - band[0]) * 0.999)
    phi = Mollifier(eps, yc)
    C = phi.sup * 2 * eps * math.ceil(2 * eps)
    h = 2 * eps / n
    count = int(math.ceil(t_width / h)) + 1
    r = Report("thm1", item.name, {"band": list(band), "eps_mollifier": eps, "t_width": t_width,
                                   "shifts": [float(s) for s in shifts], "window": list(cfg.x_window),
                                   "hx": cfg.hx, "hy": cfg.hy, "C": C})
    r.caveats.append("finite t-grid and x-window stand in for the supremum over the real axis")
    r.caveats.append("sequential compactness is not tested; only displacement equivalence on the grid")
    expect = expect or {}
    for tau in shifts:
        step = me.stepanov(md.horizontal_shift(item.expr, tau), item.expr, *band, cfg)
        _, base = pairing_sweep(item.expr, phi, 0.0, count, n, STRIP)
        _, moved = pairing_sweep(item.expr, phi, float(tau), count, n, STRIP)
        conv = float(np.max(np.abs(moved - base)))
        if step.clipped_samples:
            r.caveats.append(f"tau={tau!r}: {step.clipped_samples} samples clipped at the floor")
        r.measure(f"stepanov[{tau!r}]", step.value)
        r.measure(f"convolution[{tau!r}]", conv)
        if conv > 0 and step.value > 0:
            r.measure(f"ratio_step_over_conv[{tau!r}]", step.value / conv)
        r.check(f"conv_le_C_step[{tau!r}]", conv, C * step.value + 1e-9)
        kind = expect.get(tau)
        if kind == "small":
            r.check(f"stepanov_small[{tau!r}]", step.value, 1e-6)
            r.check(f"conv_small[{tau!r}]", conv, 1e-6)
        elif kind == "large":
            r.check(f"stepanov_large[{tau!r}]", step.value, 0.1, ">")
            r.check(f"conv_large[{tau!r}]", conv, 1e-3, ">")
        elif isinstance(kind, (tuple, list)):
            r.check(f"stepanov_below[{tau!r}]", step.value, kind[0])
            r.check(f"conv_below[{tau!r}]", conv, C * kind[0])
    return r


def _subsample(xs, k):
    xs = list(xs)
    if len(xs) <= k:
        return xs
    idx = np.linspace(0, len(xs) - 1, k).round().astype(int)
    return [xs[i] for i in idx]


def theorem2_experiment(name: str, f: md.HoloPoly, band, eps: float = 0.05, lmax: float = 8.0,
                        cfg=None, verify_max: int = 30) -> Report:
    """Almost periods of ``|f|`` and of ``log|f|`` on a zero-free band.

    With ``m <= |f| <= M`` on the sampled band, ``|log a - log b| <= |a - b|/m``
    and ``|a - b| <= M |log a - log b|``, so an eps-period of ``|f|`` is an
    ``eps/m``-period of ``log|f|`` and an eps'-period of ``log|f|`` is an
    ``M eps'``-period of ``|f|``.  Both implications are checked period by
    period.
    """
    cfg = cfg or _cfg(window=(0.0, 10.0), hx=5e-3, hy=0.05)
    u = md.Exp(md.LogAbs(f))
    lu = md.LogAbs(f)
    x0, x1 = cfg.x_window
    xs = np.arange(x0, x1 + 1 + lmax + cfg.hx, cfg.hx / 4)
    rows = me.y_rows(band[0], band[1], cfg.hy)
    vals = u(xs[None, :] + 1j * rows[:, None])
    m_lo, m_hi = float(vals.min()), float(vals.max())
    r = Report("thm2", name, {"band": list(band), "eps": eps, "lmax": lmax, "window": list(cfg.x_window),
                              "hx": cfg.hx, "hy": cfg.hy, "htau": cfg.htau})
    r.measure("min_abs_f", m_lo)
    r.measure("max_abs_f", m_hi)
    if not r.check("zero_free", m_lo, 0.0, ">"):
        r.caveats.append("f vanishes on the band; item rejected")
        return r
    # sampling margin for the bounds between sample nodes
    m_eff, M_eff = m_lo * (1 - 1e-3), m_hi * (1 + 1e-3)
    metric = ("stepanov", band[0], band[1])
    pu = me.find_almost_periods(u, eps, metric, lmax, cfg)
    eps_log = eps / m_eff
    pl = me.find_almost_periods(lu, eps_log, metric, lmax, cfg)
    r.measure("periods_abs", len(pu))
    r.measure("periods_log", len(pl))
    r.params["eps_log"] = eps_log
    worst_a, worst_b = -math.inf, -math.inf
    for tau, du in zip(*[_subsample(x, verify_max) for x in (pu.taus, pu.values)]):
        dl = me.shift_distance(lu, tau, metric, cfg)
        worst_a = max(worst_a, dl - du / m_eff)
    for tau, dl in zip(*[_subsample(x, verify_max) for x in (pl.taus, pl.values)]):
        du = me.shift_distance(u, tau, metric, cfg)
        worst_b = max(worst_b, du - M_eff * dl)
    r.measure("abs_to_log_excess", worst_a if len(pu) else 0.0)
    r.measure("log_to_abs_excess", worst_b if len(pl) else 0.0)
    r.check("abs_periods_are_log_periods", worst_a if len(pu) else 0.0, 1e-12)
    r.check("log_periods_are_abs_periods", worst_b if len(pl) else 0.0, 1e-12)
    r.check("abs_periods_found", len(pu), 1, ">=")
    r.check("log_periods_found", len(pl), 1, ">=")
    if len(pu) > verify_max or len(pl) > verify_max:
        r.caveats.append(f"implications verified on an evenly spaced subsample of {verify_max} periods")
    return r


def negative_control(item: CorpusItem, tau: float, eps: float, band=None, cfg=None) -> Report:
    """A shift that must be rejected as an eps-almost period."""
    band = band or item.band
    cfg = cfg or _cfg(window=(0.0, 10.0), hx=5e-3)
    d = me.shift_distance(item.expr, tau, ("stepanov", band[0], band[1]), cfg)
    r = Report("thm2_control", item.name, {"tau": tau, "eps": eps, "band": list(band)})
    r.measure("stepanov_shift", d)
    r.check("rejected", d, eps, ">=")
    return r


def theorem3_experiment(item: CorpusItem, lam=None, y_range=None, levels: int = 3,
                        hy0: float = 0.1, tol: float = 1e-10, slack: float = 1.5) -> Report:
    """Continuity modulus of ``y -> a_lam(u, y)`` under halving of the y-step.

    The ratio of consecutive moduli must stay below ``slack/2``; a profile
    whose modulus is below 1e-9 at every level counts as constant.
    """
    lam = item.lam if lam is None else lam
    a, b = y_range or item.band
    n_fine = int(round((b - a) / (hy0 / 2 ** (levels - 1))))
    ys = a + (b - a) * np.arange(n_fine + 1) / n_fine
    t = fo.coefficient_table(item.expr, [lam], ys, tol)
    col = t.values[0]
    r = Report("thm3", item.name, {"lambda": lam, "y_range": [a, b], "hy0": hy0, "levels": levels,
                                   "tol": tol, "slack": slack})
    if not np.all(t.converged):
        r.caveats.append("some mean values did not reach the tolerance before the window cap")
    mods = []
    for lev in range(levels):
        stride = 2 ** (levels - 1 - lev)
        mods.append(r.measure(f"modulus[h={hy0 / 2 ** lev!r}]", fo.continuity_modulus(col[::stride])))
    if max(mods) <= 1e-9:
        r.caveats.append("coefficient profile is constant")
        r.check("constant_profile", max(mods), 1e-9)
        return r
    for lev in range(1, levels):
        r.check(f"halving_ratio[{lev}]", mods[lev] / mods[lev - 1], slack / 2)
    return r


def _spectrum(item: CorpusItem, band, lam_max=10.0, threshold=1e-8):
    basis = md.frequency_hints(item.expr)
    cands = fo.lattice_candidates(basis, 10, lam_max)
    probes = [band[0], 0.5 * (band[0] + band[1]), band[1]]
    return fo.spectrum_scan(item.expr, cands, probes, threshold, tol=1e-9)


def theorem4_experiment(item: CorpusItem, ms=(1, 2, 3, 4), band=None, cfg=None, seed: int = 0,
                        n_centers: int = 200, tol: float = 1e-6, width: str = "classical",
                        hy: float = 0.0125) -> Report:
    """Bochner-Fejer sums ``P_m``: Stepanov distance to ``u`` and subharmonicity.

    ``width='classical'`` uses the Fejer order ``(m!)^2`` per basis
    direction; ``'contract'`` uses ``m*m!``.
    """
    band = band or item.band
    cfg = cfg or _cfg(window=(0.0, 20.0))
    spectrum = _spectrum(item, band)
    basis = fo.rational_basis(spectrum) if spectrum else []
    ys = me.y_rows(band[0], band[1], hy)
    r = Report("thm4", item.name, {"band": list(band), "m": list(ms), "width": width, "seed": seed,
                                   "centers": n_centers, "tol": tol, "window": list(cfg.x_window),
                                   "spectrum": spectrum, "basis": basis})
    table = fo.coefficient_table(item.expr, spectrum, ys, 1e-10) if spectrum else None
    rng = np.random.default_rng(seed)
    rho = 0.1 * (band[1] - band[0])
    cx = rng.uniform(cfg.x_window[0], cfg.x_window[1], n_centers)
    cy = rng.uniform(band[0] + rho, band[1] - rho, n_centers)
    dists = []
    for m in ms:
        w = math.factorial(m) ** 2 if width == "classical" else None
        spec = fo.bochner_fejer_multipliers(basis, m, w)
        P = fo.bochner_fejer_sum(item.expr, spec, ys, spectrum=spectrum, table=table) if spectrum \
            else md.const(0.0)
        d = me.stepanov(P, item.expr, *band, cfg).value
        dists.append(r.measure(f"distance[m={m}]", d))
        s = po.submean_check(P, cx + 1j * cy, [rho], tol, paired=False)
        r.measure(f"submean_min_deficit[m={m}]", s.min_deficit)
        r.check(f"submean[m={m}]", s.min_deficit, -tol, ">=")
    for i in range(1, len(dists)):
        r.check(f"nonincreasing[m={ms[i]}]", dists[i], 1.1 * dists[i - 1] + 1e-12)
    r.check(f"distance_at_m={ms[-1]}", dists[-1], 0.05)
    return r


def line_sup_l1(F, t1: float, t2: float, nx: int = 4096, hy: float = 5e-3) -> float:
    """``sup_{|y| <= t2} int_{-t1}^{t1} |F(x + iy)| dx`` by the midpoint rule in x.

    The default node count keeps the midpoints off the dyadic points ``1/n``
    and off ``0`` for ``t1 = 0.2``.
    """
    xs = -t1 + (np.arange(nx) + 0.5) * (2 * t1 / nx)
    ny = int(round(2 * t2 / hy))
    ys = -t2 + np.arange(ny + 1) * (2 * t2 / ny)
    best = 0.0
    for y in ys:
        v = np.abs(F(xs + 1j * y))
        best = max(best, float(np.sum(v) * (2 * t1 / nx)))
    return best


def lemma12_experiment(kind: str = "dirac_shift", schedule=(2, 4, 8, 16, 32, 64), R: float = 0.4,
                       t1: float = 0.2, t2: float = 0.2, tol: float = 1e-2) -> Report:
    """Line-integral convergence of Green potentials for a measure sequence.

    ``kind``: ``'dirac_shift'`` (delta at 1/n to delta at 0),
    ``'constant'`` (delta at 0 throughout), ``'scaled'`` ((1 - 1/n) delta at 0)
    or ``'with_harmonic'`` (``u_n = -G^{mu_n} + Re z`` against ``u_0``).
    """
    if not t1 ** 2 + t2 ** 2 < R ** 2:
        raise md.DomainError("t1^2 + t2^2 must be below R^2")
    disk = po.DiskSpec(0j, R)
    mu0 = po.MeasureSpec(((0j, 1.0),))

    def mu_n(n):
        if kind in ("dirac_shift", "with_harmonic"):
            return po.MeasureSpec(((complex(1.0 / n), 1.0),))
        if kind == "constant":
            return mu0
        if kind == "scaled":
            return po.MeasureSpec(((0j, 1.0 - 1.0 / n),))
        raise md.DomainError(f"unknown sequence {kind!r}")

    r = Report("lem12", kind, {"schedule": list(schedule), "R": R, "t1": t1, "t2": t2, "tol": tol})
    errs = []
    for n in schedule:
        mn = mu_n(n)
        if any(not disk.contains(z) for z, _ in mn.atoms):
            r.caveats.append(f"n={n}: atom outside the disk, restricted measure is zero")
            mn = mn.restrict(disk.contains)
        if kind == "with_harmonic":
            def F(z, mn=mn):
                un = -po.green_potential(mn, disk, z) + z.real
                u0 = -po.green_potential(mu0, disk, z) + z.real
                return un - u0
        else:
            def F(z, mn=mn):
                return po.green_potential(mn, disk, z) - po.green_potential(mu0, disk, z)
        errs.append(r.measure(f"line_sup_l1[n={n}]", line_sup_l1(F, t1, t2)))
    r.caveats.append("Green values at atoms are clipped; midpoint nodes avoid the atom locations")
    if kind == "constant":
        r.check("identically_zero", max(errs), 0.0)
        return r
    if kind == "scaled":
        prod = [e * n for e, n in zip(errs, schedule)]
        spread = (max(prod) - min(prod)) / max(prod)
        r.measure("n_times_error_spread", spread)
        r.check("error_scales_as_1_over_n", spread, 1e-9)
        return r
    for i in range(1, len(errs)):
        r.check(f"decreasing[n={schedule[i]}]", errs[i], errs[i - 1])
    r.check(f"final_below_tol[n={schedule[-1]}]", errs[-1], tol)
    return r


def _l1_rect(F, rect, h):
    x0, x1, y0, y1 = rect
    nx, ny = int(round((x1 - x0) / h)), int(round((y1 - y0) / h))
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    Z = xs[:, None] + 1j * ys[None, :]
    return float(np.sum(np.abs(F(Z))) * (x1 - x0) / nx * (y1 - y0) / ny)


def lemma4_experiment(kind: str = "abs_one_minus_half", schedule=(2, 4, 8, 16, 32, 64),
                      rect=(0.0, 2 * math.pi, 0.1, 1.0), floors=(1e-2, 1e-4), h: float = 0.01,
                      eps_moll: float = 0.2, ratio: float = 0.1) -> Report:
    """Truncated-logarithm L1 convergence and pairing convergence of ``log u_n``.

    ``kind``: ``'abs_one_minus_half'`` (``|1 - (1/2 + 1/n) e^{iz}|``),
    ``'constant'`` or ``'scaled_exp'`` (``e^{-y} (1 + 1/n)``, whose L1 gap is
    ``log(1 + 1/n)`` times the area).
    """
    def seq(n):
        if kind == "abs_one_minus_half":
            return md.Exp(md.LogAbs(md.holo((0, 1), (1, -(0.5 + 1.0 / n)))))
        if kind == "constant":
            return md.Exp(md.LogAbs(md.holo((0, 1), (1, -0.5))))
        if kind == "scaled_exp":
            return md.Scale(1 + 1.0 / n, md.Exp(md.LogAbs(md.holo((1, 1)))))
        raise md.DomainError(f"unknown sequence {kind!r}")

    u0 = (md.Exp(md.LogAbs(md.holo((1, 1)))) if kind == "scaled_exp"
          else md.Exp(md.LogAbs(md.holo((0, 1), (1, -0.5)))))
    r = Report("lem4", kind, {"schedule": list(schedule), "rect": list(rect), "floors": list(floors),
                              "h": h, "eps_mollifier": eps_moll, "ratio": ratio})
    v0 = po.log_subharmonic_check(u0, rect)
    r.measure("u0_log_subharmonic", float(v0.verdict))
    r.check("u0_log_subharmonic", float(v0.verdict), 1.0, ">=")
    yc = 0.5 * (rect[2] + rect[3])
    phi = Mollifier(min(eps_moll, 0.5 * (rect[3] - rect[2]) * 0.999), yc)
    t_list = np.linspace(rect[0] + phi.eps, rect[1] - phi.eps, 5)
    log0 = lambda z: np.log(u0(z))
    p0 = np.array([convolution_pairing(log0, phi, t) for t in t_list])
    area = (rect[1] - rect[0]) * (rect[3] - rect[2])
    series = {eps: [] for eps in floors}
    pair = []
    for n in schedule:
        un = seq(n)
        for eps in floors:
            F = lambda z, e=eps: po.log_floor(un(z), e) - po.log_floor(u0(z), e)
            series[eps].append(r.measure(f"l1_log_floor[eps={eps!r},n={n}]", _l1_rect(F, rect, h)))
        logn = lambda z: np.log(un(z))
        pn = np.array([convolution_pairing(logn, phi, t) for t in t_list])
        pair.append(r.measure(f"pairing_gap[n={n}]", float(np.max(np.abs(pn - p0)))))
    if kind == "constant":
        r.check("zero_l1", max(max(v) for v in series.values()), 0.0)
        r.check("zero_pairing", max(pair), 0.0)
        return r
    if kind == "scaled_exp":
        for eps in floors:
            for n, v in zip(schedule, series[eps]):
                r.check(f"explicit_gap[eps={eps!r},n={n}]", abs(v - math.log1p(1.0 / n) * area),
                        1e-9 * area)
    for eps in floors:
        s = series[eps]
        for i in range(1, len(s)):
            r.check(f"l1_decreasing[eps={eps!r},n={schedule[i]}]", s[i], s[i - 1])
        r.check(f"l1_ratio[eps={eps!r}]", s[-1] / s[0], ratio)
    for i in range(1, len(pair)):
        r.check(f"pairing_decreasing[n={schedule[i]}]", pair[i], pair[i - 1])
    r.check("pairing_ratio", pair[-1] / pair[0], ratio)
    return r


# ---------------------------------------------------------------------------
# orchestration


EXPERIMENTS = ("thm1", "thm2", "thm3", "thm4", "lem12", "lem4")


def jobs(which, seed: int):
    """Ordered ``(label, thunk)`` list for the selected experiments."""
    C = corpus()
    out = []
    sel = EXPERIMENTS if which == "all" else (which,)
    if "thm1" in sel:
        out.append(("thm1/cos", lambda: theorem1_experiment(
            C["cos"], [2 * math.pi, math.pi], expect={2 * math.pi: "small", math.pi: "large"})))
        out.append(("thm1/log_exp_minus_1", lambda: _thm1_found(C["log_exp_minus_1"])))
    if "thm2" in sel:
        out.append(("thm2/exp_iz", lambda: theorem2_experiment("exp_iz", md.holo((1, 1)), (0.2, 0.8),
                                                               lmax=2.0)))
        out.append(("thm2/one_minus_half", lambda: theorem2_experiment(
            "one_minus_half", md.holo((0, 1), (1, -0.5)), (0.1, 0.9))))
        out.append(("thm2/exp_iz_minus_1", lambda: theorem2_experiment(
            "exp_iz_minus_1", md.holo((1, 1), (0, -1)), (0.3, 0.9))))
        out.append(("thm2/control", lambda: negative_control(C["cos"], math.pi, 0.05)))
    if "thm3" in sel:
        for name in C:
            out.append((f"thm3/{name}", lambda it=C[name]: theorem3_experiment(it)))
    if "thm4" in sel:
        for name in ("const", "cos", "log_sin", "log_one_minus_half"):
            out.append((f"thm4/{name}", lambda it=C[name]: theorem4_experiment(it, seed=seed)))
    if "lem12" in sel:
        for kind in ("dirac_shift", "constant", "scaled", "with_harmonic"):
            out.append((f"lem12/{kind}", lambda k=kind: lemma12_experiment(k)))
    if "lem4" in sel:
        for kind in ("abs_one_minus_half", "constant", "scaled_exp"):
            out.append((f"lem4/{kind}", lambda k=kind: lemma4_experiment(k)))
    return out


def _thm1_found(item: CorpusItem, eps: float = 0.05) -> Report:
    cfg = _cfg(window=(0.0, 10.0), hx=5e-3)
    band = (-0.5, 0.5)
    found = me.find_almost_periods(item.expr, eps, ("stepanov", *band), 7.0, cfg)
    taus = _subsample(found.taus, 3)
    r = theorem1_experiment(item, taus, band=band, cfg=cfg, expect={t: (eps,) for t in taus})
    r.params["almost_period_eps"] = eps
    r.check("almost_periods_found", len(taus), 1, ">=")
    return r


def run_jobs(selected, threads: int | None = None) -> list:
    if threads is None:
        threads = int(os.environ.get("APSTRIP_THREADS", "1"))
    if threads <= 1:
        return [(label, f()) for label, f in selected]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        reps = list(ex.map(lambda j: j[1](), selected))
    return [(label, rep) for (label, _), rep in zip(selected, reps)]


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_all(which: str = "all", seed: int = 7, out: Path | str = "out", threads=None) -> list:
    """Run experiments, write one JSON per report plus ``summary.csv``; return the reports."""
    out = Path(out)
    results = run_jobs(jobs(which, seed), threads)
    lines = ["experiment,corpus_item,verdict,key_metric"]
    for label, rep in results:
        write_atomic(out / "reports" / (label.replace("/", "__") + ".json"), rep.dumps())
        lines.append(f"{rep.id},{rep.corpus},{'pass' if rep.verdict else 'fail'},{md.fmt(rep.key_metric)}")
    write_atomic(out / "summary.csv", "\n".join(lines) + "\n")
    return [rep for _, rep in results]
