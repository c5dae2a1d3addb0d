"""Mean values, Fourier-Bohr coefficients, spectra and Bochner-Fejer sums.

Means along a line ``Im z = y`` are computed over windows ``[-T, T]`` with
``T`` doubling from ``2*pi``.  The default weight is the smooth window
``cos(pi x / 2T)**8``: its leakage between frequencies a distance ``d`` apart
decays like ``(d T)**-9``, whereas the plain box average leaks like
``1/(d T)``.  ``window='box'`` gives the literal ``(1/2T) int_{-T}^{T}``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import DomainError, ExpSum, FunctionExpr, InterpProfile, StripSpec, fmt

T0 = 2 * math.pi
TMAX_DEFAULT = 200 * math.pi
HANN_POWER = 4
FLOOR = -1e6
MAX_ORDER = 10


@dataclass
class MeanValueResult:
    value: complex
    T_final: float
    history: list
    converged: bool
    clipped: int = 0


@dataclass
class _LineMeans:
    values: np.ndarray
    T_final: float
    history: list
    converged: bool
    clipped: int


def _weights(x, T, window):
    if window == "box":
        return np.ones_like(x)
    if window == "hann":
        return np.cos(np.pi * x / (2 * T)) ** (2 * HANN_POWER)
    raise DomainError(f"unknown window {window!r}")


def line_means(u, y: float, lams, tol: float = 1e-4, tmax: float = TMAX_DEFAULT, *,
               window: str = "hann", hx: float = 1e-3, strip: StripSpec | None = None) -> _LineMeans:
    """Means of ``u(x+iy) exp(-i lam x)`` for every ``lam`` in ``lams``, jointly.

    Samples are shared across frequencies and across the doubling levels; the
    iteration stops when every mean changed by at most ``tol*(1+|mean|)``.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    if strip is not None and not strip.contains(y):
        raise DomainError(f"y={y} outside the strip")
    if not tol > 0:
        raise DomainError("tol must be positive")
    if tmax < T0:
        raise DomainError(f"tmax must be at least {T0}")
    lam_top = float(np.max(np.abs(lams))) if len(lams) else 0.0
    h = min(hx, 2 * math.pi / (10 * (1 + lam_top)))
    n0 = math.ceil(T0 / h)
    h = T0 / n0

    def sample(a, n):
        x = a + (np.arange(n) + 0.5) * h
        v = np.asarray(u(x + 1j * y), dtype=float)
        low = v < FLOOR
        c = int(np.count_nonzero(low))
        if c:
            v = np.where(low, FLOOR, v)
        return x, v, c

    x, v, clipped = sample(-T0, 2 * n0)
    T = T0
    history, prev, converged = [], None, False
    while True:
        w = _weights(x, T, window)
        uw = v * w
        sw = w.sum()
        vals = np.array([np.dot(uw, np.exp(-1j * lam * x)) if lam != 0 else uw.sum() for lam in lams]) / sw
        history.append((T, vals.copy()))
        if prev is not None and np.all(np.abs(vals - prev) <= tol * (1 + np.abs(vals))):
            converged = True
            break
        if 2 * T > tmax:
            break
        prev = vals
        nn = int(round(T / h))
        xl, vl, cl = sample(-2 * T, nn)
        xr, vr, cr = sample(T, nn)
        x = np.concatenate((xl, x, xr))
        v = np.concatenate((vl, v, vr))
        clipped += cl + cr
        T *= 2
    return _LineMeans(vals, T, history, converged, clipped)


def mean_value(u, y: float, tol: float = 1e-4, tmax: float = TMAX_DEFAULT, **kw) -> MeanValueResult:
    """``M(u, y)``, the mean of ``u`` along the line ``Im z = y``."""
    r = line_means(u, y, [0.0], tol, tmax, **kw)
    return MeanValueResult(complex(r.values[0]), r.T_final,
                           [(T, complex(v[0])) for T, v in r.history], r.converged, r.clipped)


def fourier_coefficient(u, lam: float, y: float, tol: float = 1e-4, tmax: float = TMAX_DEFAULT,
                        **kw) -> complex:
    """``a_lam(u, y) = M(u exp(-i lam x), y)``."""
    return complex(line_means(u, y, [lam], tol, tmax, **kw).values[0])


@dataclass
class CoefficientTable:
    """``values[i, j] = a_{lams[i]}(u, ys[j])``."""

    lams: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    converged: np.ndarray = field(default=None)

    def column(self, lam: float, atol: float = 1e-9) -> np.ndarray:
        i = np.flatnonzero(np.abs(self.lams - lam) <= atol)
        if not len(i):
            raise KeyError(lam)
        return self.values[i[0]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "y", "re", "im"])
        for i, lam in enumerate(self.lams):
            for j, y in enumerate(self.ys):
                a = self.values[i, j]
                w.writerow([fmt(lam), fmt(y), fmt(a.real), fmt(a.imag)])
        return buf.getvalue()


def coefficient_table(u, lams, ys, tol: float = 1e-4, tmax: float = TMAX_DEFAULT, **kw) -> CoefficientTable:
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    vals = np.empty((len(lams), len(ys)), dtype=complex)
    conv = np.empty(len(ys), dtype=bool)
    for j, y in enumerate(ys):
        r = line_means(u, y, lams, tol, tmax, **kw)
        vals[:, j] = r.values
        conv[j] = r.converged
    return CoefficientTable(lams, ys, vals, conv)


@dataclass
class ProfileColumn:
    lam: float
    ys: np.ndarray
    values: np.ndarray
    modulus: float
    converged: bool


def continuity_modulus(values) -> float:
    """``max_j |a(y_{j+1}) - a(y_j)|``; zero for fewer than two samples."""
    values = np.asarray(values)
    if len(values) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(values))))


def coefficient_profile(u, lam: float, ys, tol: float = 1e-4, tmax: float = TMAX_DEFAULT, **kw) -> ProfileColumn:
    """Samples of ``y -> a_lam(u, y)`` and their empirical continuity modulus."""
    t = coefficient_table(u, [lam], ys, tol, tmax, **kw)
    col = t.values[0]
    return ProfileColumn(float(lam), t.ys, col, continuity_modulus(col), bool(np.all(t.converged)))


# ---------------------------------------------------------------------------
# spectra


def lattice_candidates(basis, max_order: int, lam_max: float | None = None) -> np.ndarray:
    """Distinct ``sum_j n_j basis_j`` with ``|n_j| <= max_order`` (and ``|lam| <= lam_max``)."""
    basis = np.asarray(basis, dtype=float)
    if len(basis) == 0:
        return np.array([0.0])
    rng = range(-max_order, max_order + 1)
    out = {}
    for ns in itertools.product(rng, repeat=len(basis)):
        lam = float(np.dot(ns, basis))
        if lam_max is not None and abs(lam) > lam_max + 1e-12:
            continue
        out.setdefault(round(lam, 10), lam)
    return np.array(sorted(out.values()))


def spectrum_scan(u, candidates, y_probes, threshold: float, tol: float = 1e-6,
                  tmax: float = TMAX_DEFAULT, **kw) -> list:
    """Candidates whose coefficient exceeds ``threshold`` in modulus on some probe line."""
    t = coefficient_table(u, candidates, y_probes, tol, tmax, **kw)
    peak = np.max(np.abs(t.values), axis=1)
    return [float(lam) for lam, p in zip(t.lams, peak) if p > threshold]


def periodogram_candidates(u, y: float, lam_max: float, threshold: float, T: float = 64 * math.pi,
                           h: float | None = None) -> list:
    """Peaks of ``|a_lam(u, y)|`` for ``|lam| <= lam_max``, refined by local maximization.

    The windowed line transform is evaluated on a padded FFT grid; each peak
    above ``threshold`` is refined by golden-section search on the direct sum.
    """
    from .metrics import _golden

    if h is None:
        h = min(0.05, math.pi / (4 * (lam_max + 1)))
    n = int(round(2 * T / h))
    x = -T + (np.arange(n) + 0.5) * h
    v = np.asarray(u(x + 1j * y), dtype=float)
    v = np.where(v < FLOOR, FLOOR, v)
    w = _weights(x, T, "hann")
    uw, sw = v * w, w.sum()
    pad = 8 * n
    spec = np.fft.fft(uw, pad)
    freqs = 2 * np.pi * np.fft.fftfreq(pad, d=h)
    # phase of the first sample: sum uw_k exp(-i lam x_k) = exp(-i lam x_0) * fft
    mag = np.abs(spec) / sw
    order = np.argsort(freqs)
    freqs, mag = freqs[order], mag[order]
    keep = np.abs(freqs) <= lam_max
    freqs, mag = freqs[keep], mag[keep]

    def direct(lam):
        return -abs(np.dot(uw, np.exp(-1j * lam * x)) / sw)

    out = []
    dl = freqs[1] - freqs[0]
    for i in range(1, len(mag) - 1):
        if mag[i] > threshold and mag[i] >= mag[i - 1] and mag[i] > mag[i + 1]:
            lam, val = _golden(direct, freqs[i] - dl, freqs[i] + dl, 1e-10)
            if -val > threshold:
                out.append(float(lam))
    return sorted(out)


def rational_basis(freqs, tol: float = 1e-9, max_den: int = 64) -> list:
    """Greedy basis over the rationals, scanning frequencies by increasing magnitude.

    A frequency joins the basis unless it is a combination with rational
    coefficients (denominators up to ``max_den``) of the current basis.
    """
    basis: list[float] = []
    for lam in sorted({abs(float(f)) for f in freqs if abs(f) > tol}):
        if basis and _rational_coords(lam, basis, tol, max_den) is not None:
            continue
        basis.append(lam)
    return basis


def _rational_coords(lam, basis, tol, max_den):
    B = np.asarray(basis, dtype=float)[None, :]
    # enumerate small-denominator combinations for one or two basis elements,
    # least squares is ill-posed for a single equation in several unknowns
    if len(basis) == 1:
        c = Fraction(lam / basis[0]).limit_denominator(max_den)
        if abs(float(c) * basis[0] - lam) <= tol * (1 + abs(lam)):
            return (c,)
        return None
    for head in itertools.product(range(-max_den, max_den + 1), repeat=len(basis) - 1):
        rest = lam - float(np.dot(head, B[0, :-1]))
        c = Fraction(rest / basis[-1]).limit_denominator(max_den)
        if abs(float(c) * basis[-1] - rest) <= tol * (1 + abs(lam)):
            return tuple(Fraction(h) for h in head) + (c,)
    return None


# ---------------------------------------------------------------------------
# Bessel inequality


@dataclass
class BesselResult:
    deficit: float
    mean_square: float
    coefficient_power: float
    converged: bool


def bessel_check(u, y: float, lams, tol: float = 1e-8, tmax: float = TMAX_DEFAULT, **kw) -> BesselResult:
    """``M(|u|^2, y) - sum |a_lam(u, y)|^2`` over the distinct ``lams``."""
    lams = np.unique(np.asarray(lams, dtype=float))
    sq = mean_value(lambda z: np.asarray(u(z), dtype=float) ** 2, y, tol, tmax, **kw)
    r = line_means(u, y, lams, tol, tmax, **kw)
    power = float(np.sum(np.abs(r.values) ** 2))
    ms = float(sq.value.real)
    return BesselResult(ms - power, ms, power, sq.converged and r.converged)


# ---------------------------------------------------------------------------
# Bochner-Fejer sums


@dataclass
class BochnerFejerSpec:
    """Product-of-Fejer multipliers over the frequency module ``sum_j (p_j/m!) basis_j``.

    ``k(p) = prod_j max(0, 1 - |p_j| / (width + 1))``; the default width
    ``m*m!`` follows the build contract, ``width=(m!)**2`` is the classical
    Bochner-Fejer order.
    """

    basis: tuple
    m: int
    width: int

    @property
    def denom(self) -> int:
        return math.factorial(self.m)

    def k(self, p) -> float:
        out = 1.0
        for pj in p:
            out *= max(0.0, 1.0 - abs(pj) / (self.width + 1))
        return out

    def coords(self, lam: float, tol: float = 1e-9):
        """Integer ``p`` with ``lam = sum (p_j/m!) basis_j``, or ``None``."""
        if not self.basis:
            return () if abs(lam) <= tol else None
        c = _rational_coords(abs(lam), list(self.basis), tol, 64) if lam != 0 else (Fraction(0),) * len(self.basis)
        if c is None:
            return None
        sign = 1 if lam >= 0 else -1
        p = []
        for cj in c:
            q = cj * self.denom
            if q.denominator != 1:
                return None
            p.append(sign * int(q))
        return tuple(p)

    def multiplier(self, lam: float) -> float:
        p = self.coords(lam)
        if p is None:
            raise DomainError(f"frequency {lam} is not in the module of order {self.m}")
        return self.k(p)

    def entries(self, limit: int = 2_000_000) -> list:
        """All ``(p, lam, k)`` with ``k > 0``."""
        n = (2 * self.width + 1) ** len(self.basis)
        if n > limit:
            raise DomainError(f"{n} multipliers exceed the enumeration limit {limit}")
        rng = range(-self.width, self.width + 1)
        out = []
        for p in itertools.product(rng, repeat=len(self.basis)):
            k = self.k(p)
            if k > 0:
                lam = float(sum(pj * b for pj, b in zip(p, self.basis)) / self.denom)
                out.append((p, lam, k))
        return out

    def to_json(self) -> dict:
        return {"basis": list(self.basis), "m": self.m, "width": self.width,
                "multipliers": [{"p": list(p), "lambda": lam, "k": k} for p, lam, k in self.entries()]}


def bochner_fejer_multipliers(basis, m: int, width: int | None = None) -> BochnerFejerSpec:
    if not (isinstance(m, int) and m >= 1):
        raise DomainError("order m must be an integer >= 1")
    if m > MAX_ORDER:
        raise DomainError(f"order {m} exceeds the guard m <= {MAX_ORDER}")
    if width is None:
        width = m * math.factorial(m)
    return BochnerFejerSpec(tuple(float(b) for b in basis), m, int(width))


def bochner_fejer_sum(u, spec: BochnerFejerSpec, ys, spectrum=None, table: CoefficientTable | None = None,
                      tol: float = 1e-6, tmax: float = TMAX_DEFAULT, kind: str = "spline", **kw) -> ExpSum:
    """Exponential sum ``sum k_lam a_lam(u, y) exp(i lam x)``.

    Coefficient profiles are sampled on ``ys`` and interpolated (``kind`` is
    ``'spline'`` or ``'linear'``).  With ``spectrum`` given only its members
    are summed; otherwise every frequency with a positive multiplier is.
    """
    ys = np.asarray(ys, dtype=float)
    if spectrum is None:
        pairs = [(lam, k) for _, lam, k in spec.entries()]
    else:
        pairs = []
        for lam in spectrum:
            p = spec.coords(lam)
            if p is not None and spec.k(p) > 0:
                pairs.append((float(lam), spec.k(p)))
    if not pairs:
        return ExpSum(((0.0, InterpProfile(tuple(ys[:1]), (0j,))),))
    lams = np.array([lam for lam, _ in pairs])
    if table is None:
        table = coefficient_table(u, lams, ys, tol, tmax, **kw)
    if kind == "spline" and len(ys) < 4:
        kind = "linear"
    terms, seen = [], set()
    for lam, k in pairs:
        key = round(lam, 10)
        if key in seen:
            continue
        seen.add(key)
        col = table.column(lam)
        terms.append((lam, InterpProfile(tuple(ys), tuple(k * col), kind)))
    return ExpSum(tuple(terms))
