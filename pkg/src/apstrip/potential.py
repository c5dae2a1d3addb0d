"""Green potentials, Riesz measures, the strip kernel and subharmonicity checks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import ndimage

from .model import DomainError, GridField, StripSpec, sample_grid

GREEN_CLIP = 1e6
FLOOR = -1e6


@dataclass(frozen=True)
class DiskSpec:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("disk radius must be positive")

    def contains(self, z, closed: bool = True, rtol: float = 1e-12):
        r = np.abs(np.asarray(z) - self.center)
        lim = self.radius * (1 + rtol)
        return r <= lim if closed else r < self.radius


# ---------------------------------------------------------------------------
# measures


@dataclass
class MeasureSpec:
    """Atoms plus an optional density (mass per unit area on grid cells).

    Density node ``(i, j)`` stands for the cell of area ``hx*hy`` centred on
    it.  ``clipped`` is the (nonpositive) mass of negative dust removed when
    the measure was built from discrete data.
    """

    atoms: tuple = ()
    density: GridField | None = None
    clipped: float = 0.0

    def __post_init__(self):
        self.atoms = tuple((complex(z), float(m)) for z, m in self.atoms)
        if any(m < 0 for _, m in self.atoms):
            raise DomainError("atom masses must be nonnegative")
        if self.density is not None and np.any(self.density.values < 0):
            raise DomainError("density must be nonnegative")

    def cells(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell centres and masses of the density part."""
        if self.density is None:
            return np.zeros(0, dtype=complex), np.zeros(0)
        d = self.density
        z = d.points().ravel()
        m = d.values.ravel() * d.hx * d.hy
        keep = m > 0
        return z[keep], m[keep]

    def point_masses(self) -> tuple[np.ndarray, np.ndarray]:
        """Atoms and density cells together as weighted points."""
        za = np.array([z for z, _ in self.atoms], dtype=complex)
        ma = np.array([m for _, m in self.atoms], dtype=float)
        zc, mc = self.cells()
        return np.concatenate((za, zc)), np.concatenate((ma, mc))

    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    def total_mass(self) -> float:
        _, m = self.cells()
        return self.atom_mass() + float(m.sum())

    def signed_total(self) -> float:
        return self.total_mass() + self.clipped

    def restrict(self, keep: Callable) -> "MeasureSpec":
        """Restriction to ``{z : keep(z)}`` (evaluated at atoms and cell centres)."""
        atoms = tuple((z, m) for z, m in self.atoms if keep(np.asarray(z)))
        density = None
        if self.density is not None:
            d = self.density
            mask = np.asarray(keep(d.points()), dtype=bool)
            density = GridField(d.x0, d.y0, d.hx, d.hy, np.where(mask, d.values, 0.0))
        return MeasureSpec(atoms, density, 0.0)

    def mass_in(self, keep: Callable) -> float:
        return self.restrict(keep).total_mass()

    def to_json(self) -> dict:
        out = {"atoms": [{"z": [z.real, z.imag], "mass": m} for z, m in self.atoms]}
        if self.density is not None:
            d = self.density
            out["density"] = {"x0": d.x0, "y0": d.y0, "hx": d.hx, "hy": d.hy,
                              "values": d.values.tolist()}
        if self.clipped:
            out["clipped"] = self.clipped
        return out

    @classmethod
    def from_json(cls, obj) -> "MeasureSpec":
        atoms = tuple((complex(a["z"][0], a["z"][1]), a["mass"]) for a in obj.get("atoms", []))
        density = None
        if obj.get("density"):
            d = obj["density"]
            density = GridField(d["x0"], d["y0"], d["hx"], d["hy"], np.array(d["values"], dtype=float))
        return cls(atoms, density, obj.get("clipped", 0.0))


def measure_difference(mu: MeasureSpec, nu: MeasureSpec) -> tuple[MeasureSpec, MeasureSpec]:
    """``mu - nu`` as the pair ``(mu, nu)``; its total variation is at most the sum of masses."""
    return mu, nu


# ---------------------------------------------------------------------------
# Green potential of a disk


def _log_rect_primitive(x, y):
    # F with d2F/dxdy = log sqrt(x^2 + y^2)
    r2 = x * x + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(r2 > 0, x * y * np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        t2 = np.where(x != 0, x * x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
        t3 = np.where(y != 0, y * y * np.arctan(x / np.where(y != 0, y, 1.0)), 0.0)
    return 0.5 * (t1 - 3 * x * y + t2 + t3)


def log_rect_integral(a1, a2, b1, b2):
    """``int_{a1}^{a2} int_{b1}^{b2} log sqrt(x^2+y^2) dy dx`` in closed form."""
    F = _log_rect_primitive
    return F(a2, b2) - F(a1, b2) - F(a2, b1) + F(a1, b1)


def _green_kernel(z, zeta, disk: DiskSpec):
    R = disk.radius
    zc, wc = z - disk.center, zeta - disk.center
    with np.errstate(divide="ignore"):
        return np.log(np.abs(R * R - zc * np.conj(wc)) / R) - np.log(np.abs(z - zeta))


def green_potential(mu: MeasureSpec, disk: DiskSpec, z, chunk: int = 4_000_000):
    """``G^mu(z) = int log |R^2 - z conj(zeta)| / (R |z - zeta|) dmu(zeta)`` for the disk.

    Atoms use the closed form; density cells use the midpoint rule except the
    cell containing ``z``, where ``log 1/|z - zeta|`` is integrated exactly.
    Values at atoms are clipped to ``GREEN_CLIP``.  Mass outside the closed
    disk is ignored with a warning.
    """
    zz = np.asarray(z, dtype=complex)
    scalar = zz.ndim == 0
    zz = np.atleast_1d(zz).ravel()
    if not np.all(disk.contains(zz)):
        raise DomainError("z outside the closed disk")
    out = np.zeros(zz.shape)
    inside = lambda w: disk.contains(w)
    outside = [a for a in mu.atoms if not inside(a[0])]
    if outside:
        warnings.warn(f"{len(outside)} atoms outside the disk ignored", stacklevel=2)
    for zeta, m in mu.atoms:
        if m > 0 and inside(zeta):
            out += m * _green_kernel(zz, zeta, disk)
    if mu.density is not None:
        d = mu.density
        zc, mc = mu.cells()
        keep = inside(zc)
        if not np.all(keep):
            warnings.warn("density outside the disk ignored", stacklevel=2)
            zc, mc = zc[keep], mc[keep]
        if len(zc):
            step = max(1, chunk // len(zc))
            d_center = disk.center
            for s in range(0, len(zz), step):
                zt = zz[s:s + step, None]
                K = _green_kernel(zt, zc[None, :], disk)
                dx = zt.real - zc.real[None, :]
                dy = zt.imag - zc.imag[None, :]
                sing = (np.abs(dx) <= d.hx / 2) & (np.abs(dy) <= d.hy / 2)
                if sing.any():
                    ii, jj = np.nonzero(sing)
                    ddx, ddy = dx[ii, jj], dy[ii, jj]
                    # cell relative to z: [-dx - hx/2, -dx + hx/2] x ...
                    logint = log_rect_integral(-ddx - d.hx / 2, -ddx + d.hx / 2,
                                               -ddy - d.hy / 2, -ddy + d.hy / 2)
                    za, wa = zt[ii, 0] - d_center, zc[jj] - d_center
                    reg = np.log(np.abs(disk.radius ** 2 - za * np.conj(wa)) / disk.radius)
                    K[ii, jj] = reg - logint / (d.hx * d.hy)
                out[s:s + step] += np.nan_to_num(K, posinf=GREEN_CLIP) @ mc
    out = np.minimum(np.nan_to_num(out, posinf=GREEN_CLIP), GREEN_CLIP)
    return float(out[0]) if scalar else out.reshape(np.shape(z))


# ---------------------------------------------------------------------------
# Riesz measure of sampled data


def discrete_laplacian(u: GridField) -> np.ndarray:
    """5-point Laplacian on interior nodes, shape ``(nx-2, ny-2)``."""
    V = u.values
    with np.errstate(invalid="ignore"):
        return ((V[2:, 1:-1] - 2 * V[1:-1, 1:-1] + V[:-2, 1:-1]) / u.hx ** 2
                + (V[1:-1, 2:] - 2 * V[1:-1, 1:-1] + V[1:-1, :-2]) / u.hy ** 2)


def _flux_mass(V, A, hx, hy):
    # sum over edges (q in A, q' not in A) of the outward differences
    tot = 0.0
    for axis, wgt in ((0, hy / hx), (1, hx / hy)):
        for sh in (1, -1):
            # nodes outside A whose neighbour in direction -sh lies in A
            edge = np.roll(A, sh, axis=axis) & ~A
            Vq = np.roll(V, sh, axis=axis)
            tot += wgt * float(np.sum((V - Vq)[edge]))
    return tot / (2 * math.pi)


def riesz_measure(u: GridField, atom_threshold: float = 0.5, plateau: int = 8) -> MeasureSpec:
    """``(1/2pi) Laplacian u`` from samples.

    Interior nodes carry the 5-point Laplacian as density.  Around ``-inf``
    sentinels, and around nodes whose cell mass exceeds ``atom_threshold``,
    a plateau (the seed dilated by ``plateau`` nodes) is collapsed into an
    atom whose mass is the pairing of ``u`` with the discrete Laplacian of
    the plateau's indicator, i.e. the discrete flux of ``u`` through its
    boundary.  The 5-point stencil leaves sign-alternating dust around a
    logarithmic pole that decays like ``r**-4``; a wide plateau absorbs it
    (the flux error of ``log|z|`` is about ``0.05 / plateau**2``).
    Negative dust is clipped and its mass stored in ``clipped``.
    """
    V = u.values
    nx, ny = V.shape
    if nx < 3 or ny < 3:
        raise DomainError("riesz_measure needs at least a 3x3 grid")
    sentinel = np.isneginf(V)
    if sentinel.all():
        raise DomainError("grid holds only -inf sentinels")
    lap = discrete_laplacian(u)
    cell = np.full(V.shape, np.nan)
    cell[1:-1, 1:-1] = lap * u.hx * u.hy / (2 * math.pi)
    seeds = sentinel | (np.isfinite(cell) & (np.abs(np.nan_to_num(cell)) > atom_threshold))
    plateau = ndimage.binary_dilation(seeds, structure=np.ones((3, 3), bool), iterations=plateau)
    labels, n_comp = ndimage.label(plateau, structure=np.ones((3, 3), bool))
    xs, ys = u.xs, u.ys
    atoms = []
    dropped = 0
    Vf = np.where(sentinel, 0.0, V)
    for k in range(1, n_comp + 1):
        A = labels == k
        ii, jj = np.nonzero(A)
        if ii.min() == 0 or jj.min() == 0 or ii.max() == nx - 1 or jj.max() == ny - 1:
            dropped += 1
            continue
        mass = _flux_mass(Vf, A, u.hx, u.hy)
        si, sj = np.nonzero(A & seeds)
        loc = complex(xs[si].mean(), ys[sj].mean())
        atoms.append((loc, mass))
    if dropped:
        warnings.warn(f"{dropped} singular clusters touch the grid edge and were dropped", stacklevel=2)
    interior = np.where(plateau, 0.0, np.nan_to_num(cell, nan=0.0, posinf=0.0, neginf=0.0))[1:-1, 1:-1]
    clipped = float(interior[interior < 0].sum())
    clipped += float(sum(m for _, m in atoms if m < 0))
    atoms = [(z, m) for z, m in atoms if m > 0]
    dens = np.maximum(interior, 0.0) / (u.hx * u.hy)
    density = GridField(u.x0 + u.hx, u.y0 + u.hy, u.hx, u.hy, dens)
    return MeasureSpec(tuple(atoms), density, clipped)


@dataclass
class RieszDecomposition:
    """``u = -G + H`` on the grid nodes of the disk; ``nan`` outside it."""

    green: GridField
    harmonic: GridField
    measure: MeasureSpec
    inside: np.ndarray

    def harmonic_interpolant(self):
        """Bicubic interpolant of ``H`` usable by :func:`submean_check`."""
        from scipy.interpolate import RegularGridInterpolator

        H = self.harmonic
        vals = np.where(np.isfinite(H.values), H.values, 0.0)
        f = RegularGridInterpolator((H.xs, H.ys), vals, method="cubic", bounds_error=False)
        return lambda z: f(np.stack([np.real(z).ravel(), np.imag(z).ravel()], -1)).reshape(np.shape(z))


def riesz_decomposition(u, disk: DiskSpec, h: float, strip: StripSpec | None = None,
                        drop: float = 1e-12) -> RieszDecomposition:
    """Split ``u`` on ``disk`` into its Green potential and harmonic majorant.

    Density cells with mass below ``drop`` are left out of the Green sum.
    """
    c, R = complex(disk.center), disk.radius
    if strip is not None and not (strip.y_low < c.imag - R and c.imag + R < strip.y_high):
        raise DomainError("disk closure leaves the strip")
    grid = sample_grid(u, (c.real - R, c.real + R, c.imag - R, c.imag + R), h, h)
    mu = riesz_measure(grid).restrict(lambda z: disk.contains(z))
    if mu.density is not None and drop > 0:
        d = mu.density
        mu = MeasureSpec(mu.atoms, GridField(d.x0, d.y0, d.hx, d.hy,
                                             np.where(d.values * d.hx * d.hy > drop, d.values, 0.0)))
    pts = grid.points()
    inside = disk.contains(pts)
    G = np.full(pts.shape, np.nan)
    G[inside] = green_potential(mu, disk, pts[inside])
    H = np.where(np.isneginf(grid.values), np.nan, grid.values + G)
    return RieszDecomposition(GridField(grid.x0, grid.y0, h, h, G),
                              GridField(grid.x0, grid.y0, h, h, H), mu, inside)


# ---------------------------------------------------------------------------
# strip kernel


def gamma_bound(strip: StripSpec) -> float:
    """Upper bound ``pi / width**2`` for the admissible kernel parameter."""
    return math.pi / strip.width ** 2


@dataclass(frozen=True)
class StripKernelSpec:
    gamma: float
    strip: StripSpec

    def __post_init__(self):
        if not (0 < self.gamma < gamma_bound(self.strip)):
            raise DomainError(f"gamma={self.gamma} not in (0, {gamma_bound(self.strip)})")


def strip_kernel(spec: StripKernelSpec, w):
    """``K(w) = (1/2) log |exp(-gamma w^2) - 1|``; ``-inf`` at ``w = 0``."""
    w = np.asarray(w, dtype=complex)
    with np.errstate(divide="ignore"):
        out = 0.5 * np.log(np.abs(np.expm1(-spec.gamma * w * w)))
    return float(out) if out.ndim == 0 else out


def kernel_upper_bound(spec: StripKernelSpec) -> float:
    """Bound for ``K(w)`` when ``|Im w|`` is at most the strip width."""
    return 0.5 * math.log1p(math.exp(spec.gamma * spec.strip.width ** 2))


def kernel_split(spec: StripKernelSpec, N: float, w):
    """``K = K1 + K2`` with ``K1 = max(K, -2 log N)`` and ``K2 = min(K + 2 log N, 0)``."""
    if not N > 1:
        raise DomainError("N must exceed 1")
    K = np.asarray(strip_kernel(spec, w))
    K1 = np.maximum(K, -2 * math.log(N))
    K2 = K - K1
    if K.ndim == 0:
        return float(K1), float(K2)
    return K1, K2


def split_radius(spec: StripKernelSpec, N: float, directions: int = 32) -> float:
    """``sup{|w| : K2(w) < 0}`` by bisection along rays."""
    level = -2 * math.log(N)
    best = 0.0
    for th in np.arange(directions) * (2 * math.pi / directions):
        e = complex(math.cos(th), math.sin(th))
        hi = 1.0 / (N * N * math.sqrt(spec.gamma))
        while strip_kernel(spec, hi * e) < level:
            hi *= 2
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if strip_kernel(spec, mid * e) < level:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * hi:
                break
        best = max(best, hi)
    return best


@dataclass(frozen=True)
class YProfile:
    """Smooth test function of ``y``: 1 on ``[lo, hi]``, 0 outside ``[lo-margin, hi+margin]``."""

    lo: float
    hi: float
    margin: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        d = np.maximum(self.lo - y, y - self.hi) / self.margin  # <=0 inside plateau
        out = np.zeros(y.shape)
        inner = d <= 0
        band = (d > 0) & (d < 1)
        t = d[band]
        a = np.exp(-1 / (1 - t))
        b = np.exp(-1 / t)
        out[inner] = 1.0
        out[band] = a / (a + b)
        return out

    @property
    def support(self):
        return (self.lo - self.margin, self.hi + self.margin)


def column_mass_bound(mu: MeasureSpec, phi) -> float:
    """``max_n`` of the ``phi``-weighted mass of ``[n, n+1) x Im S``."""
    z, m = mu.point_masses()
    if not len(z):
        return 0.0
    wm = m * phi(z.imag)
    cols = np.floor(z.real).astype(np.int64)
    _, inv = np.unique(cols, return_inverse=True)
    return float(np.max(np.bincount(inv, weights=wm)))


def truncation_width(spec: StripKernelSpec, C: float, tol: float, safety: float = 10.0) -> float:
    """Smallest integer-step ``W`` whose Gaussian tail bound is at most ``tol/safety``."""
    g, d2 = spec.gamma, spec.strip.width ** 2
    W = 1.0
    while True:
        q = math.exp(g * d2 - g * W * W)
        tail = 2 * C * q / (1 - math.exp(-2 * g * W)) if q <= 0.5 else math.inf
        if tail * safety <= tol:
            return W
        W += 0.25
        if W > 1e4:
            raise DomainError("tail bound cannot reach the tolerance")


def strip_potential(mu: MeasureSpec, spec: StripKernelSpec, phi, z, tol: float = 1e-10):
    """``V(z) = int K(w - z) phi(Im w) dmu(w)``, truncated to ``|Re(w - z)| <= W``.

    ``W`` comes from the Gaussian decay of the kernel and the largest
    ``phi``-weighted unit-column mass of ``mu``, with safety factor 10.
    """
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    w, m = mu.point_masses()
    wm = m * phi(w.imag)
    keep = wm != 0
    w, wm = w[keep], wm[keep]
    C = column_mass_bound(mu, phi)
    W = truncation_width(spec, C, tol) if C > 0 else 0.0
    out = np.zeros(zz.shape)
    for i, zi in enumerate(zz):
        near = np.abs(w.real - zi.real) <= W
        K = strip_kernel(spec, w[near] - zi)
        out[i] = float(np.dot(np.atleast_1d(K), wm[near]))
    return float(out[0]) if np.ndim(z) == 0 else out.reshape(np.shape(z))


# ---------------------------------------------------------------------------
# sub-mean-value checks


@dataclass
class SubmeanResult:
    center: complex
    radius: float
    circle_mean: float
    center_value: float
    nodes: int
    passed: bool
    skipped: bool = False

    @property
    def deficit(self) -> float:
        """``circle_mean - center_value``; negative means the inequality is violated."""
        return self.circle_mean - self.center_value


@dataclass
class SubmeanSummary:
    results: list
    tol: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results if not r.skipped)

    @property
    def skipped(self) -> int:
        return sum(r.skipped for r in self.results)

    @property
    def min_deficit(self) -> float:
        vals = [r.deficit for r in self.results
                if not r.skipped and np.isfinite(r.center_value)]
        return float(min(vals)) if vals else math.inf


def _in_domain(domain, pts) -> bool:
    if domain is None:
        return True
    if isinstance(domain, StripSpec):
        return domain.contains(np.imag(pts))
    if isinstance(domain, tuple):
        y = np.imag(pts)
        return bool(np.all((y >= domain[0]) & (y <= domain[1])))
    return bool(np.all(domain(pts)))


def circle_mean(u, z0: complex, rho: float, tol: float, min_nodes: int = 256,
                max_nodes: int = 65536) -> tuple[float, int]:
    """Periodic trapezoid mean of ``u`` on the circle; node count doubles until stable."""
    n = min_nodes
    prev = None
    while True:
        th = 2 * np.pi * np.arange(n) / n
        vals = np.asarray(u(z0 + rho * np.exp(1j * th)), dtype=float)
        m = float(vals.mean())
        if prev is not None and (abs(m - prev) < tol / 10 or n >= max_nodes):
            return m, n
        if not np.isfinite(m):
            return m, n
        prev = m
        n *= 2


def submean_check(u, centers, radii, tol: float = 1e-6, domain=None, paired: bool = False,
                  min_nodes: int = 256) -> SubmeanSummary:
    """Check ``circle_mean >= u(z0) - tol`` for every (center, radius).

    Without ``paired`` every center is combined with every radius.
    ``domain`` (a :class:`StripSpec`, ``(y_lo, y_hi)`` or predicate) marks
    circles leaving it as skipped.  ``-inf`` centers pass vacuously.
    """
    centers = np.atleast_1d(np.asarray(centers, dtype=complex))
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    pairs = zip(centers, radii) if paired else ((c, r) for c in centers for r in radii)
    out = []
    probe = np.exp(2j * np.pi * np.arange(64) / 64)
    for z0, rho in pairs:
        z0, rho = complex(z0), float(rho)
        if not _in_domain(domain, z0 + rho * probe):
            out.append(SubmeanResult(z0, rho, math.nan, math.nan, 0, True, True))
            continue
        c = float(np.asarray(u(np.array([z0])), dtype=float)[0])
        if c == -math.inf:
            out.append(SubmeanResult(z0, rho, math.nan, c, 0, True))
            continue
        m, n = circle_mean(u, z0, rho, tol, min_nodes)
        out.append(SubmeanResult(z0, rho, m, c, n, bool(m >= c - tol)))
    return SubmeanSummary(out, tol)


def log_floor(u_vals, eps: float):
    """``l_eps(t) = log max(eps, t)``."""
    return np.log(np.maximum(eps, u_vals))


@dataclass
class LogSubharmonicVerdict:
    verdict: bool
    levels: dict
    itself: SubmeanSummary


def log_subharmonic_check(u, region, tol: float = 1e-6, levels=(1e-2, 1e-4, 1e-6),
                          radius: float | None = None, n: int = 5) -> LogSubharmonicVerdict:
    """Sub-mean checks of ``log max(eps, u)`` for each floor, and of ``u`` itself.

    Centers form an ``n x n`` grid in ``region = (x0, x1, y0, y1)`` shrunk by
    the radius, so every circle stays inside the region.
    """
    x0, x1, y0, y1 = map(float, region)
    if radius is None:
        radius = min(x1 - x0, y1 - y0) / 4
    xs = np.linspace(x0 + radius, x1 - radius, n)
    ys = np.linspace(y0 + radius, y1 - radius, n)
    centers = (xs[:, None] + 1j * ys[None, :]).ravel()

    def checked(z):
        v = np.asarray(u(z), dtype=float)
        if np.any(v < 0):
            raise DomainError("negative sample of a function required to be nonnegative")
        return v

    per = {}
    for eps in levels:
        per[eps] = submean_check(lambda z, e=eps: log_floor(checked(z), e), centers, [radius], tol)
    itself = submean_check(checked, centers, [radius], tol)
    ok = all(s.passed for s in per.values()) and itself.passed
    return LogSubharmonicVerdict(ok, per, itself)


# ---------------------------------------------------------------------------
# modulus transfer


def continuity_modulus_delta(phi, eps: float, measure_K: float, interval=(-1.0, 1.0),
                             sup_phi: float | None = None, n_grid: int = 20001) -> float:
    """L1 closeness ``delta`` that makes ``int_K |phi(f) - phi(g)| < eps``.

    Picks ``tau`` with ``omega_phi(tau) < eps / (2 m(K))`` from the sampled
    modulus of continuity (halved as a margin for the sampling) and returns
    ``tau * eps / (4 sup|phi| + 1)``.  A constant ``phi`` gives ``inf``.
    """
    if not eps > 0 or not measure_K > 0:
        raise DomainError("eps and m(K) must be positive")
    a, b = map(float, interval)
    t = np.linspace(a, b, n_grid)
    v = np.asarray(phi(t), dtype=float)
    if sup_phi is None:
        sup_phi = float(np.max(np.abs(v)))
    target = eps / (2 * measure_K)

    def omega(k):
        if k == 0:
            return 0.0
        size = k + 1
        mx = ndimage.maximum_filter1d(v, size, mode="nearest")
        mn = ndimage.minimum_filter1d(v, size, mode="nearest")
        return float(np.max(mx - mn))

    if omega(n_grid - 1) < target:
        return math.inf
    lo, hi = 0, n_grid - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if omega(mid) < target:
            lo = mid
        else:
            hi = mid
    s = (b - a) / (n_grid - 1)
    tau = 0.5 * lo * s
    return tau * eps / (4 * sup_phi + 1)
