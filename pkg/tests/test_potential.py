import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from apstrip import model as md
from apstrip import potential as po
from conftest import abs_z_squared, log_exp_minus_1

UNIT = po.DiskSpec(0j, 1.0)
DELTA0 = po.MeasureSpec(((0j, 1.0),))


def _grid(f, rect, h):
    x0, x1, y0, y1 = rect
    xs = x0 + np.arange(int(round((x1 - x0) / h)) + 1) * h
    ys = y0 + np.arange(int(round((y1 - y0) / h)) + 1) * h
    with np.errstate(divide="ignore"):
        return md.GridField(x0, y0, h, h, f(xs[:, None] + 1j * ys[None, :]))


# ---------------------------------------------------------------------------
# Green potential


def test_green_of_dirac(rng):
    z = 0.9 * np.sqrt(rng.uniform(0, 1, 200)) * np.exp(2j * np.pi * rng.uniform(0, 1, 200))
    np.testing.assert_allclose(po.green_potential(DELTA0, po.DiskSpec(0j, 2.0), z), np.log(2 / np.abs(z)), atol=1e-12)


def test_green_vanishes_on_boundary():
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 50))
    assert np.max(np.abs(po.green_potential(DELTA0, UNIT, z))) <= 1e-12


def test_green_outside_disk():
    with pytest.raises(md.DomainError):
        po.green_potential(DELTA0, UNIT, 1.5 + 0j)


def test_green_clips_at_atom():
    assert po.green_potential(DELTA0, UNIT, 0j) == po.GREEN_CLIP


def test_green_atom_pair():
    mu = po.MeasureSpec(((0.3 + 0j, 0.5), (-0.3 + 0j, 0.5)))
    z = 0.5j
    single = lambda a: math.log(abs(1 - z * np.conj(a)) / abs(z - a))
    assert po.green_potential(mu, UNIT, z) == pytest.approx(0.5 * (single(0.3) + single(-0.3)), abs=1e-14)


def test_green_of_uniform_disk_density():
    # unit mass spread uniformly on |zeta| <= r0: inside, the potential is
    # log R - log r0 + (1 - |z|^2/r0^2)/2; outside it equals log(R/|z|)
    R, r0, h = 1.0, 0.1, 2.5e-3
    n = int(round(2 * r0 / h))
    xs = -r0 + np.arange(n + 1) * h
    inside = np.abs(xs[:, None] + 1j * xs[None, :]) <= r0
    dens = inside / (inside.sum() * h * h)
    mu = po.MeasureSpec((), md.GridField(-r0, -r0, h, h, dens))
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)
    z = np.array([0.5j, 0.3 + 0.2j])
    np.testing.assert_allclose(po.green_potential(mu, po.DiskSpec(0j, R), z), np.log(R / np.abs(z)), atol=1e-4)
    z = np.array([0j, 0.05 + 0j, 0.02 + 0.031j])
    oracle = math.log(R / r0) + (1 - np.abs(z) ** 2 / r0 ** 2) / 2
    np.testing.assert_allclose(po.green_potential(mu, po.DiskSpec(0j, R), z), oracle, atol=2e-3)


def test_log_rect_integral_against_quadrature():
    from scipy.integrate import dblquad

    for a1, a2, b1, b2 in [(-0.1, 0.2, -0.3, 0.05), (0.1, 0.4, 0.2, 0.5), (-0.01, 0.01, -0.01, 0.01)]:
        oracle = dblquad(lambda y, x: 0.5 * math.log(x * x + y * y + 1e-300), a1, a2, b1, b2, epsabs=1e-13)[0]
        assert po.log_rect_integral(a1, a2, b1, b2) == pytest.approx(oracle, abs=1e-10)


@given(st.lists(st.tuples(st.floats(0, 0.95), st.floats(0, 2 * math.pi), st.floats(0, 2)), min_size=1, max_size=4),
       st.floats(0, 0.99), st.floats(0, 2 * math.pi))
def test_green_positive_and_zero_on_boundary(atoms, r, t):
    mu = po.MeasureSpec(tuple((a * np.exp(1j * b), m) for a, b, m in atoms))
    assert po.green_potential(mu, UNIT, r * np.exp(1j * t)) >= 0
    assert abs(po.green_potential(mu, UNIT, np.exp(1j * t))) <= 1e-9


def test_measure_json_round_trip():
    mu = po.MeasureSpec(((0.1 + 0.2j, 1.5),), md.GridField(0, 0, 0.5, 0.5, np.ones((2, 2))))
    back = po.MeasureSpec.from_json(mu.to_json())
    assert back.atoms == mu.atoms and back.total_mass() == mu.total_mass()
    with pytest.raises(md.DomainError):
        po.MeasureSpec(((0j, -1.0),))


# ---------------------------------------------------------------------------
# Riesz measure


def test_riesz_of_harmonic():
    mu = po.riesz_measure(md.sample_grid(md.minus_y(), (0, 1, 0, 1), 1e-2, 1e-2))
    assert mu.atoms == () and mu.total_mass() <= 1e-6


def test_riesz_of_abs_squared():
    mu = po.riesz_measure(_grid(abs_z_squared(), (0, 1, 0, 1), 1e-3))
    assert mu.total_mass() == pytest.approx(2 / math.pi, abs=1e-2)
    np.testing.assert_allclose(mu.density.values, 2 / math.pi, rtol=1e-6)


def test_riesz_atom_from_simple_zero():
    mu = po.riesz_measure(md.sample_grid(log_exp_minus_1(), (-0.3, 0.3, -0.3, 0.3), 5e-3, 5e-3))
    assert len(mu.atoms) == 1
    assert abs(mu.atoms[0][0]) < 1e-9
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-2)


def test_riesz_all_sentinels():
    with pytest.raises(md.DomainError):
        po.riesz_measure(md.GridField(0, 0, 1, 1, np.full((4, 4), -np.inf)))


@given(st.floats(0, 3), st.floats(0, 3), st.floats(-1, 1))
def test_riesz_linearity(a, b, c):
    fs = [lambda z: a * np.abs(z) ** 2, lambda z: b * np.exp(-z.imag) + c * z.real,
          lambda z: np.exp(z.real) * np.cos(z.imag)]
    grids = [_grid(f, (0, 1, 0, 1), 2e-2) for f in fs]
    parts = sum(po.riesz_measure(g).signed_total() for g in grids)
    total = po.riesz_measure(md.GridField(0, 0, 2e-2, 2e-2, sum(g.values for g in grids))).signed_total()
    assert total == pytest.approx(parts, abs=1e-6)


def test_kernel_laplacian_is_dirac():
    spec = po.StripKernelSpec(1.0, md.StripSpec(-0.8, 0.8))
    mu = po.riesz_measure(_grid(lambda w: po.strip_kernel(spec, w), (-0.2, 0.2, -0.2, 0.2), 2e-3))
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-2)


# ---------------------------------------------------------------------------
# decomposition


def test_decomposition_of_log_abs_z():
    def u(z):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(z))

    dec = po.riesz_decomposition(u, UNIT, 0.02)
    pts = dec.green.points()
    r = np.abs(pts)
    keep = dec.inside & (r > 0.2) & (r < 0.5)
    # the plateau flux recovers the atom to about 2e-3 at this spacing
    np.testing.assert_allclose(dec.green.values[keep], np.log(1 / r[keep]), atol=5e-3)
    assert np.max(np.abs(dec.harmonic.values[keep])) <= 5e-3


def test_decomposition_of_harmonic():
    dec = po.riesz_decomposition(md.minus_y(), po.DiskSpec(0.5j, 0.4), 0.02)
    keep = dec.inside
    assert np.max(np.abs(dec.green.values[keep])) <= 1e-6
    np.testing.assert_allclose(dec.harmonic.values[keep], -dec.harmonic.points()[keep].imag, atol=1e-6)


def test_decomposition_of_log_exp_minus_1():
    disk = po.DiskSpec(0j, 0.4)
    dec = po.riesz_decomposition(log_exp_minus_1(), disk, 5e-3)
    pts = dec.green.points()
    r = np.abs(pts)
    keep = dec.inside & (r <= 0.2) & (r > 0.05)
    # u = log|z| + log|(e^{iz}-1)/z|, so H = log|(e^{iz}-1)/z| + log R
    with np.errstate(divide="ignore", invalid="ignore"):
        oracle = np.log(np.abs(np.expm1(1j * pts) / pts)) + math.log(0.4)
    assert np.max(np.abs(dec.harmonic.values[keep] - oracle[keep])) <= 1e-2
    H = dec.harmonic_interpolant()
    centers = [0.1 + 0.05j, -0.12j, -0.08 + 0.03j]
    assert po.submean_check(H, centers, [0.06], tol=1e-3).passed
    assert po.submean_check(lambda z: -H(z), centers, [0.06], tol=1e-3).passed


def test_decomposition_disk_must_fit_strip():
    with pytest.raises(md.DomainError):
        po.riesz_decomposition(md.minus_y(), po.DiskSpec(0j, 0.5), 0.05, strip=md.StripSpec(-0.2, 2))


# ---------------------------------------------------------------------------
# strip kernel


def test_gamma_bound():
    assert po.gamma_bound(md.StripSpec(0, 1)) == math.pi
    with pytest.raises(md.DomainError):
        po.StripKernelSpec(math.pi, md.StripSpec(0, 1))
    with pytest.raises(md.DomainError):
        po.StripKernelSpec(0.0, md.StripSpec(0, 1))


def test_kernel_near_origin():
    spec = po.StripKernelSpec(1.0, md.StripSpec(0, 1))
    assert abs(po.strip_kernel(spec, 1e-4) - math.log(1e-4)) <= 1e-6
    spec = po.StripKernelSpec(0.5, md.StripSpec(0, 1))
    assert po.strip_kernel(spec, 1e-4j) - math.log(1e-4) == pytest.approx(0.5 * math.log(0.5), abs=1e-6)
    assert po.strip_kernel(spec, 0) == -math.inf


def test_kernel_far_away():
    spec = po.StripKernelSpec(1.0, md.StripSpec(0, 1))
    assert abs(po.strip_kernel(spec, 50.0)) <= 1e-10
    assert abs(po.strip_kernel(spec, -50.0)) <= 1e-10


def test_kernel_upper_bound(rng):
    spec = po.StripKernelSpec(0.7, md.StripSpec(0, 2))
    w = rng.uniform(-30, 30, 10000) + 1j * rng.uniform(-2, 2, 10000)
    assert np.max(po.strip_kernel(spec, w)) <= po.kernel_upper_bound(spec)


def test_kernel_split(rng):
    spec = po.StripKernelSpec(1.0, md.StripSpec(-0.8, 0.8))
    N = 10.0
    w = rng.uniform(-3, 3, 10000) + 1j * rng.uniform(-1.6, 1.6, 10000)
    w[:100] = rng.uniform(-1e-3, 1e-3, 100)
    w[0] = 0
    K = po.strip_kernel(spec, w)
    K1, K2 = po.kernel_split(spec, N, w)
    fin = np.isfinite(K)
    assert np.max(np.abs(K1[fin] + K2[fin] - K[fin])) <= 1e-15
    assert np.all(K2[~fin] == -np.inf)
    assert np.all(K2 <= 0) and np.all(K1 >= -2 * math.log(N))
    assert np.all(K2[K >= -2 * math.log(N)] == 0)
    rho = po.split_radius(spec, N)
    assert rho == pytest.approx(1 / N ** 2, rel=1e-3)
    far = 1.01 * rho * np.exp(1j * np.linspace(0, 2 * np.pi, 64))
    assert np.all(po.kernel_split(spec, N, far)[1] == 0)


# ---------------------------------------------------------------------------
# strip potential


def test_strip_potential_single_atom():
    spec = po.StripKernelSpec(0.5, md.StripSpec(-1, 1))
    phi = po.YProfile(-0.5, 0.5, 0.3)
    w0 = 0.3 + 0.1j
    mu = po.MeasureSpec(((w0, 1.0),))
    z = np.array([0.0, 1.0 + 0.3j, -2 - 0.4j])
    np.testing.assert_allclose(po.strip_potential(mu, spec, phi, z), po.strip_kernel(spec, w0 - z), atol=1e-15)


def test_strip_potential_is_periodic():
    spec = po.StripKernelSpec(0.5, md.StripSpec(-1, 1))
    phi = po.YProfile(-0.5, 0.5, 0.3)
    mu = po.MeasureSpec(tuple((2 * math.pi * k + 0j, 1.0) for k in range(-20, 21)))
    x = np.linspace(-math.pi, math.pi, 41) + 0.01
    for y in (-0.7, 0.0, 0.45):
        z = x + 1j * y
        V0 = po.strip_potential(mu, spec, phi, z)
        V1 = po.strip_potential(mu, spec, phi, z + 2 * math.pi)
        assert np.max(np.abs(V1 - V0)) <= 1e-8


def test_strip_potential_recovers_profile():
    spec = po.StripKernelSpec(0.5, md.StripSpec(-1, 1))
    for y0 in (0.0, 0.6, 0.75):
        phi = po.YProfile(-0.5, 0.5, 0.5)
        mu = po.MeasureSpec(((complex(0, y0), 1.0),))
        g = _grid(lambda z: po.strip_potential(mu, spec, phi, z), (-0.2, 0.2, y0 - 0.2, y0 + 0.2), 4e-3)
        got = po.riesz_measure(g).total_mass()
        assert got == pytest.approx(float(phi(y0)), abs=1e-2)


def test_truncation_width_meets_tolerance():
    spec = po.StripKernelSpec(0.5, md.StripSpec(-1, 1))
    W = po.truncation_width(spec, 1.0, 1e-10)
    g, d2 = 0.5, 4.0
    tail = 2 * math.exp(g * d2 - g * W * W) / (1 - math.exp(-2 * g * W))
    assert 10 * tail <= 1e-10


# ---------------------------------------------------------------------------
# sub-mean-value checks


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.01, 2))
def test_submean_of_abs_squared(x, y, rho):
    s = po.submean_check(abs_z_squared(), [complex(x, y)], [rho])
    r = s.results[0]
    assert s.passed and r.deficit == pytest.approx(rho ** 2, rel=1e-9, abs=1e-12)
    s = po.submean_check(lambda z: -np.abs(z) ** 2, [complex(x, y)], [rho])
    assert not s.passed
    assert s.results[0].deficit == pytest.approx(-rho ** 2, rel=1e-9, abs=1e-12)


def test_submean_of_singular_function():
    rng = np.random.default_rng(3)
    centers = rng.uniform(-0.2, 0.2, 20) + 1j * rng.uniform(-0.2, 0.2, 20)
    s = po.submean_check(log_exp_minus_1(), np.append(centers, 0j), [0.05, 0.1, 0.3], min_nodes=512)
    assert s.passed
    assert any(r.center_value == -math.inf for r in s.results)


def test_submean_skips_circles_leaving_domain():
    s = po.submean_check(md.minus_y(), [0.9j, 0j], [0.5], domain=md.StripSpec(-1, 1))
    assert [r.skipped for r in s.results] == [True, False]
    assert s.skipped == 1
    s = po.submean_check(md.minus_y(), [0.9j], [0.05, 0.5], domain=(-1, 1))
    assert [r.skipped for r in s.results] == [False, True]


def test_log_subharmonic_examples():
    em1 = md.Exp(log_exp_minus_1())
    assert po.log_subharmonic_check(em1, (-1, 1, -0.45, 0.55)).verdict
    assert po.log_subharmonic_check(md.Exp(md.LogAbs(md.holo((1, 1)))), (0, 2, 0, 1)).verdict
    both = md.Sum((md.Exp(md.LogAbs(md.holo((1, 1)))), md.Exp(md.LogAbs(md.holo((-1, 1))))))
    assert po.log_subharmonic_check(both, (0, 2, -0.5, 0.5)).verdict
    # 2 + x^2 is subharmonic but its logarithm is not for |x| > sqrt 2
    assert not po.log_subharmonic_check(lambda z: 2 + np.real(z) ** 2, (2, 4, 0, 1)).verdict
    with pytest.raises(md.DomainError):
        po.log_subharmonic_check(md.cosine(), (0, 4, 0, 1))


# ---------------------------------------------------------------------------
# modulus transfer


def _random_pairs(rng, delta, lo, hi, n=1000, cells=200):
    """Piecewise-constant pairs on [0, 1] with L1 distance below delta."""
    for _ in range(n):
        f = rng.uniform(lo, hi, cells)
        g = f + rng.uniform(-1, 1, cells) * 0.49 * delta
        g = np.clip(g, lo, hi)
        k = rng.integers(0, cells)
        # one cell of width 1/cells carries an arbitrary jump if it fits the budget
        if (hi - lo) / cells < 0.49 * delta:
            g[k] = rng.uniform(lo, hi)
        assert np.mean(np.abs(f - g)) < delta
        yield f, g


def test_modulus_of_constant():
    assert po.continuity_modulus_delta(lambda t: np.full_like(t, 3.0), 0.1, 1.0) == math.inf


@pytest.mark.parametrize("phi, interval", [
    (lambda t: t, (-1.0, 1.0)),
    (lambda t: po.log_floor(t, 0.01), (0.0, 1.0)),
])
def test_modulus_transfer(phi, interval):
    eps = 0.1
    delta = po.continuity_modulus_delta(phi, eps, 1.0, interval)
    assert 0 < delta < math.inf
    rng = np.random.default_rng(11)
    worst = max(np.mean(np.abs(phi(f) - phi(g))) for f, g in _random_pairs(rng, delta, *interval))
    assert worst < eps
