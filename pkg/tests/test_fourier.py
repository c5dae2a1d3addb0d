import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from apstrip import fourier as fo
from apstrip import metrics as me
from apstrip import model as md
from conftest import SQRT2, log_one_minus, log_sin


# ---------------------------------------------------------------------------
# mean values


@pytest.mark.parametrize("y", [-0.5, 0.0, 1.3])
def test_mean_of_cosine(y):
    assert abs(fo.mean_value(md.cosine(), y).value) < 1e-4


def test_mean_of_minus_y():
    assert fo.mean_value(md.minus_y(), 0.7).value == -0.7


def test_mean_of_log_sin_against_quadrature():
    # log|sin z| is pi-periodic, so one period gives the mean exactly
    oracle = quad(lambda x: math.log(abs(cmath.sin(complex(x, 0.5)))), 0, math.pi)[0] / math.pi
    assert oracle == pytest.approx(0.5 - math.log(2), abs=1e-12)
    r = fo.mean_value(log_sin(), 0.5)
    assert r.converged
    assert r.value.real == pytest.approx(oracle, abs=1e-6)


def test_history_and_convergence_flag():
    r = fo.mean_value(md.Sum((md.cosine(), md.cosine(SQRT2))), 0.0, tol=1e-15, tmax=4 * math.pi)
    assert not r.converged
    assert len(r.history) >= 1
    r = fo.mean_value(md.cosine(), 0.0, tol=1e-6)
    last, prev = r.history[-1][1], r.history[-2][1]
    assert r.converged and abs(last - prev) <= 1e-6 * (1 + abs(last))


def test_window_argument():
    with pytest.raises(md.DomainError):
        fo.mean_value(md.cosine(), 0.0, window="bogus")
    with pytest.raises(md.DomainError):
        fo.mean_value(md.cosine(), 3.0, strip=md.StripSpec(-1, 2))
    # the plain box average leaks like 1/(d T)
    box = abs(fo.fourier_coefficient(md.cosine(), SQRT2, 0.0, window="box"))
    hann = abs(fo.fourier_coefficient(md.cosine(), SQRT2, 0.0))
    assert hann < 1e-6 < box < 1e-2


# ---------------------------------------------------------------------------
# coefficients


@pytest.mark.parametrize("y", [-0.4, 0.0, 0.9])
def test_cosine_coefficient(y):
    assert fo.fourier_coefficient(md.cosine(), 1.0, y) == pytest.approx(0.5, abs=1e-6)
    assert abs(fo.fourier_coefficient(md.cosine(), SQRT2, y)) < 1e-6


def test_power_series_coefficients():
    u = log_one_minus(0.5)
    for k in range(1, 5):
        for y in (0.0, 0.6):
            oracle = -(0.5 ** k) * math.exp(-k * y) / (2 * k)
            assert fo.fourier_coefficient(u, k, y, tol=1e-8) == pytest.approx(oracle, abs=1e-8)


def test_log_sin_coefficients():
    # log|sin z| = y - log 2 - sum_k Re(e^{2ikz})/k for y > 0
    y = 0.4
    for k in (1, 2, 3):
        assert fo.fourier_coefficient(log_sin(), 2 * k, y, tol=1e-8) == pytest.approx(-math.exp(-2 * k * y) / (2 * k), abs=1e-8)


def test_profiles():
    col = fo.coefficient_profile(md.minus_y(), 0.0, [0.0, 0.5, 1.0])
    np.testing.assert_allclose(col.values, [0, -0.5, -1], atol=1e-15)
    assert col.modulus == pytest.approx(0.5)
    ys = np.linspace(0, 1, 6)
    col = fo.coefficient_profile(log_one_minus(0.5), 1.0, ys, tol=1e-8)
    np.testing.assert_allclose(col.values, -np.exp(-ys) / 4, atol=1e-8)
    col = fo.coefficient_profile(md.Exp(md.LogAbs(md.holo((1, 1)))), 0.0, ys)
    np.testing.assert_allclose(col.values, np.exp(-ys), rtol=1e-12)


def test_table_csv():
    t = fo.coefficient_table(md.cosine(), [1.0, -1.0], [0.0, 0.5])
    text = t.to_csv()
    assert text.splitlines()[0] == "lambda,y,re,im"
    assert len(text.splitlines()) == 5
    np.testing.assert_allclose(t.column(-1.0), [0.5, 0.5], atol=1e-9)


u_pool = st.sampled_from([md.harmonic_cosine(1.0), log_one_minus(0.5), log_sin(),
                          md.Exp(md.LogAbs(md.holo((0, 1), (1, -0.5))))])
lam_pool = st.sampled_from([0.0, 1.0, 2.0, -1.0, SQRT2])


@settings(max_examples=10)
@given(u_pool, u_pool, st.floats(-2, 2), st.floats(-2, 2), lam_pool, st.floats(0.1, 1.0))
def test_linearity(u1, u2, c1, c2, lam, y):
    combo = lambda z: c1 * u1(z) + c2 * u2(z)
    lhs = fo.fourier_coefficient(combo, lam, y, tol=1e-8)
    rhs = c1 * fo.fourier_coefficient(u1, lam, y, tol=1e-8) + c2 * fo.fourier_coefficient(u2, lam, y, tol=1e-8)
    assert abs(lhs - rhs) <= 1e-6


@settings(max_examples=10)
@given(u_pool, lam_pool, st.floats(-20, 20), st.floats(0.1, 1.0))
def test_shift_covariance(u, lam, tau, y):
    a = fo.fourier_coefficient(md.horizontal_shift(u, tau), lam, y, tol=1e-8)
    b = fo.fourier_coefficient(u, lam, y, tol=1e-8)
    assert abs(a - np.exp(1j * lam * tau) * b) <= 1e-6


@settings(max_examples=10)
@given(u_pool, st.sampled_from([1.0, 2.0, SQRT2, 0.5]), st.floats(0.1, 1.0))
def test_reality(u, lam, y):
    r = fo.line_means(u, y, [lam, -lam], tol=1e-8)
    assert abs(r.values[1] - np.conj(r.values[0])) <= 1e-9


# ---------------------------------------------------------------------------
# spectra and Bessel


def test_spectrum_of_quasi_periodic_sum():
    u = md.Sum((md.cosine(1.0), md.cosine(SQRT2)))
    cands = fo.lattice_candidates([1.0, SQRT2], 3, 10)
    found = fo.spectrum_scan(u, cands, [0.0], 1e-3)
    assert found == pytest.approx([-SQRT2, -1.0, 1.0, SQRT2])


def test_spectrum_of_constant():
    assert fo.spectrum_scan(md.const(2.0), fo.lattice_candidates([1.0], 3), [0.0], 1e-6) == [0.0]


def test_spectrum_of_power_series():
    found = fo.spectrum_scan(log_one_minus(0.5), np.arange(-5.0, 6.0), [0.0], 1e-6)
    assert found == [-5.0, -4.0, -3.0, -2.0, -1.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    t = fo.coefficient_table(log_one_minus(0.5), found, [0.0], tol=1e-8)
    np.testing.assert_allclose(np.abs(t.values[:, 0]), [2.0 ** -(abs(k) + 1) / abs(k) for k in found], atol=1e-8)


def test_periodogram_candidates():
    u = md.Sum((md.cosine(1.0), md.cosine(SQRT2)))
    found = fo.periodogram_candidates(u, 0.0, 3.0, 0.1)
    assert found == pytest.approx([-SQRT2, -1.0, 1.0, SQRT2], abs=1e-6)


def test_rational_basis():
    assert fo.rational_basis([1.0, 2.0, 0.5, SQRT2, 3 * SQRT2, 1 + SQRT2]) == pytest.approx([0.5, SQRT2])


def test_bessel_examples():
    assert abs(fo.bessel_check(md.cosine(), 0.0, [-1.0, 1.0]).deficit) <= 1e-9
    assert fo.bessel_check(md.cosine(), 0.0, [1.0]).deficit == pytest.approx(0.25, abs=1e-9)
    tail = 2 * sum((2.0 ** (-k - 1) / k) ** 2 for k in range(11, 200))
    r = fo.bessel_check(log_one_minus(0.5), 0.0, np.arange(-10.0, 11.0))
    assert -1e-12 <= r.deficit <= tail + 1e-12


# ---------------------------------------------------------------------------
# Bochner-Fejer


def test_multiplier_examples():
    assert fo.bochner_fejer_multipliers([1.0], 1).multiplier(1.0) == 0.5
    assert fo.bochner_fejer_multipliers([1.0, SQRT2], 2).multiplier(0.0) == 1.0
    spec = fo.bochner_fejer_multipliers([1.0], 3)
    assert spec.coords(1.0) == (6,)
    assert Fraction(spec.multiplier(1.0)).limit_denominator(100) == Fraction(13, 19)


def test_multiplier_matches_kernel_average():
    # the multiplier is the coefficient of the nonnegative product Fejer kernel
    spec = fo.bochner_fejer_multipliers([1.0], 2)
    K = md.ExpSum(tuple((lam, md.ConstProfile(complex(k))) for _, lam, k in spec.entries()))
    x = np.linspace(0, 2 * math.pi, 1001)
    assert np.min(K(x + 0j)) >= -1e-12
    assert fo.fourier_coefficient(K, 1.0, 0.0) == pytest.approx(spec.multiplier(1.0), abs=1e-9)


def test_order_guard():
    with pytest.raises(md.DomainError):
        fo.bochner_fejer_multipliers([1.0], 11)
    with pytest.raises(md.DomainError):
        fo.bochner_fejer_multipliers([1.0], 0)
    with pytest.raises(md.DomainError):
        fo.bochner_fejer_multipliers([1.0], 2).multiplier(SQRT2)


@given(st.integers(1, 6), st.integers(-6, 6), st.sampled_from(["contract", "classical"]))
def test_multiplier_bounds_and_growth(m, p, width):
    lam = p / 1.0
    w = lambda n: math.factorial(n) ** 2 if width == "classical" else None
    k_m = fo.bochner_fejer_multipliers([1.0], m, w(m)).multiplier(lam)
    k_next = fo.bochner_fejer_multipliers([1.0], m + 1, w(m + 1)).multiplier(lam)
    assert 0 <= k_m <= 1
    assert k_next >= k_m


def test_multiplier_json():
    js = fo.bochner_fejer_multipliers([1.0], 1).to_json()
    assert js["basis"] == [1.0] and js["m"] == 1
    assert {(tuple(e["p"]), e["k"]) for e in js["multipliers"]} == {((-1,), 0.5), ((0,), 1.0), ((1,), 0.5)}


def test_sum_of_constant():
    spec = fo.bochner_fejer_multipliers([1.0], 2)
    P = fo.bochner_fejer_sum(md.const(1.7), spec, [0.0, 0.5, 1.0], spectrum=[0.0])
    z = np.array([0.3 + 0.2j, 5 + 0.9j])
    np.testing.assert_allclose(P(z), 1.7, atol=1e-12)


def test_sum_of_cosine():
    spec = fo.bochner_fejer_multipliers([1.0], 1)
    P = fo.bochner_fejer_sum(md.cosine(), spec, [0.0, 0.5, 1.0])
    x = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(P(x + 0.3j), 0.5 * np.cos(x), atol=1e-9)


def test_log_sin_approximants_improve():
    cfg = me.MetricConfig(x_window=(0.0, 10.0), hx=2e-3)
    ys = me.y_rows(0.3, 1.0, 0.025)
    spectrum = [2.0 * k for k in range(-10, 11)]
    table = fo.coefficient_table(log_sin(), spectrum, ys, 1e-10)
    basis = fo.rational_basis(spectrum)
    d = []
    for m in (1, 2, 3):
        P = fo.bochner_fejer_sum(log_sin(), fo.bochner_fejer_multipliers(basis, m), ys,
                                 spectrum=spectrum, table=table)
        d.append(me.stepanov_seminorm(P, log_sin(), 0.3, 1.0, cfg))
    assert d[0] > d[1] > d[2]
