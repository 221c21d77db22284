import math

import numpy as np
import pytest

from cmlab.grid import Grid, SampledField, dft, freq_norm, idft
from cmlab.multipliers import (
    NonFiniteError,
    apply_bilinear,
    apply_linear,
    apply_radial,
    bessel,
    builtin_symbol,
    cm_constant,
    cm_report,
    cm_scaling_report,
    j_w,
    j_w_inv,
    multiply_dealiased,
    p_t,
    q_t,
    split_sigma,
    standard_family,
)
from cmlab.weights import make_log_weight, regularize


def random_field(grid, seed, band=None):
    rng = np.random.default_rng(seed)
    if band is None:
        vals = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        return SampledField(grid, vals)
    spec = np.zeros(grid.shape, dtype=complex)
    ks = np.fft.fftfreq(grid.N, 1.0 / grid.N).astype(int)
    if grid.n == 1:
        sel = np.abs(ks) <= band
        spec[sel] = rng.normal(size=sel.sum()) + 1j * rng.normal(size=sel.sum())
    else:
        K1, K2 = np.meshgrid(ks, ks, indexing="ij")
        sel = np.maximum(np.abs(K1), np.abs(K2)) <= band
        spec[sel] = rng.normal(size=sel.sum()) + 1j * rng.normal(size=sel.sum())
    return idft(dft(SampledField(grid, np.zeros(grid.shape))).__class__(grid, spec))


def brute_force_bilinear(sigma, f, g):
    """O(N^2) double spectral sum; n = 1 oracle."""
    grid = f.grid
    F, G = dft(f).coefficients, dft(g).coefficients
    k = np.fft.fftfreq(grid.N, 1.0 / grid.N)
    xi = 2 * np.pi * k / grid.L
    x = grid.axis_points()
    out = np.zeros(grid.N, dtype=complex)
    for i in range(grid.N):
        for j in range(grid.N):
            s = sigma(np.array([[xi[i]]]), np.array([[xi[j]]]))[0]
            out += s * F[i] * G[j] * np.exp(1j * (xi[i] + xi[j]) * x)
    return out / grid.L ** (2 * grid.n)


class TestLPFamily:
    def test_psi_support_ring(self):
        fam = standard_family()
        s = np.linspace(0, 3, 6001)
        vals = fam.psi_hat(s)
        outside = (s < 0.8) | (s > 1.2)
        assert np.max(np.abs(vals[outside])) == 0.0

    def test_normalization_exact_at_64_per_octave(self):
        fam = standard_family()
        assert abs(fam.normalization_quadrature(64) - 1.0) <= 1e-12

    def test_normalization_within_1e8(self):
        # the stated acceptance tolerance, with clear margin
        fam = standard_family()
        assert abs(fam.normalization_quadrature(64) - 1.0) <= 1e-8

    def test_phi_one_on_psi_support(self):
        fam = standard_family()
        s = np.linspace(0.8, 1.2, 101)
        np.testing.assert_array_equal(fam.phi_hat(s), 1.0)

    def test_phi1_support_and_plateau(self):
        fam = standard_family()
        s = np.linspace(0, 3, 3001)
        vals = fam.phi1_hat(s)
        assert np.max(np.abs(vals[s > 0.4 + 1e-9])) == 0.0
        np.testing.assert_array_equal(fam.phi1_hat(np.linspace(0, 4 / 15, 50)), 1.0)

    def test_psi1_is_difference(self):
        fam = standard_family()
        s = np.linspace(0, 3, 3001)
        np.testing.assert_allclose(
            fam.psi1_hat(s), fam.phi_hat(s) - fam.phi1_hat(s), atol=0
        )

    def test_psi2_plateau_and_zero_at_origin(self):
        fam = standard_family()
        assert fam.psi2_hat(np.array([0.0]))[0] == 0.0
        np.testing.assert_array_equal(fam.psi2_hat(np.linspace(0.4, 1.8, 100)), 1.0)

    def test_phi2_plateau(self):
        fam = standard_family()
        np.testing.assert_array_equal(fam.phi2_hat(np.linspace(0, 2.8, 100)), 1.0)


class TestLinear:
    def test_identity_symbol(self):
        f = random_field(Grid(1, 64), 0)
        out = apply_linear(lambda xi: np.ones(xi.shape[1:]), f)
        np.testing.assert_allclose(out.values, f.values, atol=1e-12)

    def test_pure_mode_eigenfunction(self):
        g = Grid(1, 64)
        x = g.axis_points()
        xi0 = 2 * np.pi * 3 / g.L
        f = SampledField(g, np.exp(1j * xi0 * x))
        out = apply_linear(lambda xi: np.cos(xi[0]), f)
        np.testing.assert_allclose(out.values, np.cos(xi0) * f.values, atol=1e-12)

    def test_composition_commutes(self):
        f = random_field(Grid(1, 128), 1)
        a = lambda xi: 1.0 / (1.0 + xi[0] ** 2)
        b = lambda xi: np.sin(xi[0])
        lhs = apply_linear(a, apply_linear(b, f))
        rhs = apply_linear(lambda xi: a(xi) * b(xi), f)
        assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12 * np.max(
            np.abs(f.values)
        )

    def test_qt_kills_constants(self):
        fam = standard_family()
        g = Grid(1, 64)
        out = q_t(fam, 0.5, SampledField(g, np.ones(64)))
        assert np.max(np.abs(out.values)) == 0.0

    def test_pt_identity_for_small_t(self):
        fam = standard_family()
        g = Grid(1, 128)
        f = random_field(g, 2, band=8)
        ximax = 2 * np.pi * 8 / g.L
        t = 0.5 * fam.r / ximax
        out = p_t(fam, t, f)
        np.testing.assert_allclose(out.values, f.values, atol=1e-12)

    def test_qt_output_band(self):
        # the multiplier itself vanishes exactly outside the ring; after the
        # inverse/forward FFT round trip the off-band coefficients sit at the
        # rounding floor
        fam = standard_family()
        g = Grid(1, 256)
        f = random_field(g, 3)
        t = 0.11
        r = freq_norm(g)
        outside = (t * r < 0.8) | (t * r > 1.2)
        assert np.max(np.abs(fam.psi_hat(t * r)[outside])) == 0.0
        F = dft(q_t(fam, t, f)).coefficients
        assert np.max(np.abs(F[outside])) <= 1e-13 * np.max(np.abs(F))

    def test_bessel_inverse(self):
        f = random_field(Grid(1, 128), 4)
        out = bessel(-3.0, bessel(3.0, f))
        assert np.max(np.abs(out.values - f.values)) <= 1e-10 * np.max(
            np.abs(f.values)
        )

    def test_bessel_single_mode(self):
        g = Grid(1, 64)
        x = g.axis_points()
        xi0 = 2 * np.pi * 5 / g.L
        f = SampledField(g, np.exp(1j * xi0 * x))
        out = bessel(2.0, f)
        np.testing.assert_allclose(out.values, (1 + xi0**2) * f.values, rtol=1e-12)

    def test_jw_inverse_round_trip(self):
        rw = regularize(make_log_weight(1.0))
        f = random_field(Grid(1, 256), 5)
        out = j_w(rw, j_w_inv(rw, f))
        assert np.max(np.abs(out.values - f.values)) <= 1e-12 * np.max(
            np.abs(f.values)
        )

    def test_jw_constant_weight_identity(self):
        rw = regularize(make_log_weight(0.0))
        f = random_field(Grid(1, 64), 6)
        np.testing.assert_allclose(j_w(rw, f).values, f.values, atol=1e-12)

    def test_jw_inv_l2_contraction(self):
        # ||J_{w^-1} f||_2 <= ||f||_2 / min w over grid frequencies
        rw = regularize(make_log_weight(1.0))
        g = Grid(1, 256)
        wmin = float(np.min(rw(freq_norm(g))))
        for seed in range(5):
            f = random_field(g, seed)
            before = np.linalg.norm(f.values)
            after = np.linalg.norm(j_w_inv(rw, f).values)
            assert after <= before / wmin * (1 + 1e-12)


class TestBilinear:
    def test_sigma_one_is_product(self):
        g = Grid(1, 64)
        f, h = random_field(g, 7), random_field(g, 8)
        out = apply_bilinear(builtin_symbol("one"), f, h)
        assert np.max(np.abs(out.values - f.values * h.values)) <= 1e-10

    def test_separable_symbol(self):
        # sigma(xi, eta) = a(xi) acts as a(D) f times g
        g = Grid(1, 32)
        f, h = random_field(g, 9, band=10), random_field(g, 10, band=10)

        import cmlab.multipliers as M

        def _sym_sep(xi, eta):
            return 1.0 / (1.0 + np.sum(np.asarray(xi) ** 2, axis=0))

        M._SYMBOL_REGISTRY.setdefault("test-sep", _sym_sep)
        sigma = M.BilinearSymbol("test-sep", origin=1.0)  # a(0) * 1
        out = apply_bilinear(sigma, f, h)
        af = apply_linear(lambda xi: 1.0 / (1.0 + xi[0] ** 2), f)
        expected = multiply_dealiased(af, h)
        np.testing.assert_allclose(out.values, expected.values, atol=1e-11)

    def test_matches_brute_force(self):
        g = Grid(1, 32)
        f, h = random_field(g, 11), random_field(g, 12)
        sigma = builtin_symbol("riesz-ratio")
        out = apply_bilinear(sigma, f, h)
        oracle = brute_force_bilinear(sigma, f, h)
        assert np.max(np.abs(out.values - oracle)) <= 1e-12 * np.max(np.abs(oracle))

    def test_matches_brute_force_2d(self):
        g = Grid(2, 16)
        f, h = random_field(g, 13, band=4), random_field(g, 14, band=4)
        sigma = builtin_symbol("riesz-ratio")
        out = apply_bilinear(sigma, f, h)
        # oracle via the padded direct sum run through numpy broadcasting
        F, G = dft(f).coefficients, dft(h).coefficients
        k = np.fft.fftfreq(16, 1 / 16)
        xi = 2 * np.pi * k / g.L
        x = g.points()
        acc = np.zeros(g.shape, dtype=complex)
        for i1 in range(16):
            for i2 in range(16):
                if F[i1, i2] == 0:
                    continue
                for j1 in range(16):
                    for j2 in range(16):
                        if G[j1, j2] == 0:
                            continue
                        s = sigma(
                            np.array([xi[i1], xi[i2]]).reshape(2, 1),
                            np.array([xi[j1], xi[j2]]).reshape(2, 1),
                        )[0]
                        phase = np.exp(
                            1j * ((xi[i1] + xi[j1]) * x[0] + (xi[i2] + xi[j2]) * x[1])
                        )
                        acc += s * F[i1, i2] * G[j1, j2] * phase
        acc /= g.L ** (2 * g.n)
        assert np.max(np.abs(out.values - acc)) <= 1e-10 * max(
            1.0, np.max(np.abs(acc))
        )

    def test_bilinearity(self):
        g = Grid(1, 64)
        f1, f2, h = random_field(g, 15), random_field(g, 16), random_field(g, 17)
        sigma = builtin_symbol("riesz-ratio")
        a = 2.0 - 0.5j
        lhs = apply_bilinear(sigma, f1 * a + f2, h)
        rhs = a * apply_bilinear(sigma, f1, h) + apply_bilinear(sigma, f2, h)
        scale = np.max(np.abs(rhs.values))
        assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-10 * scale


class TestSplitSigma:
    def test_partition_values(self):
        sigma = builtin_symbol("one")
        tau1, tau2 = split_sigma(sigma)
        xi = np.array([[1.0]])
        eta = np.array([[1.0]])
        assert tau1(xi, eta)[0] == pytest.approx(1.0)
        assert tau2(xi, eta)[0] == pytest.approx(0.0)
        # |xi| = |eta|/40 lands in the low region
        xi, eta = np.array([[0.1]]), np.array([[4.0]])
        assert tau1(xi, eta)[0] == pytest.approx(0.0)
        assert tau2(xi, eta)[0] == pytest.approx(1.0)

    def test_sum_exact_everywhere(self):
        # exact off the cutoff transition, a rounding error on it (the
        # acceptance tolerance for this identity is 1e-10 relative)
        sigma = builtin_symbol("riesz-ratio")
        tau1, tau2 = split_sigma(sigma)
        rng = np.random.default_rng(0)
        xi = rng.normal(size=(1, 500)) * 10 ** rng.uniform(-3, 3, size=(1, 500))
        eta = rng.normal(size=(1, 500)) * 10 ** rng.uniform(-3, 3, size=(1, 500))
        np.testing.assert_allclose(
            tau1(xi, eta) + tau2(xi, eta), sigma(xi, eta), rtol=1e-14, atol=0
        )
        on_plateau = 20 * np.abs(xi[0]) / np.abs(eta[0]) >= 2
        np.testing.assert_array_equal(
            (tau1(xi, eta) + tau2(xi, eta))[on_plateau], sigma(xi, eta)[on_plateau]
        )

    def test_eta_zero_goes_high(self):
        sigma = builtin_symbol("one")
        tau1, tau2 = split_sigma(sigma)
        xi, eta = np.array([[2.0]]), np.array([[0.0]])
        assert tau1(xi, eta)[0] == 1.0
        assert tau2(xi, eta)[0] == 0.0

    def test_split_keeps_cm_class(self):
        for name in ("one", "riesz-ratio"):
            tau1, tau2 = split_sigma(builtin_symbol(name))
            assert cm_constant(tau1, 1, max_order=2) < 1e4
            assert cm_constant(tau2, 1, max_order=2) < 1e4


class TestCmChecker:
    def test_sigma_one_exact(self):
        rep = cm_report(builtin_symbol("one"), 1, max_order=3)
        assert rep[0] == pytest.approx(1.0)
        for order in (1, 2, 3):
            assert rep[order] <= 1e-6

    def test_riesz_ratio_stable_under_step_halving(self):
        sigma = builtin_symbol("riesz-ratio")
        c1 = cm_constant(sigma, 1, max_order=2, step_scale=2.0**-8)
        c2 = cm_constant(sigma, 1, max_order=2, step_scale=2.0**-9)
        assert c2 == pytest.approx(c1, rel=0.2)

    def test_degree_one_symbol_flagged(self):
        rep = cm_scaling_report(builtin_symbol("abs-xi"), 1, max_order=1)
        assert rep["non_cm"]
        assert rep["growth"] > 4.0

    def test_cm_symbol_not_flagged(self):
        rep = cm_scaling_report(builtin_symbol("riesz-ratio"), 1, max_order=1)
        assert not rep["non_cm"]

    def test_kato_ponce_b1_finite(self):
        c = cm_constant(builtin_symbol("kato-ponce-b1", s=6.0), 1, max_order=2)
        assert math.isfinite(c) and c > 0
