"""Acceptance suite: one test (and one printed pass line) per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines as they complete.  Everything below n=1 unless stated; the sweep
criteria use 200 trials per resolution with shared seeds.
"""

import math

import numpy as np
import pytest

from cmlab.carleson import TentFunction, band_tent, carleson_embedding_ratio, carleson_norm
from cmlab.grid import Grid, SampledField, SpectralField, dft, freq_norm, idft
from cmlab.harness import estimate_ratio, make_field
from cmlab.multipliers import (
    apply_bilinear,
    bessel,
    builtin_symbol,
    cm_report,
    cm_scaling_report,
    j_w,
    j_w_inv,
    multiply_dealiased,
    q_t,
    split_sigma,
    standard_family,
)
from cmlab.paraproducts import (
    ParaproductSpec,
    calderon_reconstruct,
    pi,
    pi1,
    pi2,
    product_decompose,
)
from cmlab.spaces import bmo_norm, h1_norm, jw_norm, lp_norm, refined_sobolev_norm, triebel_norm, xw_norm
from cmlab.timegrid import TimeGrid
from cmlab.weights import ResolutionOfUnity, make_log_weight, regularize

FAM = standard_family()
RW1 = regularize(make_log_weight(1.0))


def report(line):
    print(f"\n[acceptance] {line}")


def band_field(grid, seed, kmax=None, lo=0):
    kmax = kmax if kmax is not None else grid.N // 8
    rng = np.random.default_rng(seed)
    spec = np.zeros(grid.shape, dtype=complex)
    for k in range(lo, kmax + 1):
        z = rng.normal() + 1j * rng.normal()
        spec[k] += z
        if k > 0:
            spec[-k] += np.conj(z)
    return idft(SpectralField(grid, spec))


class TestCriterion1ExactIdentities:
    def test_exact_identities(self):
        grid = Grid(1, 256)
        tg = TimeGrid.for_grid(grid)
        spec = ParaproductSpec(FAM, "one", tg)

        # T_1(f, g) = f g
        for seed in range(10):
            f, g = band_field(grid, seed), band_field(grid, 100 + seed)
            out = apply_bilinear(builtin_symbol("one"), f, g)
            scale = np.max(np.abs(f.values * g.values)) + 1e-300
            assert np.max(np.abs(out.values - f.values * g.values)) <= 1e-10 * scale
        g2 = Grid(2, 16)
        f2, h2 = band_field(g2, 1, kmax=0), None  # 2-d spot check via randoms
        rng = np.random.default_rng(0)
        f2 = SampledField(g2, rng.normal(size=g2.shape))
        h2 = SampledField(g2, rng.normal(size=g2.shape))
        out2 = apply_bilinear(builtin_symbol("one"), f2, h2)
        assert np.max(np.abs(out2.values - f2.values * h2.values)) <= 1e-10

        # J_w J_{w^-1} = id and <D>^s <D>^{-s} = id
        f = band_field(grid, 42)
        r1 = j_w(RW1, j_w_inv(RW1, f))
        assert np.max(np.abs(r1.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))
        r2 = bessel(-6.0, bessel(6.0, f))
        assert np.max(np.abs(r2.values - f.values)) <= 1e-10 * np.max(np.abs(f.values))

        # tau1 + tau2 = sigma
        sigma = builtin_symbol("riesz-ratio")
        tau1, tau2 = split_sigma(sigma)
        rng = np.random.default_rng(1)
        xi = rng.normal(size=(1, 2000)) * 10 ** rng.uniform(-3, 3, (1, 2000))
        eta = rng.normal(size=(1, 2000)) * 10 ** rng.uniform(-3, 3, (1, 2000))
        np.testing.assert_allclose(
            tau1(xi, eta) + tau2(xi, eta), sigma(xi, eta), rtol=1e-10, atol=0
        )

        # Pi = Pi_1 + Pi_2
        for seed in range(5):
            f, g = band_field(grid, seed), band_field(grid, 50 + seed)
            whole = pi(spec, f, g)
            parts = pi1(spec, f, g) + pi2(spec, f, g)
            bound = 1e-10 * lp_norm(f, 2) * lp_norm(g, 2)
            assert np.max(np.abs(whole.values - parts.values)) <= bound

        # R_t 1 = 0 exactly (annulus profile vanishes at the origin)
        one = SampledField(grid, np.ones(grid.shape))
        F1 = dft(j_w_inv(RW1, one)).coefficients
        for t in tg.nodes[::8]:
            rt = idft(
                SpectralField(grid, F1 * FAM.psi2_hat(t * freq_norm(grid)))
            )
            assert np.max(np.abs(rt.values)) == 0.0

        # resolution of unity sums to 1 on covered radii
        res = ResolutionOfUnity()
        rng = np.random.default_rng(2)
        J = 12
        r = rng.uniform(0, 2.0 ** (J - 1), size=1000)
        total = sum(res.phi_j(j, r) for j in range(J + 1))
        assert np.max(np.abs(total - 1)) <= 1e-10

        # Parseval
        for seed in range(100):
            rng = np.random.default_rng(seed)
            f = SampledField(grid, rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape))
            lhs = np.sum(np.abs(f.values) ** 2) * grid.cell_volume
            rhs = np.sum(np.abs(dft(f).coefficients) ** 2) / grid.L**grid.n
            assert abs(lhs - rhs) <= 1e-10 * lhs

        report("criterion 1 (exact identities): PASS")


class TestCriterion2Calderon:
    def test_normalization_and_reconstruction(self):
        # scalar normalization at 64 points per octave
        err = abs(FAM.normalization_quadrature(64) - 1.0)
        assert err <= 1e-8

        # reconstruction at q = 16 on band-limited inputs
        grid = Grid(1, 512)
        tg = TimeGrid.for_grid(grid, q=16)
        spec = ParaproductSpec(FAM, "one", tg)
        worst = 0.0
        for seed in range(10):
            f = band_field(grid, seed, lo=1)
            out = calderon_reconstruct(spec, f)
            worst = max(worst, lp_norm(out - f, 2) / lp_norm(f, 2))
        assert worst <= 1e-3
        report(
            f"criterion 2 (Calderon normalization {err:.2e}, "
            f"reconstruction err {worst:.2e}): PASS"
        )


class TestCriterion3QuadraticEstimate:
    def test_two_sided(self):
        grid = Grid(1, 512)
        tg = TimeGrid.for_grid(grid, q=16)
        lo, hi = np.inf, 0.0
        for seed in range(50):
            f = band_field(grid, seed, lo=1)
            total = 0.0
            for t in tg.nodes:
                total += lp_norm(q_t(FAM, t, f), 2) ** 2 * tg.delta
            ratio = total / lp_norm(f, 2) ** 2
            lo, hi = min(lo, ratio), max(hi, ratio)
        assert 0.99 <= lo and hi <= 1.001
        report(f"criterion 3 (quadratic estimate in [{lo:.6f}, {hi:.6f}]): PASS")


class TestCriterion4CarlesonOracle:
    def test_single_mode_and_embedding(self):
        grid = Grid(1, 256)
        tg = TimeGrid.for_grid(grid)
        x = grid.axis_points()
        g = SampledField(grid, np.exp(1j * 2 * np.pi * 16 * x / grid.L))
        norm, _ = carleson_norm(band_tent(g, FAM, tg, band="psi"))
        assert norm == pytest.approx(1.0, abs=1e-2)

        G = band_tent(make_field("bmo_log_spike", grid, 0), FAM, tg, band="psi1")
        F = TentFunction(grid, tg, np.ones((len(tg),) + grid.shape))
        ratio = carleson_embedding_ratio(F, G, 2.0)
        assert ratio <= 1.0 + 1e-10
        report(
            f"criterion 4 (single-mode Carleson {norm:.6f}, embedding {ratio:.6f}): PASS"
        )


class TestCriterion5NormEquivalences:
    def _interval(self, fn, grid, trials=100):
        ratios = [fn(grid, seed) for seed in range(trials)]
        return min(ratios), max(ratios)

    @staticmethod
    def _drift_ok(a, b):
        return abs(b / a - 1.0) <= 0.10

    def test_equivalence_intervals_stable(self):
        lines = []

        checks = []
        for p in (4 / 3, 2.0, 4.0):
            checks.append(
                (
                    f"fpw vs jw (p={p:g})",
                    lambda grid, seed, p=p: triebel_norm(band_field(grid, seed), RW1, p)
                    / jw_norm(band_field(grid, seed), RW1, f"lp:{p}"),
                )
            )
        for b in (-1.0, 1.0):
            rwb = regularize(make_log_weight(b))
            checks.append(
                (
                    f"hphi vs jw (b={b:g})",
                    lambda grid, seed, b=b, rwb=rwb: refined_sobolev_norm(
                        band_field(grid, seed), -b
                    )
                    / jw_norm(band_field(grid, seed), rwb, "lp:2"),
                )
            )
        rw0 = regularize(make_log_weight(0.0))

        def xw_vs_sup(grid, seed):
            f = make_field("bounded_trig", grid, seed, kmax=grid.N // 8)
            tg = TimeGrid.for_grid(grid)
            return xw_norm(f, rw0, tg, FAM) / lp_norm(f, np.inf)

        checks.append(("xw(w=1) vs sup", xw_vs_sup))

        for label, fn in checks:
            lo256, hi256 = self._interval(fn, Grid(1, 256))
            lo1024, hi1024 = self._interval(fn, Grid(1, 1024))
            assert self._drift_ok(lo256, lo1024), (label, lo256, lo1024)
            assert self._drift_ok(hi256, hi1024), (label, hi256, hi1024)
            lines.append(
                f"{label}: [{lo256:.3f},{hi256:.3f}] -> [{lo1024:.3f},{hi1024:.3f}]"
            )
        report("criterion 5 (norm equivalences): PASS  " + "; ".join(lines))


SWEEP_CONFIGS = [
    ("T3.2i", {"p": 2.0, "symbol": "one"}),
    ("T3.2i", {"p": 2.0, "symbol": "riesz-ratio"}),
    ("T4.3i", {"p": 4 / 3}),
    ("T4.3i", {"p": 2.0}),
    ("T4.3i", {"p": 4.0}),
    ("T4.3ii-pi1", {}),
    ("T4.3ii-pi2", {}),
    ("L4.2i", {}),
    ("L4.2ii", {}),
    ("KP", {"s": 6.0, "p": 2.0}),
    ("P6.2", {"p": 2.0}),
    ("P6.3", {}),
    ("APPX", {}),
]


class TestCriterion6StabilitySweeps:
    @pytest.mark.parametrize(
        "iid,params", SWEEP_CONFIGS, ids=[f"{i}-{p}" for i, p in SWEEP_CONFIGS]
    )
    def test_sweep(self, iid, params):
        maxima = {}
        for N in (256, 512, 1024):
            rep = estimate_ratio(iid, 200, Grid(1, N), seed=0, params=params)
            maxima[N] = rep.maxima[N]
        d1 = maxima[512] / maxima[256] - 1.0
        d2 = maxima[1024] / maxima[512] - 1.0
        assert abs(d1) <= 0.10 and abs(d2) <= 0.10, (iid, params, maxima)
        report(
            f"criterion 6 [{iid} {params}]: drift {d1:+.3f}, {d2:+.3f} "
            f"(maxima {maxima[256]:.3f}/{maxima[512]:.3f}/{maxima[1024]:.3f}): PASS"
        )


class TestCriterion7NegativeControl:
    def test_neg_grows(self):
        maxima = {}
        for N in (256, 512, 1024):
            rep = estimate_ratio("NEG", 200, Grid(1, N), seed=0)
            maxima[N] = rep.maxima[N]
        growth = maxima[1024] / maxima[256] - 1.0
        assert growth > 0.25, maxima
        report(f"criterion 7 (negative control growth {growth:+.1%}): PASS")


class TestCriterion8ProductReconstruction:
    def test_reconstruction_and_stability(self):
        grid = Grid(1, 256)
        tg = TimeGrid.for_grid(grid)
        spec = ParaproductSpec(FAM, "one", tg)
        worst = 0.0
        for seed in range(100):
            f = band_field(grid, seed)
            g = band_field(grid, 1000 + seed)
            b1, b2 = product_decompose(spec, f, g)
            prod = multiply_dealiased(f, g)
            scale = np.max(np.abs(prod.values)) + 1e-300
            worst = max(
                worst, np.max(np.abs(b1.values + b2.values - prod.values)) / scale
            )
        assert worst <= 1e-9

        # stability of the two component ratios, criterion-6 rule
        stats = {}
        for N in (256, 512, 1024):
            g_ = Grid(1, N)
            tg_ = TimeGrid.for_grid(g_)
            spec_ = ParaproductSpec(FAM, "one", tg_)
            r1max, r2max = 0.0, 0.0
            for seed in range(200):
                f = make_field(
                    "band_gauss", g_, seed * 7 + 1, a=1.0, mean_zero=True
                )
                g = make_field("bmo_log_spike", g_, seed * 7 + 2)
                b1, b2 = product_decompose(spec_, f, g)
                den = h1_norm(f, tg_) * bmo_norm(g)
                r1max = max(r1max, lp_norm(b1, 1.0) / den)
                r2max = max(r2max, jw_norm(b2, RW1, "H1", tg_) / den)
            stats[N] = (r1max, r2max)
        for i in (0, 1):
            d1 = stats[512][i] / stats[256][i] - 1.0
            d2 = stats[1024][i] / stats[512][i] - 1.0
            assert abs(d1) <= 0.10 and abs(d2) <= 0.10, (i, stats)
        report(
            f"criterion 8 (reconstruction err {worst:.2e}; component drifts "
            f"B1 {stats[512][0] / stats[256][0] - 1:+.3f}/"
            f"{stats[1024][0] / stats[512][0] - 1:+.3f}, "
            f"B2 {stats[512][1] / stats[256][1] - 1:+.3f}/"
            f"{stats[1024][1] / stats[512][1] - 1:+.3f}): PASS"
        )


class TestCriterion9SymbolChecker:
    def test_checker(self):
        levels = cm_report(builtin_symbol("one"), 1, max_order=3)
        assert levels[0] == pytest.approx(1.0)
        noise = max(levels[m] for m in (1, 2, 3))
        assert noise <= 1e-6

        scaling = cm_scaling_report(builtin_symbol("abs-xi"), 1, max_order=1)
        assert scaling["non_cm"] and scaling["growth"] > 4.0
        control = cm_scaling_report(builtin_symbol("riesz-ratio"), 1, max_order=1)
        assert not control["non_cm"]
        report(
            f"criterion 9 (constant-symbol noise {noise:.1e}; degree-1 growth "
            f"{scaling['growth']:.1f}x flagged): PASS"
        )
