"""Paraproducts, their exact two-term decomposition, and product splitting.

The paraproduct of two fields is the discretized scale integral

    Pi(f, g) = sum_j (Q_{t_j} f) (P_{t_j} g) m(t_j) Delta,

with the band/low-pass operators of an LPFamily on a dyadic TimeGrid.  The
localized variants

    Pi_1(f, g) = sum_j Q^(2)_{t_j} [ (Q_{t_j} f)(P^(1)_{t_j} g) ] m Delta
    Pi_2(f, g) = sum_j P^(2)_{t_j} [ (Q_{t_j} f)(Q^(1)_{t_j} g) ] m Delta

satisfy Pi = Pi_1 + Pi_2 exactly: phi = phi^(1) + psi^(1) splits the low
pass, and the outer profiles are identically one on the spectral support of
the corresponding products.  All products are computed alias-free on a
factor-2 padded grid and the outer multipliers act on the padded spectrum.

product_decompose realizes the pointwise product f g as B1 + B2 through the
sigma = 1 instance of this machinery: f is split into a mollified part and a
high part, the high part is reproduced exactly through the normalized band
family (the dyadic lattice sum of |psi_hat|^2 is divided out, so the
reconstruction is exact on the grid rather than exact only up to quadrature),
and the band-localized term of the high part lands in B2 while everything
else lands in B1.
"""

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, SampledField, SpectralField, dft, freq_norm, idft
from .multipliers import j_w_inv, standard_family
from .spaces import MollifierProfile, bmo_norm, jw_norm, lp_norm
from .timegrid import TimeGrid

__all__ = [
    "ParaproductSpec",
    "DegenerateDenominator",
    "pi",
    "pi1",
    "pi2",
    "calderon_reconstruct",
    "calderon_weight",
    "product_decompose",
    "kato_ponce_ratio",
]


class DegenerateDenominator(ZeroDivisionError):
    """A ratio's denominator vanished (both inputs trivial)."""


def _m_values(m, nodes):
    if m is None or m == "one":
        return np.ones(len(nodes))
    if m == "alt":
        # sign flips on octaves: stresses the bounded-m hypothesis
        return np.where((np.floor(np.log2(nodes)).astype(int) % 2) == 0, 1.0, -1.0)
    return np.array([float(m(t)) for t in nodes])


@dataclass(frozen=True)
class ParaproductSpec:
    """Family + bounded scale factor m + time grid for one paraproduct."""

    fam: object
    m: object
    tgrid: TimeGrid

    @property
    def m_inf(self):
        return float(np.max(np.abs(_m_values(self.m, self.tgrid.nodes))))


@lru_cache(maxsize=16)
def _profile_stack(fam, grid, tgrid, name):
    """profile(t_j |xi|) for all nodes; cached for 1-d grids."""
    r = freq_norm(grid)
    ts = tgrid.nodes
    prof = fam.profile(name)
    return prof(ts[:, None] * r[None, :])


def _profile_at(fam, grid, tgrid, name, j):
    if grid.n == 1:
        return _profile_stack(fam, grid, tgrid, name)[j]
    return fam.profile(name)(tgrid.nodes[j] * freq_norm(grid))


def _embed(coeffs, grid, big):
    C = np.fft.fftshift(coeffs)
    out = np.zeros(big.shape, dtype=complex)
    lo = big.N // 2 - grid.N // 2
    sl = (slice(lo, lo + grid.N),) * grid.n
    out[sl] = C
    return np.fft.ifftshift(out)


def _pad_values(coeffs, grid, big):
    """Real-space samples on the padded grid of the field with these coeffs."""
    return np.fft.ifftn(_embed(coeffs, grid, big)) * (big.N / big.L) ** big.n


def _fold(values_big, grid):
    sub = (slice(None, None, 2),) * grid.n
    return SampledField(grid, values_big[sub])


def pi(spec, f, g):
    """The paraproduct sum_j (Q_t f)(P_t g) m(t) Delta, alias-free."""
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("paraproduct arguments must share a grid")
    grid = f.grid
    big = Grid(grid.n, 2 * grid.N, grid.L)
    F, G = dft(f).coefficients, dft(g).coefficients
    mvals = _m_values(spec.m, spec.tgrid.nodes)
    acc = np.zeros(big.shape, dtype=complex)
    for j in range(len(spec.tgrid)):
        if mvals[j] == 0.0:
            continue
        qf = _pad_values(F * _profile_at(spec.fam, grid, spec.tgrid, "psi", j), grid, big)
        pg = _pad_values(G * _profile_at(spec.fam, grid, spec.tgrid, "phi", j), grid, big)
        acc += (mvals[j] * spec.tgrid.delta) * (qf * pg)
    return _fold(acc, grid)


def _pi_localized(spec, f, g, inner_name, outer_name):
    grid = f.grid
    big = Grid(grid.n, 2 * grid.N, grid.L)
    rb = freq_norm(big)
    F, G = dft(f).coefficients, dft(g).coefficients
    mvals = _m_values(spec.m, spec.tgrid.nodes)
    outer = spec.fam.profile(outer_name)
    acc_hat = np.zeros(big.shape, dtype=complex)
    for j, t in enumerate(spec.tgrid.nodes):
        if mvals[j] == 0.0:
            continue
        qf = _pad_values(F * _profile_at(spec.fam, grid, spec.tgrid, "psi", j), grid, big)
        ig = _pad_values(
            G * _profile_at(spec.fam, grid, spec.tgrid, inner_name, j), grid, big
        )
        prod_hat = np.fft.fftn(qf * ig)
        acc_hat += (mvals[j] * spec.tgrid.delta) * (outer(t * rb) * prod_hat)
    return _fold(np.fft.ifftn(acc_hat), grid)


def pi1(spec, f, g):
    """Band-output term: outer annulus profile around each product band."""
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("paraproduct arguments must share a grid")
    return _pi_localized(spec, f, g, "phi1", "psi2")


def pi2(spec, f, g):
    """Balanced term: both arguments band-limited, low-pass output."""
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("paraproduct arguments must share a grid")
    return _pi_localized(spec, f, g, "psi1", "phi2")


@lru_cache(maxsize=16)
def _calderon_weight_cached(fam, grid, tgrid):
    r = freq_norm(grid)
    ts = tgrid.nodes
    if grid.n == 1:
        psi = fam.psi_hat(ts[:, None] * r[None, :])
        out = np.sum(psi**2, axis=0) * tgrid.delta
    else:
        out = np.zeros(grid.shape)
        for t in ts:
            out += fam.psi_hat(t * r) ** 2
        out *= tgrid.delta
    out.setflags(write=False)
    return out


def calderon_weight(fam, grid, tgrid):
    """The dyadic lattice sum omega(xi) = sum_j psi_hat(t_j |xi|)^2 Delta.

    Equals 1 exactly on every covered frequency when the octave count q is a
    multiple of 8 (the band profile tiles the dyadic lattice by construction).
    """
    return _calderon_weight_cached(fam, grid, tgrid)


def calderon_reconstruct(spec, f):
    """sum_j Q_{t_j} Q_{t_j} f Delta: the identity on covered bands."""
    omega = calderon_weight(spec.fam, f.grid, spec.tgrid)
    F = dft(f)
    return idft(SpectralField(f.grid, F.coefficients * omega))


def product_decompose(spec, f, g, mollifier=None):
    """Split the pointwise product f g into B1 + B2 (exactly).

    B2 is the band-localized paraproduct term of the high part of f: with
    u_j the exactly-normalized band pieces of Hf = f - Phi * f,

        B2 = sum_j Q^(2)_{t_j} [ u_j (P^(1)_{t_j} g) ].

    B1 collects everything else: (Phi * f) g, the balanced terms
    sum_j P^(2)_{t_j} [ u_j (Q^(1)_{t_j} g) ], and the high-high remainder
    Hf g - sum_j u_j (P_{t_j} g).  The scale factor m plays no role here
    (the reconstruction needs unit weights); spec supplies the family and
    the time grid.
    """
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("product arguments must share a grid")
    grid = f.grid
    big = Grid(grid.n, 2 * grid.N, grid.L)
    rb = freq_norm(big)
    moll = mollifier if mollifier is not None else MollifierProfile()
    fam, tgrid = spec.fam, spec.tgrid

    F, G = dft(f).coefficients, dft(g).coefficients
    low = moll.resolution.phi0(freq_norm(grid))
    LF = F * low
    HF = F - LF
    omega = calderon_weight(fam, grid, tgrid)
    safe = np.where(omega > 1e-14, omega, 1.0)

    g_pad = _pad_values(G, grid, big)
    lf_pad = _pad_values(LF, grid, big)
    hf_pad = _pad_values(HF, grid, big)

    b2_hat = np.zeros(big.shape, dtype=complex)
    bal_hat = np.zeros(big.shape, dtype=complex)
    main = np.zeros(big.shape, dtype=complex)
    psi2 = fam.psi2_hat
    phi2 = fam.phi2_hat
    for j, t in enumerate(tgrid.nodes):
        band = _profile_at(fam, grid, tgrid, "psi", j) ** 2 * tgrid.delta
        u = _pad_values(HF * np.where(omega > 1e-14, band / safe, 0.0), grid, big)
        p1g = _pad_values(G * _profile_at(fam, grid, tgrid, "phi1", j), grid, big)
        q1g = _pad_values(G * _profile_at(fam, grid, tgrid, "psi1", j), grid, big)
        ptg = _pad_values(G * _profile_at(fam, grid, tgrid, "phi", j), grid, big)
        b2_hat += psi2(t * rb) * np.fft.fftn(u * p1g)
        bal_hat += phi2(t * rb) * np.fft.fftn(u * q1g)
        main += u * ptg

    b2_pad = np.fft.ifftn(b2_hat)
    b1_pad = lf_pad * g_pad + np.fft.ifftn(bal_hat) + (hf_pad * g_pad - main)
    return _fold(b1_pad, grid), _fold(b2_pad, grid)


def kato_ponce_ratio(f, g, s, p, rw):
    """Fractional-Leibniz ratio for the weighted product inequality.

    jw_norm(<D>^s (f g), rw, L^p) over
    ||<D>^s f||_p * bmo(g) + ||f||_p * bmo(<D>^s g).
    """
    from .multipliers import bessel, multiply_dealiased

    n = f.grid.n
    if s <= 4 * n + 1:
        warnings.warn(f"s = {s} is below the derivative budget 4n+1 = {4 * n + 1}",
                      stacklevel=2)
    num = jw_norm(bessel(s, multiply_dealiased(f, g)), rw, f"lp:{p}")
    den = lp_norm(bessel(s, f), p) * bmo_norm(g) + lp_norm(f, p) * bmo_norm(
        bessel(s, g)
    )
    if den == 0.0:
        if num == 0.0:
            return 0.0
        raise DegenerateDenominator("both factors are trivial")
    return num / den
