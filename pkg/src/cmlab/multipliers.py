"""Linear and bilinear Fourier multipliers on the periodic grid.

Linear side: the band/low-pass family Q_t, P_t and its auxiliary profiles,
Bessel potentials <D>^s, and the weight multipliers J_w, J_{w^-1}.

Bilinear side: T_sigma(f, g)(x) = L^{-2n} sum_{k,l} sigma(xi_k, xi_l)
f_hat(k) g_hat(l) exp(i x (xi_k + xi_l)), evaluated alias-free on a
factor-2 zero-padded grid and resampled back, together with a
finite-difference checker for the multiplier class

    |d^a_xi d^b_eta sigma| <= C (|xi| + |eta|)^{-a-b}

and the smooth high/low splitting sigma = tau_1 + tau_2.

Symbols receive frequency arguments as arrays whose FIRST axis indexes the
space dimension: sigma(xi, eta) with xi.shape == eta.shape == (n, ...).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bumps import plateau, ramp_down, ramp_up, smooth_step
from .grid import Grid, SampledField, SpectralField, dft, freq_norm, idft, zero_pad
from .weights import fd_weights

__all__ = [
    "LPFamily",
    "BilinearSymbol",
    "NonFiniteError",
    "standard_family",
    "apply_linear",
    "apply_radial",
    "q_t",
    "p_t",
    "q1_t",
    "p1_t",
    "q2_t",
    "p2_t",
    "bessel",
    "j_w",
    "j_w_inv",
    "apply_bilinear",
    "multiply_dealiased",
    "cm_constant",
    "cm_report",
    "cm_scaling_report",
    "split_sigma",
    "builtin_symbol",
]

LOG2 = math.log(2.0)


class NonFiniteError(ArithmeticError):
    """Finite differencing of a symbol produced a non-finite value."""


@dataclass(frozen=True)
class LPFamily:
    """Radial Fourier-side profiles for the scale-t localization operators.

    psi_hat is supported in the ring {4/5 <= |xi| <= 6/5} and normalized so
    that  int_0^inf |psi_hat(s)|^2 ds/s = 1  holds exactly: |psi_hat(2^u)|^2
    is the telescoped step G(u) - G(u - s0) divided by s0 ln 2, so shifted
    dyadic sums at q points per octave are exactly constant whenever q*s0 is
    an integer (q a multiple of 8 for the default s0 = 3/8).

    phi_hat is 1 on the ball {|xi| <= 6/5} (hence on supp psi_hat) and
    supported in {|xi| <= 8/5}.  phi1_hat is 1 up to r/3 and supported in
    {|xi| <= r/2}; psi1_hat := phi_hat - phi1_hat.  psi2_hat vanishes at 0
    and is 1 on {2/5 <= |xi| <= 9/5}; phi2_hat is 1 on {|xi| <= 14/5} so the
    outer operators act as the identity on every product band arising in the
    paraproduct decomposition.
    """

    r: float = 4.0 / 5.0
    R: float = 6.0 / 5.0
    s0: float = 3.0 / 8.0
    rise: float = 0.2
    margin: float = 0.005

    @property
    def _alpha(self):
        return math.log2(self.r) + self.margin

    def psi_hat(self, s):
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        pos = s > 0
        if np.any(pos):
            u = np.log2(s[pos])
            v = smooth_step((u - self._alpha) / self.rise) - smooth_step(
                (u - self._alpha - self.s0) / self.rise
            )
            out[pos] = np.sqrt(np.maximum(v, 0.0) / (self.s0 * LOG2))
        return out

    def phi_hat(self, s):
        return ramp_down(np.abs(s), self.R, 2.0 * self.r)

    def phi1_hat(self, s):
        return ramp_down(np.abs(s), self.r / 3.0, self.r / 2.0)

    def psi1_hat(self, s):
        return self.phi_hat(s) - self.phi1_hat(s)

    def psi2_hat(self, s):
        return plateau(np.abs(s), self.r / 4.0, self.r / 2.0, 1.5 * self.R, 2.0)

    def phi2_hat(self, s):
        return ramp_down(np.abs(s), 7.0 * self.R / 3.0, 8.0 * self.R / 3.0)

    def profile(self, name):
        return {
            "psi": self.psi_hat,
            "phi": self.phi_hat,
            "psi1": self.psi1_hat,
            "phi1": self.phi1_hat,
            "psi2": self.psi2_hat,
            "phi2": self.phi2_hat,
        }[name]

    def normalization_quadrature(self, pts_per_octave=64):
        """Midpoint log-quadrature of int |psi_hat(s)|^2 ds/s (should be 1)."""
        h = LOG2 / pts_per_octave
        a, b = math.log(0.7), math.log(1.3)
        m = int(math.ceil((b - a) / h))
        s = np.exp(a + (np.arange(m) + 0.5) * h)
        return float(np.sum(self.psi_hat(s) ** 2) * h)


_STANDARD = LPFamily()


def standard_family():
    return _STANDARD


def apply_linear(symbol, f):
    """Apply a Fourier multiplier given as symbol(xi), xi of shape (n,)+grid."""
    from .grid import freq_vectors

    F = dft(f)
    mult = symbol(freq_vectors(f.grid))
    return idft(SpectralField(f.grid, F.coefficients * mult))


def apply_radial(profile, f, t=1.0):
    """Apply a radial multiplier profile(t * |xi|)."""
    F = dft(f)
    mult = profile(t * freq_norm(f.grid))
    return idft(SpectralField(f.grid, F.coefficients * mult))


def q_t(fam, t, f):
    """Band-pass at scale t: multiplier psi_hat(t |xi|)."""
    return apply_radial(fam.psi_hat, f, t)


def p_t(fam, t, f):
    """Low-pass at scale t: multiplier phi_hat(t |xi|)."""
    return apply_radial(fam.phi_hat, f, t)


def q1_t(fam, t, f):
    return apply_radial(fam.psi1_hat, f, t)


def p1_t(fam, t, f):
    return apply_radial(fam.phi1_hat, f, t)


def q2_t(fam, t, f):
    return apply_radial(fam.psi2_hat, f, t)


def p2_t(fam, t, f):
    return apply_radial(fam.phi2_hat, f, t)


def bessel(s, f):
    """Bessel potential <D>^s, multiplier (1 + |xi|^2)^{s/2}; exact on the grid."""
    F = dft(f)
    mult = (1.0 + freq_norm(f.grid) ** 2) ** (s / 2.0)
    return idft(SpectralField(f.grid, F.coefficients * mult))


def j_w(rw, f):
    """Multiplier w(xi) for a regularized weight."""
    F = dft(f)
    return idft(SpectralField(f.grid, F.coefficients * rw(freq_norm(f.grid))))


def j_w_inv(rw, f):
    """Multiplier 1/w(xi); exact inverse of :func:`j_w` on the grid."""
    F = dft(f)
    return idft(SpectralField(f.grid, F.coefficients / rw(freq_norm(f.grid))))


# ---------------------------------------------------------------------------
# bilinear multipliers


@dataclass(frozen=True)
class BilinearSymbol:
    """Symbol sigma(xi, eta) with metadata.

    fn_name selects a registered evaluator (keeps the object hashable so
    per-grid symbol matrices can be cached); params are passed through.
    support declares a known support region, one of None, "hi" (|xi| >=
    |eta|/20) or "lo" (|xi| <= |eta|/10).  origin is the declared value at
    (0, 0), where the continuum symbol need not be defined: 0 by default,
    or the limit along xi = eta for symbols where that limit exists (the
    constant symbol declares 1 so that T_1 is exactly the product).
    """

    fn_name: str
    params: tuple = ()
    support: str | None = None
    origin: float = 0.0

    def __call__(self, xi, eta):
        fn = _SYMBOL_REGISTRY[self.fn_name]
        out = fn(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float), *self.params)
        at0 = np.all(xi == 0, axis=0) & np.all(eta == 0, axis=0)
        if np.any(at0):
            out = np.where(at0, self.origin, out)
        return out

    @property
    def label(self):
        return f"{self.fn_name}{self.params if self.params else ''}"


def _vnorm(v):
    return np.sqrt(np.sum(np.asarray(v, dtype=float) ** 2, axis=0))


def _sym_one(xi, eta):
    return np.ones(np.broadcast(xi[0], eta[0]).shape)


def _sym_riesz_ratio(xi, eta):
    bx = np.sqrt(1.0 + _vnorm(xi) ** 2)
    by = np.sqrt(1.0 + _vnorm(eta) ** 2)
    return bx / (bx + by)


def _sym_kato_ponce_b1(xi, eta, s):
    # low-modulation cut: 1 where |eta| <= |xi|/4, 0 where |eta| >= |xi|/2
    nx, ny = _vnorm(xi), _vnorm(eta)
    sm = _vnorm(xi + eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(nx > 0, ny / np.where(nx > 0, nx, 1.0), np.inf)
    cut = ramp_down(ratio, 0.25, 0.5)
    return ((1.0 + sm**2) / (1.0 + nx**2)) ** (s / 2.0) * cut


def _sym_abs_xi(xi, eta):
    return _vnorm(xi)


def _sym_scaled(xi, eta, base_name, *params):
    return _SYMBOL_REGISTRY[base_name](xi, eta, *params)


def _sym_chi_hi(xi, eta, base_name, *params):
    base = _SYMBOL_REGISTRY[base_name](xi, eta, *params)
    return base * _chi_split(xi, eta)


def _sym_chi_lo(xi, eta, base_name, *params):
    # subtraction form: tau1 + tau2 recovers sigma exactly wherever the
    # cutoff is exactly 0 or 1, and to a rounding error on the transition
    base = _SYMBOL_REGISTRY[base_name](xi, eta, *params)
    return base - base * _chi_split(xi, eta)


def _chi_split(xi, eta):
    # smooth step in 20|xi|/|eta|: 0 for ratio <= 1, 1 for ratio >= 2,
    # and 1 on the slice eta = 0
    nx, ny = _vnorm(xi), _vnorm(eta)
    zero_eta = ny == 0
    ratio = 20.0 * nx / np.where(zero_eta, 1.0, ny)
    chi = smooth_step(ratio - 1.0)
    return np.where(zero_eta, 1.0, chi)


_SYMBOL_REGISTRY = {
    "one": _sym_one,
    "riesz-ratio": _sym_riesz_ratio,
    "kato-ponce-b1": _sym_kato_ponce_b1,
    "abs-xi": _sym_abs_xi,
    "chi-hi": _sym_chi_hi,
    "chi-lo": _sym_chi_lo,
}

BUILTIN_SYMBOLS = ("one", "riesz-ratio", "kato-ponce-b1")


def builtin_symbol(name, s=6.0):
    """Built-in symbols: "one", "riesz-ratio", "kato-ponce-b1" (see README)."""
    if name == "one":
        return BilinearSymbol("one", origin=1.0)
    if name == "riesz-ratio":
        return BilinearSymbol("riesz-ratio", origin=0.5)
    if name == "kato-ponce-b1":
        return BilinearSymbol("kato-ponce-b1", (float(s),))
    if name == "abs-xi":  # degree-1 negative control for the class checker
        return BilinearSymbol("abs-xi")
    raise ValueError(f"unknown symbol {name!r}")


def split_sigma(sigma):
    """Split sigma = tau1 + tau2 with tau1 carried by {|xi| >= |eta|/20}
    and tau2 by {|xi| <= |eta|/10}; the sum is exact by construction
    (tau2 evaluates sigma minus sigma times the cutoff).  The cutoff is 1 on
    the slice eta = 0, so tau1 inherits sigma's declared origin value."""
    tau1 = BilinearSymbol(
        "chi-hi", (sigma.fn_name,) + sigma.params, support="hi", origin=sigma.origin
    )
    tau2 = BilinearSymbol(
        "chi-lo", (sigma.fn_name,) + sigma.params, support="lo", origin=0.0
    )
    return tau1, tau2


@lru_cache(maxsize=8)
def _symbol_matrix(sigma, grid):
    """sigma evaluated on all centered frequency pairs of the grid."""
    k = np.arange(grid.N) - grid.N // 2
    xi_axis = 2.0 * np.pi * k / grid.L
    if grid.n == 1:
        XI = xi_axis[None, :, None]
        ETA = xi_axis[None, None, :]
        XI, ETA = np.broadcast_arrays(XI, ETA)
        return sigma(XI, ETA)
    # n == 2: matrix indexed by flattened centered indices (N^2, N^2) is too
    # large; evaluated row-by-row in apply_bilinear instead
    raise ValueError("symbol matrices are only cached for n = 1")


def multiply_dealiased(f, g):
    """Pointwise product computed alias-free: pad spectra by 2, multiply,
    resample on the original grid.  Equals values*values up to rounding."""
    Fp = zero_pad(dft(f), 2)
    Gp = zero_pad(dft(g), 2)
    prod = idft(Fp).values * idft(Gp).values
    sub = (slice(None, None, 2),) * f.grid.n
    return SampledField(f.grid, prod[sub])


def apply_bilinear(sigma, f, g):
    """Evaluate T_sigma(f, g) by the exact double spectral sum.

    Output frequencies xi + eta are collected on a factor-2 padded grid
    (alias-free by construction since |k+l| <= N) and the result is sampled
    back on the input grid.  sigma == "one" reduces to the pointwise product.
    """
    if f.grid != g.grid:
        from .grid import GridMismatchError

        raise GridMismatchError("bilinear arguments must share a grid")
    grid = f.grid
    if sigma.fn_name == "one":
        return multiply_dealiased(f, g)

    n, N = grid.n, grid.N
    F = np.fft.fftshift(dft(f).coefficients)
    G = np.fft.fftshift(dft(g).coefficients)
    big = Grid(n, 2 * N, grid.L)
    C = np.zeros(big.shape, dtype=complex)

    if n == 1:
        S = _symbol_matrix(sigma, grid)
        for i in range(N):
            if F[i] == 0:
                continue
            C[i : i + N] += (F[i] * S[i]) * G
    else:
        k = np.arange(N) - N // 2
        xi_axis = 2.0 * np.pi * k / grid.L
        ETA = np.stack(np.meshgrid(xi_axis, xi_axis, indexing="ij"))
        for i1 in range(N):
            row_nonzero = np.nonzero(F[i1])[0]
            if row_nonzero.size == 0:
                continue
            for i2 in row_nonzero:
                XI = np.array([xi_axis[i1], xi_axis[i2]])[:, None, None]
                S = sigma(np.broadcast_to(XI, ETA.shape), ETA)
                C[i1 : i1 + N, i2 : i2 + N] += (F[i1, i2] * S) * G

    coeffs = np.fft.ifftshift(C) / grid.L**n
    padded = idft(SpectralField(big, coeffs))
    sub = (slice(None, None, 2),) * n
    return SampledField(grid, padded.values[sub])


# ---------------------------------------------------------------------------
# multiplier-class checker


def _fd_mixed(sigma, base_xi, base_eta, alpha, beta, h):
    """Central mixed finite difference d^alpha_xi d^beta_eta sigma, 4th order."""
    n = len(base_xi)
    axes = []
    for comp, a in enumerate(alpha):
        if a:
            axes.append(("xi", comp, a))
    for comp, b in enumerate(beta):
        if b:
            axes.append(("eta", comp, b))
    if not axes:
        val = sigma(np.array(base_xi)[:, None], np.array(base_eta)[:, None])[0]
        return float(val)

    stencils = [(_cached_stencil(a)) for (_, _, a) in axes]
    grids = np.meshgrid(*[s[0] for s in stencils], indexing="ij")
    wgrids = np.meshgrid(*[s[1] for s in stencils], indexing="ij")
    weight = np.ones(grids[0].shape)
    for wg in wgrids:
        weight = weight * wg
    npts = grids[0].size

    XI = np.tile(np.array(base_xi, dtype=float)[:, None], (1, npts))
    ETA = np.tile(np.array(base_eta, dtype=float)[:, None], (1, npts))
    for (which, comp, _), og in zip(axes, grids):
        off = og.ravel() * h
        if which == "xi":
            XI[comp] += off
        else:
            ETA[comp] += off
    vals = sigma(XI, ETA)
    total_order = sum(a for (_, _, a) in axes)
    return float(np.sum(weight.ravel() * vals) / h**total_order)


@lru_cache(maxsize=32)
def _cached_stencil(order):
    npts = order + 3 if order % 2 == 0 else order + 4
    if npts % 2 == 0:
        npts += 1
    offs = np.arange(npts, dtype=float) - npts // 2
    return offs, fd_weights(order, offs)


def _multi_indices(n, total):
    """All multi-indices in N^n with |alpha| == total."""
    if n == 1:
        return [(total,)]
    return [(a, total - a) for a in range(total + 1)]


def _sample_points(n, octave_lo=-3, octave_hi=6):
    pts = []
    radii = [2.0**m for m in range(octave_lo, octave_hi + 1)]
    if n == 1:
        dirs = [(1.0,), (-1.0,)]
    else:
        inv = 1.0 / math.sqrt(2.0)
        dirs = [(1.0, 0.0), (0.0, 1.0), (inv, inv), (-inv, inv)]
    for rx in radii:
        for ry in radii:
            for dx in dirs:
                for dy in dirs:
                    pts.append(
                        (tuple(rx * c for c in dx), tuple(ry * c for c in dy))
                    )
    return pts


def cm_report(sigma, n, max_order=None, step_scale=2.0**-8, octave_hi=6):
    """Largest scaled derivative per total order |alpha| + |beta|.

    Reports sup over log-spaced sample points of
    |D^alpha_xi D^beta_eta sigma| (|xi| + |eta|)^{|alpha|+|beta|}.
    """
    if max_order is None:
        max_order = 4 * n + 1
    pts = _sample_points(n, octave_hi=octave_hi)
    levels = {}
    for total in range(max_order + 1):
        best = 0.0
        for ta in range(total + 1):
            tb = total - ta
            for alpha in _multi_indices(n, ta):
                for beta in _multi_indices(n, tb):
                    for base_xi, base_eta in pts:
                        s = sum(abs(c) for c in base_xi) + sum(
                            abs(c) for c in base_eta
                        )
                        h = step_scale * s
                        d = _fd_mixed(sigma, base_xi, base_eta, alpha, beta, h)
                        if not math.isfinite(d):
                            raise NonFiniteError(
                                f"non-finite difference at order {total}"
                            )
                        best = max(best, abs(d) * s**total)
        levels[total] = best
    return levels


def cm_constant(sigma, n, max_order=None, step_scale=2.0**-8):
    """Largest constant over all tested derivative orders (see cm_report)."""
    return max(cm_report(sigma, n, max_order, step_scale).values())


def cm_scaling_report(sigma, n, max_order=2, octave_windows=((-3, 2), (0, 5), (3, 8))):
    """Scaling-law test: the class constant re-measured on shifted octave
    windows.  A symbol of positive homogeneity shows monotone growth by
    roughly 2^degree per octave shift; the symbol is flagged non-CM when the
    constant grows by more than 4x across the windows."""
    consts = []
    for lo, hi in octave_windows:
        pts = _sample_points(n, octave_lo=lo, octave_hi=hi)
        best = 0.0
        for total in range(max_order + 1):
            for ta in range(total + 1):
                for alpha in _multi_indices(n, ta):
                    for beta in _multi_indices(n, total - ta):
                        for base_xi, base_eta in pts:
                            s = sum(abs(c) for c in base_xi) + sum(
                                abs(c) for c in base_eta
                            )
                            h = 2.0**-8 * s
                            d = _fd_mixed(sigma, base_xi, base_eta, alpha, beta, h)
                            best = max(best, abs(d) * s**total)
        consts.append(best)
    growth = consts[-1] / consts[0] if consts[0] > 0 else math.inf
    return {"window_constants": consts, "growth": growth, "non_cm": growth > 4.0}
