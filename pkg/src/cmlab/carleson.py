"""Carleson-measure norms over dyadic tents and the embedding checks.

A tent function G(x, t) on grid x time-grid carries the measure
d mu = |G|^2 dx dt/t, discretized as cell weights (L/N)^n Delta.  The
Carleson norm is the max of mu(T(Q)) / |Q| over the dyadic cube family
(with half-shifts), where the tent T(Q) = Q x (0, l(Q)] collects the time
nodes up to the side length.
"""

from dataclasses import dataclass

import numpy as np

from .grid import SampledField, SpectralField, dft, freq_norm, idft
from .multipliers import j_w_inv
from .spaces import BMO_norm, DyadicCubeSet, _cube_blocks, nontangential_max
from .paraproducts import DegenerateDenominator

__all__ = [
    "TentFunction",
    "band_tent",
    "carleson_norm",
    "bmo_carleson_ratio",
    "weighted_band_carleson",
    "carleson_embedding_ratio",
]


@dataclass(frozen=True)
class TentFunction:
    """Values G(x, t_j) on grid x TimeGrid; shape (len(tgrid),) + grid.shape."""

    grid: object
    tgrid: object
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=complex)
        expect = (len(self.tgrid),) + self.grid.shape
        if v.shape != expect:
            raise ValueError(f"tent values shape {v.shape} != {expect}")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("tent function contains non-finite values")
        object.__setattr__(self, "values", v)

    def density(self):
        """|G|^2 Delta per node: the measure density against dx."""
        return np.abs(self.values) ** 2 * self.tgrid.delta


def band_tent(g, fam, tgrid, band="psi1"):
    """Tent function G(x, t) = (band-profile at scale t applied to g)(x)."""
    F = dft(g)
    r = freq_norm(g.grid)
    prof = fam.profile(band)
    rows = []
    for t in tgrid.nodes:
        rows.append(idft(SpectralField(g.grid, F.coefficients * prof(t * r))).values)
    return TentFunction(g.grid, tgrid, np.stack(rows))


def carleson_norm(G):
    """Max over dyadic cubes of mu(T(Q)) / |Q|, with the witness cube.

    Tents are truncated at the time grid's range; cubes at generation 0 are
    the whole torus, so every node t <= L is inside some tent.
    """
    grid, tgrid = G.grid, G.tgrid
    nodes = tgrid.nodes
    density = G.density() * grid.cell_volume  # per-cell mass, shape (nt,)+shape
    order = np.argsort(nodes)  # ascending in t
    sorted_nodes = nodes[order]
    cum = np.cumsum(density[order], axis=0)

    best = 0.0
    witness = None
    cubes = DyadicCubeSet(grid)
    for g, side, m in cubes.generations():
        idx = np.searchsorted(sorted_nodes, side, side="right") - 1
        if idx < 0:
            continue  # every node sits above this tent
        mass = cum[idx]
        for shift in cubes.shifts(m):
            blocks, kshape = _cube_blocks(mass, m, shift)
            sums = np.sum(blocks, axis=-1) / side**grid.n
            i = int(np.argmax(sums))
            v = float(sums.ravel()[i])
            if v > best:
                best = v
                witness = {
                    "generation": g,
                    "side": side,
                    "shift": shift,
                    "index": tuple(int(v) for v in np.unravel_index(i, kshape)),
                }
    return best, witness


def bmo_carleson_ratio(g, fam, tgrid):
    """carleson_norm of |Q_t^(1) g|^2 dx dt/t relative to BMO(g)^2."""
    b = BMO_norm(g)
    if b == 0.0:
        raise DegenerateDenominator("constant input has zero BMO norm")
    norm, _ = carleson_norm(band_tent(g, fam, tgrid, "psi1"))
    return norm / b**2


def weighted_band_carleson(h, rw, fam, tgrid, trials=16, seed=0):
    """Quadratic and Carleson constants of R_t = w(t) Q_t^(2) J_{w^-1}.

    Checks R_t 1 = 0 exactly (the annulus profile vanishes at the origin),
    then returns (C_quad, carleson_ratio): the largest ratio
    sum_j ||R_{t_j} f||_2^2 Delta / ||f||_2^2 over a random band-limited
    family, and carleson_norm(|R_t h|^2 dx dt/t) / BMO(h)^2.
    """
    grid = h.grid
    r = freq_norm(grid)
    w = rw.source
    nodes = tgrid.nodes
    if fam.psi2_hat(np.zeros(1))[0] != 0.0:
        raise AssertionError("annulus profile must vanish at the origin")

    # multiplier of R_t per node; M(xi) = sum_j |w(t_j) psi2(t_j xi)/w(xi)|^2 Delta
    wsym = rw(r)
    M = np.zeros(grid.shape)
    mults = []
    for t in nodes:
        mult = float(w(t)) * fam.psi2_hat(t * r) / wsym
        mults.append(mult)
        M += mult**2
    M *= tgrid.delta

    rng = np.random.Generator(np.random.Philox(key=seed))
    c_quad = 0.0
    kmax = grid.N // 8
    for _ in range(trials):
        spec = np.zeros(grid.shape, dtype=complex)
        if grid.n == 1:
            ks = rng.integers(1, kmax + 1, size=8)
            spec[ks] = rng.normal(size=8) + 1j * rng.normal(size=8)
        else:
            ks = rng.integers(1, kmax + 1, size=(8, 2))
            spec[ks[:, 0], ks[:, 1]] = rng.normal(size=8) + 1j * rng.normal(size=8)
        p = np.sum(np.abs(spec) ** 2)
        c_quad = max(c_quad, float(np.sum(M * np.abs(spec) ** 2) / p))

    H = dft(h)
    rows = [idft(SpectralField(grid, H.coefficients * m)).values for m in mults]
    tent = TentFunction(grid, tgrid, np.stack(rows))
    b = BMO_norm(h)
    if b == 0.0:
        raise DegenerateDenominator("constant input has zero BMO norm")
    norm, _ = carleson_norm(tent)
    return c_quad, norm / b**2


def carleson_embedding_ratio(F, G, p):
    """Embedding ratio: int |F|^p d mu_G over carleson(G) * int (F*)^p dx.

    F* is the nontangential maximal function of F over the tent nodes.
    Equals at most 1 (up to rounding) for F = 1 by definition of the
    Carleson norm with the whole torus as cube.
    """
    if not 1 <= p <= 4:
        raise ValueError("p must lie in [1, 4]")
    if F.grid != G.grid or F.tgrid != G.tgrid:
        raise ValueError("tent functions must share grid and time grid")
    grid, tgrid = F.grid, F.tgrid
    num = float(np.sum(np.abs(F.values) ** p * G.density()) * grid.cell_volume)
    cnorm, _ = carleson_norm(G)
    fstar = nontangential_max(np.abs(F.values), tgrid.nodes, grid)
    den = cnorm * float(np.sum(fstar**p) * grid.cell_volume)
    if den == 0.0:
        if num == 0.0:
            return 0.0
        raise DegenerateDenominator("trivial tent inputs")
    return num / den
