"""Periodic grid, discrete Fourier transform and field containers.

The domain is the torus [0, L)^n sampled at N points per axis, with
sample points x_k = k L / N and integer frequencies k in [-N/2, N/2)^n
carrying the physical frequency xi_k = 2 pi k / L.

Transform convention (continuum-like):

    dft:   f_hat(k) = (L/N)^n  sum_x f(x) exp(-i xi_k . x)
    idft:  f(x)     = L^{-n}   sum_k f_hat(k) exp(+i xi_k . x)

so a constant field c has a single coefficient c * L^n at k = 0, and
Parseval reads  (L/N)^n sum |f|^2 = L^{-n} sum |f_hat|^2  exactly.
Coefficient arrays are stored in numpy FFT order.
"""

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Grid",
    "GridMismatchError",
    "SampledField",
    "SpectralField",
    "dft",
    "idft",
    "integrate",
    "zero_pad",
    "restrict",
    "freq_vectors",
    "freq_norm",
    "save_field",
    "load_field",
]


class GridMismatchError(ValueError):
    """Arithmetic attempted between fields living on different grids."""


def _is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic grid on [0, L)^n with N points per axis.

    n must be 1 or 2, N a power of two >= 16, and L > 2 (so that cubes of
    side >= 1 and side < 1 both exist for the local-oscillation norms).
    The bilinear double sums are O(N^{2n}); N is capped at 4096 for n = 1
    and 256 for n = 2 to keep them tractable.
    """

    n: int
    N: int
    L: float = 16.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if not _is_power_of_two(self.N) or self.N < 16:
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not self.L > 2:
            raise ValueError(f"box side must exceed 2, got {self.L}")
        cap = 4096 if self.n == 1 else 256
        if self.N > cap:
            raise ValueError(f"N={self.N} exceeds the n={self.n} cap of {cap}")

    @property
    def shape(self):
        return (self.N,) * self.n

    @property
    def spacing(self):
        return self.L / self.N

    @property
    def cell_volume(self):
        return (self.L / self.N) ** self.n

    @property
    def nyquist(self):
        """Largest physical frequency magnitude present on the grid axis."""
        return np.pi * self.N / self.L

    def axis_points(self):
        return np.arange(self.N) * (self.L / self.N)

    def points(self):
        """Sample coordinates; array of shape (n,) + shape."""
        x = self.axis_points()
        if self.n == 1:
            return x[None, :]
        return np.stack(np.meshgrid(x, x, indexing="ij"))


@lru_cache(maxsize=128)
def _freq_vectors_cached(grid):
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)  # integer frequencies, FFT order
    xi_axis = 2.0 * np.pi * k / grid.L
    if grid.n == 1:
        out = xi_axis[None, :]
    else:
        out = np.stack(np.meshgrid(xi_axis, xi_axis, indexing="ij"))
    out.setflags(write=False)
    return out


def freq_vectors(grid):
    """Physical frequency vectors in FFT order; shape (n,) + grid.shape."""
    return _freq_vectors_cached(grid)


@lru_cache(maxsize=128)
def _freq_norm_cached(grid):
    out = np.sqrt(np.sum(freq_vectors(grid) ** 2, axis=0))
    out.setflags(write=False)
    return out


def freq_norm(grid):
    """|xi| on the grid frequencies, FFT order; shape grid.shape."""
    return _freq_norm_cached(grid)


def _check_values(grid, values):
    values = np.ascontiguousarray(values, dtype=complex)
    if values.shape != grid.shape:
        raise ValueError(f"values shape {values.shape} != grid shape {grid.shape}")
    if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
        raise ValueError("field contains non-finite values")
    return values


@dataclass(frozen=True)
class SampledField:
    """Complex samples of a function on a periodic grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values))

    def _compat(self, other):
        if self.grid != other.grid:
            raise GridMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, SampledField):
            self._compat(other)
            return SampledField(self.grid, self.values + other.values)
        return SampledField(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, SampledField):
            self._compat(other)
            return SampledField(self.grid, self.values - other.values)
        return SampledField(self.grid, self.values - other)

    def __mul__(self, other):
        if isinstance(other, SampledField):
            self._compat(other)
            return SampledField(self.grid, self.values * other.values)
        return SampledField(self.grid, self.values * other)

    __rmul__ = __mul__

    def __neg__(self):
        return SampledField(self.grid, -self.values)


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients indexed by integer frequency vectors (FFT order)."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "coefficients", _check_values(self.grid, self.coefficients)
        )


def dft(f):
    """Forward transform; coefficients carry the (L/N)^n quadrature factor."""
    scale = (f.grid.L / f.grid.N) ** f.grid.n
    return SpectralField(f.grid, np.fft.fftn(f.values) * scale)


def idft(F):
    """Inverse of :func:`dft`; exact round trip up to float rounding."""
    scale = (F.grid.N / F.grid.L) ** F.grid.n
    return SampledField(F.grid, np.fft.ifftn(F.coefficients) * scale)


def integrate(f):
    """Rectangle-rule integral over the torus, exact for band-limited fields."""
    return complex(np.sum(f.values)) * f.grid.cell_volume


def _centered(coefficients):
    return np.fft.fftshift(coefficients)


def _uncentered(coefficients):
    return np.fft.ifftshift(coefficients)


def zero_pad(F, factor):
    """Embed the coefficients into a grid with factor*N points per axis.

    The represented function is unchanged; only the resolvable frequency
    range grows.  Used to evaluate products of band-limited fields without
    aliasing.
    """
    if factor < 2 or int(factor) != factor:
        raise ValueError("pad factor must be an integer >= 2")
    g = F.grid
    big = Grid(g.n, int(factor) * g.N, g.L)
    C = _centered(F.coefficients)
    out = np.zeros(big.shape, dtype=complex)
    lo = big.N // 2 - g.N // 2
    sl = (slice(lo, lo + g.N),) * g.n
    out[sl] = C
    return SpectralField(big, _uncentered(out))


def restrict(F, grid):
    """Project onto the frequencies of a coarser grid (adjoint of zero_pad)."""
    g = F.grid
    if grid.n != g.n or grid.N > g.N or g.N % grid.N != 0 or grid.L != g.L:
        raise ValueError("target grid must be a coarsening of the source grid")
    C = _centered(F.coefficients)
    lo = g.N // 2 - grid.N // 2
    sl = (slice(lo, lo + grid.N),) * g.n
    return SpectralField(grid, _uncentered(C[sl]))


def save_field(f, path):
    """Write a field as JSON: {"n", "N", "L", "values": [[re, im], ...]}."""
    flat = f.values.ravel()
    doc = {
        "n": f.grid.n,
        "N": f.grid.N,
        "L": f.grid.L,
        "values": [[float(z.real), float(z.imag)] for z in flat],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_field(source):
    """Read a field document written by :func:`save_field`.

    Accepts a path or an already-parsed dict.  Rejects documents whose
    value count does not match N^n.
    """
    if isinstance(source, dict):
        doc = source
    else:
        with open(source) as fh:
            doc = json.load(fh)
    grid = Grid(int(doc["n"]), int(doc["N"]), float(doc["L"]))
    raw = doc["values"]
    if len(raw) != grid.N**grid.n:
        raise ValueError(
            f"value count {len(raw)} does not match N^n = {grid.N ** grid.n}"
        )
    values = np.array([complex(re, im) for re, im in raw]).reshape(grid.shape)
    return SampledField(grid, values)
