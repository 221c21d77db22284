"""Dyadic time grid discretizing integrals in dt/t.

Nodes are t_j = 2^{-j/q} for integer j, q points per octave, with the
log-midpoint quadrature weight Delta = ln(2)/q per node.  The default range
is chosen so that the band-pass window [4/(5t), 6/(5t)] sweeps across every
resolvable grid frequency: t runs from (4/5)/xi_nyquist up to the box side L.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["TimeGrid"]


@dataclass(frozen=True)
class TimeGrid:
    j_min: int
    j_max: int
    q: int = 8

    def __post_init__(self):
        if self.q < 4:
            raise ValueError("need at least 4 points per octave")
        if self.j_max < self.j_min:
            raise ValueError("empty time grid")

    @property
    def delta(self):
        """Quadrature weight per node for integrals in dt/t."""
        return math.log(2.0) / self.q

    @property
    def nodes(self):
        """Node values t_j, decreasing in j."""
        j = np.arange(self.j_min, self.j_max + 1)
        return 2.0 ** (-j / self.q)

    @property
    def t_min(self):
        return 2.0 ** (-self.j_max / self.q)

    @property
    def t_max(self):
        return 2.0 ** (-self.j_min / self.q)

    def __len__(self):
        return self.j_max - self.j_min + 1

    @classmethod
    def for_grid(cls, grid, q=8, t_min=None, t_max=None):
        """Default range covering every grid frequency's full band window.

        t_max is capped at L (tents in the Carleson machinery never exceed
        the torus).  Exact dyadic-lattice reconstruction holds when q is a
        multiple of 8; other q >= 4 give approximate reconstruction.
        """
        if t_max is None:
            t_max = grid.L
        t_max = min(t_max, grid.L)
        if t_min is None:
            t_min = 0.8 / grid.nyquist
        j_min = int(math.floor(-q * math.log2(t_max)))
        j_max = int(math.ceil(-q * math.log2(t_min)))
        return cls(j_min, j_max, q)
