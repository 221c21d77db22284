"""Smooth cutoff profiles used to build Fourier-side multipliers.

Everything here is a plain function of a real array.  The basic object is a
C-infinity monotone step that is exactly 0 for u <= 0 and exactly 1 for
u >= 1; ring/ball profiles are products of shifted and rescaled copies of it.
"""

import numpy as np

__all__ = ["smooth_step", "ramp_up", "ramp_down", "plateau"]


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly monotone between.

    Built from the classical bump B(s) = exp(-1/s) as B(u) / (B(u) + B(1-u)).
    All derivatives vanish at u = 0 and u = 1, so products of these steps are
    smooth compactly supported profiles.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    out[u >= 1.0] = 1.0
    mid = (u > 0.0) & (u < 1.0)
    if np.any(mid):
        um = u[mid]
        a = np.exp(-1.0 / um)
        b = np.exp(-1.0 / (1.0 - um))
        out[mid] = a / (a + b)
    return out


def ramp_up(x, lo, hi):
    """0 for x <= lo, 1 for x >= hi, smooth transition in between."""
    return smooth_step((np.asarray(x, dtype=float) - lo) / (hi - lo))


def ramp_down(x, lo, hi):
    """1 for x <= lo, 0 for x >= hi, smooth transition in between."""
    return smooth_step((hi - np.asarray(x, dtype=float)) / (hi - lo))


def plateau(x, a, b, c, d):
    """Smooth bump that is 0 outside (a, d) and exactly 1 on [b, c]."""
    return ramp_up(x, a, b) * ramp_down(x, c, d)
