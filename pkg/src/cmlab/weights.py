"""Admissible weights, the dyadic resolution of unity, and regularized symbols.

An admissible weight is a monotone w on (0, 1], extended by w(t) = w(1) for
t >= 1, with dyadic doubling constants c, d such that

    c w(2^-j) <= w(2^-2j) <= d w(2^-j)   for all j >= 0.

Its regularization is the smooth radial Fourier symbol

    w(xi) = sum_j w(2^-j) phi_j(xi),

built from the resolution of unity phi_0, phi_1(x) = phi_0(x/2) - phi_0(x),
phi_j(x) = phi_1(2^{-j+1} x); the symbol is comparable to w(1/|xi|) with
grid-independent constants.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bumps import ramp_down

__all__ = [
    "AdmissibleWeight",
    "ResolutionOfUnity",
    "RegularizedWeight",
    "NonMonotoneError",
    "NonPositiveError",
    "NotAdmissibleError",
    "make_log_weight",
    "make_loglog_weight",
    "check_admissible",
    "regularize",
    "check_symbol_estimates",
    "weight_from_spec",
    "fd_weights",
]

# empirical doubling ratios outside [1/RATIO_CAP, RATIO_CAP] flag the weight
# as not admissible (catches power laws, whose ratio grows like 2^j)
RATIO_CAP = 1.0e3


class NonMonotoneError(ValueError):
    pass


class NonPositiveError(ValueError):
    pass


class NotAdmissibleError(ValueError):
    pass


@dataclass(frozen=True)
class AdmissibleWeight:
    """Closed-form weight evaluator with certified doubling constants."""

    kind: str
    params: tuple
    direction: str = "constant"
    c: float = 1.0
    d: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _evaluate(self.kind, self.params, t)

    @property
    def label(self):
        return f"{self.kind}{self.params}"


def _logplus_inv(t):
    # log_+(1/t), with w(t) = w(1) enforced for t >= 1 via the clamp
    return np.maximum(-np.log(np.minimum(t, 1.0)), 0.0)


def _evaluate(kind, params, t):
    lp = _logplus_inv(t)
    if kind == "log":
        (b,) = params
        return (1.0 + lp) ** b
    if kind == "loglog":
        b1, b2 = params
        return (1.0 + lp) ** b1 * (1.0 + np.log(1.0 + lp)) ** b2
    raise ValueError(f"unknown weight kind {kind!r}")


def make_log_weight(b):
    """w_b(t) = (1 + log_+(1/t))^b; non-increasing for b > 0."""
    if b > 0:
        direction = "non-increasing"
    elif b < 0:
        direction = "non-decreasing"
    else:
        direction = "constant"
    w = AdmissibleWeight("log", (float(b),), direction)
    c, d = check_admissible(w)
    return AdmissibleWeight("log", (float(b),), direction, c, d)


def make_loglog_weight(b1, b2):
    """w(t) = (1+log_+(1/t))^b1 (1+log(1+log_+(1/t)))^b2, with b1*b2 >= 0."""
    if b1 * b2 < 0:
        raise ValueError("mixed-sign exponents are not monotone; need b1*b2 >= 0")
    if b1 > 0 or b2 > 0:
        direction = "non-increasing"
    elif b1 < 0 or b2 < 0:
        direction = "non-decreasing"
    else:
        direction = "constant"
    w = AdmissibleWeight("loglog", (float(b1), float(b2)), direction)
    c, d = check_admissible(w)
    return AdmissibleWeight("loglog", (float(b1), float(b2)), direction, c, d)


def check_admissible(w, j_max=32):
    """Empirical doubling constants (c, d) and a monotonicity check.

    c and d are the extreme ratios w(2^-2j) / w(2^-j) over 0 <= j <= j_max.
    Raises NonPositiveError / NonMonotoneError on a bad evaluator and
    NotAdmissibleError when the ratios leave [1/RATIO_CAP, RATIO_CAP].
    """
    if j_max < 8:
        raise ValueError("j_max must be at least 8")
    ts = np.exp(np.linspace(math.log(2.0**-j_max), 0.0, 512))  # log-spaced in (0, 1]
    vals = np.asarray(w(ts), dtype=float)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise NonPositiveError("weight must be positive and finite on (0, 1]")
    diffs = np.diff(vals)
    tol = 1e-12 * np.max(np.abs(vals))
    if np.any(diffs > tol) and np.any(diffs < -tol):
        raise NonMonotoneError("weight is not monotone on (0, 1]")
    j = np.arange(j_max + 1, dtype=float)
    ratios = np.asarray(w(2.0 ** (-2 * j))) / np.asarray(w(2.0**-j))
    c, d = float(np.min(ratios)), float(np.max(ratios))
    if d > RATIO_CAP or c < 1.0 / RATIO_CAP:
        raise NotAdmissibleError(
            f"doubling ratio range [{c:.3g}, {d:.3g}] exceeds the cap {RATIO_CAP:g}"
        )
    return c, d


@dataclass(frozen=True)
class ResolutionOfUnity:
    """Radial dyadic partition sum_{j>=0} phi_j = 1.

    phi_0 is 1 on |x| <= 1, supported in |x| <= 3/2, radially non-increasing;
    phi_j(x) = phi_0(2^-j x) - phi_0(2^{-j+1} x) for j >= 1, so partial sums
    telescope exactly: sum_{j<=J} phi_j(x) = phi_0(2^-J x).
    """

    inner: float = 1.0
    outer: float = 1.5

    def phi0(self, r):
        return ramp_down(np.abs(r), self.inner, self.outer)

    def phi_j(self, j, r):
        r = np.abs(np.asarray(r, dtype=float))
        if j == 0:
            return self.phi0(r)
        return self.phi0(r * 2.0**-j) - self.phi0(r * 2.0 ** (-j + 1))

    def partial_sum(self, r, J):
        return self.phi0(np.abs(np.asarray(r, dtype=float)) * 2.0**-J)

    def terms_needed(self, rmax):
        """Smallest J with supp phi_j disjoint from [0, rmax] for j > J."""
        if rmax <= 0:
            return 0
        return max(0, int(math.ceil(math.log2(rmax))) + 2)


@dataclass(frozen=True)
class RegularizedWeight:
    """Smooth symbol w(xi) = sum_j w(2^-j) phi_j(|xi|).

    equiv_lo/equiv_hi bound the sampled ratio w(xi) / w(1/<xi>) over twelve
    octaves of |xi|; they certify the pointwise equivalence of symbol and
    weight and feed the norm-equivalence tests.
    """

    source: AdmissibleWeight
    resolution: ResolutionOfUnity = field(default_factory=ResolutionOfUnity)
    equiv_lo: float = 1.0
    equiv_hi: float = 1.0

    def __call__(self, r):
        """Evaluate the symbol at radii r = |xi| (any array shape)."""
        r = np.abs(np.asarray(r, dtype=float))
        J = self.resolution.terms_needed(float(np.max(r)) if r.size else 0.0)
        out = np.zeros(r.shape)
        for j in range(J + 1):
            out += float(self.source(2.0**-j)) * self.resolution.phi_j(j, r)
        return out

    def inv(self, r):
        return 1.0 / self(r)


def regularize(w, resolution=None, octaves=12):
    """Build the regularized symbol and record its equivalence constants."""
    res = resolution if resolution is not None else ResolutionOfUnity()
    rw = RegularizedWeight(w, res)
    r = np.exp(np.linspace(0.0, octaves * math.log(2.0), 481))
    ratio = rw(r) / np.asarray(w(1.0 / np.sqrt(1.0 + r**2)), dtype=float)
    return RegularizedWeight(rw.source, res, float(np.min(ratio)), float(np.max(ratio)))


def fd_weights(order, offsets):
    """Finite-difference weights for d^order/dx^order on the given offsets."""
    offsets = np.asarray(offsets, dtype=float)
    A = np.vander(offsets, increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(A, rhs)


def _central_stencil(order):
    # symmetric stencil with enough points for 4th-order accuracy
    if order == 0:
        return np.array([0.0]), np.array([1.0])
    npts = order + 3 if order % 2 == 0 else order + 4
    if npts % 2 == 0:
        npts += 1
    offs = np.arange(npts, dtype=float) - npts // 2
    return offs, fd_weights(order, offs)


def check_symbol_estimates(rw, max_order=4, octaves=12, step_scale=2.0**-10):
    """Sampled derivative constants of the symbol and of its reciprocal.

    For each derivative order m <= max_order reports

        sup_xi |d^m w(xi)| <xi>^m / w(1/<xi>)

    over log-spaced xi (both signs), and the mirror quantity for 1/w.
    Central differences of 4th-order accuracy with step 2^-10 |xi|.
    Constants are reported, not asserted: the continuum estimates hide
    unspecified constants.
    """
    if max_order > 4:
        raise ValueError("max_order is capped at 4")
    xi = np.exp(np.linspace(0.0, octaves * math.log(2.0), 241))
    report = {}
    for m in range(max_order + 1):
        offs, wts = _central_stencil(m)
        h = step_scale * xi
        acc_w = np.zeros(xi.shape)
        acc_winv = np.zeros(xi.shape)
        for o, wt in zip(offs, wts):
            vals = rw(np.abs(xi + o * h))
            acc_w += wt * vals
            acc_winv += wt / vals
        bracket = np.sqrt(1.0 + xi**2)
        scale = bracket**m / np.asarray(rw.source(1.0 / bracket), dtype=float)
        report[m] = {
            "w": float(np.max(np.abs(acc_w) / h**m * scale)),
            "w_inv": float(
                np.max(
                    np.abs(acc_winv)
                    / h**m
                    * bracket**m
                    * np.asarray(rw.source(1.0 / bracket), dtype=float)
                )
            ),
        }
    return report


def weight_from_spec(spec):
    """Build a weight from a config dict {"kind": ..., "b": ...}."""
    kind = spec.get("kind", "log")
    if kind == "const":
        return make_log_weight(0.0)
    if kind == "log":
        return make_log_weight(float(spec.get("b", 1.0)))
    if kind == "loglog":
        return make_loglog_weight(float(spec["b1"]), float(spec["b2"]))
    raise ValueError(f"unknown weight kind {kind!r}")
