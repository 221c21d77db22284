"""Empirical operator-norm estimation for the boundedness inequalities.

Each inequality id names a ratio (output norm) / (product of input norms)
together with designated test-function families.  estimate_ratio draws
trial pairs, computes the per-trial ratios and aggregates max / median;
resolution_sweep repeats the run over increasing N with shared seeds so the
per-resolution maxima can be compared (a bounded operator shows flat maxima,
an unbounded one grows).

Randomness comes from the counter-based Philox generator; every field is a
pure function of (kind, parameters, seed), with the seed derived by hashing
(master seed, id, trial, slot), so reports are bit-reproducible.
"""

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .bumps import ramp_up
from .grid import Grid, SampledField, dft, freq_norm, idft, integrate
from .multipliers import (
    apply_bilinear,
    bessel,
    builtin_symbol,
    j_w_inv,
    multiply_dealiased,
    standard_family,
)
from .paraproducts import (
    DegenerateDenominator,
    ParaproductSpec,
    kato_ponce_ratio,
    pi,
    pi1,
    pi2,
    product_decompose,
)
from .spaces import BMO_norm, H1_norm, bmo_norm, h1_norm, jw_norm, lp_norm, xw_norm
from .timegrid import TimeGrid
from .weights import make_log_weight, regularize

__all__ = [
    "make_field",
    "field_seed",
    "RatioReport",
    "estimate_ratio",
    "resolution_sweep",
    "emit",
    "parse_csv",
    "INEQUALITY_IDS",
]


# ---------------------------------------------------------------------------
# test-function families


def field_seed(master, *parts):
    """Derive a 128-bit Philox key from the master seed and labels."""
    blob = "/".join(str(p) for p in (master,) + parts).encode()
    return int.from_bytes(hashlib.blake2b(blob, digest_size=16).digest(), "big")


def _rng(key):
    return np.random.Generator(np.random.Philox(key=key))


def _hermitian_place(spec, k, coeff):
    """Place coeff at +k and its conjugate at -k (real field)."""
    if len(k) == 1:
        spec[k[0]] += coeff
        spec[-k[0]] += np.conj(coeff)
    else:
        spec[k[0], k[1]] += coeff
        spec[-k[0], -k[1]] += np.conj(coeff)


def _band_gauss(grid, rng, a=1.0, kmax=32, mean_zero=False):
    kmax = min(kmax, grid.N // 8)
    spec = np.zeros(grid.shape, dtype=complex)
    if grid.n == 1:
        for k in range(1, kmax + 1):
            z = (rng.normal() + 1j * rng.normal()) * k**-a
            _hermitian_place(spec, (k,), z)
    else:
        for k1 in range(0, kmax + 1):
            for k2 in range(-kmax, kmax + 1):
                if k1 == 0 and k2 <= 0:
                    continue
                z = (rng.normal() + 1j * rng.normal()) * math.hypot(k1, k2) ** -a
                _hermitian_place(spec, (k1, k2), z)
    if not mean_zero:
        spec[(0,) * grid.n] = rng.normal() * grid.L**grid.n
    vals = np.fft.ifftn(spec) * (grid.N / grid.L) ** grid.n
    return SampledField(grid, vals)


def _bounded_trig(grid, rng, kmax=8):
    f = _band_gauss(grid, rng, a=0.0, kmax=kmax, mean_zero=False)
    peak = np.max(np.abs(f.values))
    return SampledField(grid, f.values / peak)


def _smoothed_step(grid, rng, width=1.0 / 16.0):
    u0 = rng.uniform()
    x = grid.points()[0] / grid.L  # first axis only; constant along others
    y = np.mod(x - u0, 1.0)
    vals = ramp_up(y, 0.0, width) - ramp_up(y, 0.5, 0.5 + width)
    return SampledField(grid, vals.astype(complex))


def _log_spike(grid, rng, loc=None):
    u0 = rng.uniform(size=grid.n) if loc is None else np.asarray(loc) / grid.L
    pts = grid.points()
    reg = math.sin(math.pi / (2 * grid.N)) ** 2
    ssum = np.zeros(grid.shape)
    for ax in range(grid.n):
        ssum = ssum + np.sin(math.pi * (pts[ax] / grid.L - u0[ax])) ** 2
    vals = -0.5 * np.log(4.0 * (ssum + reg))
    return SampledField(grid, vals.astype(complex))


def _dyadic_atom(grid, rng, scale_j=4, loc=None):
    u0 = rng.uniform(size=grid.n) if loc is None else np.asarray(loc) / grid.L
    s = 2.0**-scale_j  # width relative to the box
    pts = grid.points()
    d2 = np.zeros(grid.shape)
    for ax in range(grid.n):
        # smooth periodic distance along the axis
        d2 = d2 + (np.sin(math.pi * (pts[ax] / grid.L - u0[ax])) / math.pi) ** 2
    bump = np.exp(-4.0 * d2 / s**2)
    bump -= bump.mean()  # exact cancellation of the k = 0 coefficient
    nrm = math.sqrt(np.sum(np.abs(bump) ** 2) * grid.cell_volume)
    return SampledField(grid, (bump / nrm).astype(complex))


def make_field(kind, grid, seed, **params):
    """Deterministic test field: a pure function of (kind, params, seed)."""
    key = field_seed(seed, kind, sorted(params.items()), grid.n, grid.L)
    rng = _rng(key)
    if kind == "band_gauss":
        return _band_gauss(grid, rng, **params)
    if kind == "bounded_trig":
        return _bounded_trig(grid, rng, **params)
    if kind == "smoothed_step":
        return _smoothed_step(grid, rng, **params)
    if kind == "bmo_log_spike":
        return _log_spike(grid, rng, **params)
    if kind == "dyadic_atom":
        return _dyadic_atom(grid, rng, **params)
    raise ValueError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# inequality registry


@dataclass
class _Context:
    grid: Grid
    fam: object
    tgrid: TimeGrid
    rw: object
    params: dict

    @property
    def pspec(self):
        return ParaproductSpec(self.fam, self.params.get("m", "one"), self.tgrid)


def _g_mix(ctx, seed, trial):
    which = trial % 3
    if which == 0:
        return make_field("bmo_log_spike", ctx.grid, seed)
    if which == 1:
        return make_field("smoothed_step", ctx.grid, seed)
    return make_field("bounded_trig", ctx.grid, seed)


def _f_lp(ctx, seed, trial):
    return make_field("band_gauss", ctx.grid, seed, a=1.0)


def _f_h1(ctx, seed, trial):
    if trial % 2 == 0:
        return make_field("band_gauss", ctx.grid, seed, a=1.0, mean_zero=True)
    return make_field("dyadic_atom", ctx.grid, seed, scale_j=4)


def _spike_pair(ctx, seed, trial):
    """Co-located atom/spike pair: the atom chases the spike as N grows."""
    loc_u = _rng(field_seed(seed, "loc")).uniform(size=ctx.grid.n)
    loc = loc_u * ctx.grid.L
    g = make_field("bmo_log_spike", ctx.grid, seed, loc=tuple(loc))
    if trial % 2 == 0:
        f = make_field("band_gauss", ctx.grid, seed, a=1.0)
    else:
        j = int(math.log2(ctx.grid.N)) - 1
        f = make_field("dyadic_atom", ctx.grid, seed, scale_j=j, loc=tuple(loc))
    return f, g


def _r_t32i(ctx, f, g):
    sigma = builtin_symbol(ctx.params.get("symbol", "one"))
    p = ctx.params.get("p", 2.0)
    num = jw_norm(apply_bilinear(sigma, f, g), ctx.rw, f"lp:{p}")
    den = lp_norm(f, p) * xw_norm(g, ctx.rw, ctx.tgrid, ctx.fam)
    return num, den


def _r_t43i(ctx, f, g):
    p = ctx.params.get("p", 2.0)
    num = jw_norm(pi(ctx.pspec, f, g), ctx.rw, f"lp:{p}")
    den = lp_norm(f, p) * xw_norm(g, ctx.rw, ctx.tgrid, ctx.fam)
    return num, den


def _r_t43ii_pi1(ctx, f, g):
    num = jw_norm(pi1(ctx.pspec, f, g), ctx.rw, "H1", ctx.tgrid)
    den = H1_norm(f, ctx.tgrid) * xw_norm(g, ctx.rw, ctx.tgrid, ctx.fam)
    return num, den


def _r_t43ii_pi2(ctx, f, g):
    num = lp_norm(pi2(ctx.pspec, f, g), 1.0)
    den = H1_norm(f, ctx.tgrid) * BMO_norm(g)
    return num, den


def _r_l42i(ctx, f, g):
    p = ctx.params.get("p", 2.0)
    num = lp_norm(pi(ctx.pspec, f, g), p)
    den = xw_norm(f, ctx.rw, ctx.tgrid, ctx.fam) * lp_norm(g, p)
    return num, den


def _r_l42ii(ctx, f, g):
    num = lp_norm(pi(ctx.pspec, f, g), 1.0)
    den = xw_norm(f, ctx.rw, ctx.tgrid, ctx.fam) * H1_norm(g, ctx.tgrid)
    return num, den


def _r_kp(ctx, f, g):
    s = ctx.params.get("s", 6.0)
    p = ctx.params.get("p", 2.0)
    return kato_ponce_ratio(f, g, s, p, ctx.rw), 1.0


def _r_p62(ctx, f, g):
    p = ctx.params.get("p", 2.0)
    num = jw_norm(multiply_dealiased(f, g), ctx.rw, f"lp:{p}")
    den = lp_norm(f, p) * bmo_norm(g)
    return num, den


def _r_p63(ctx, f, g):
    b1, b2 = product_decompose(ctx.pspec, f, g)
    den = h1_norm(f, ctx.tgrid) * bmo_norm(g)
    r1 = lp_norm(b1, 1.0)
    r2 = jw_norm(b2, ctx.rw, "H1", ctx.tgrid)
    return max(r1, r2), den

def _r_appx(ctx, f, g):
    spec = ParaproductSpec(ctx.fam, "alt", ctx.tgrid)
    num = jw_norm(pi(spec, f, g), ctx.rw, "lp:2")
    den = lp_norm(f, 2.0) * xw_norm(g, ctx.rw, ctx.tgrid, ctx.fam)
    return num, den


def _r_neg(ctx, f, g):
    # P6.2 without the weight correction: plain L^p numerator
    p = ctx.params.get("p", 2.0)
    num = lp_norm(multiply_dealiased(f, g), p)
    den = lp_norm(f, p) * bmo_norm(g)
    return num, den


def _pair_default(fslot, gslot):
    def draw(ctx, seed_f, seed_g, trial):
        return fslot(ctx, seed_f, trial), gslot(ctx, seed_g, trial)

    return draw


def _pair_spike(ctx, seed_f, seed_g, trial):
    return _spike_pair(ctx, seed_f, trial)


_REGISTRY = {
    "T3.2i": (_r_t32i, _pair_default(_f_lp, _g_mix), {"p": 2.0, "symbol": "one"}),
    "T4.3i": (_r_t43i, _pair_default(_f_lp, _g_mix), {"p": 2.0}),
    "T4.3ii-pi1": (_r_t43ii_pi1, _pair_default(_f_h1, _g_mix), {}),
    "T4.3ii-pi2": (_r_t43ii_pi2, _pair_default(_f_h1, _g_mix), {}),
    "L4.2i": (_r_l42i, _pair_default(_g_mix, _f_lp), {"p": 2.0}),
    "L4.2ii": (_r_l42ii, _pair_default(_g_mix, _f_h1), {}),
    "KP": (_r_kp, _pair_default(_f_lp, _f_lp), {"s": 6.0, "p": 2.0}),
    "P6.2": (_r_p62, _pair_spike, {"p": 2.0}),
    "P6.3": (_r_p63, _pair_default(_f_h1, _g_mix), {}),
    "APPX": (_r_appx, _pair_default(_f_lp, _g_mix), {}),
    "NEG": (_r_neg, _pair_spike, {"p": 2.0}),
}

INEQUALITY_IDS = tuple(_REGISTRY)


# ---------------------------------------------------------------------------
# reports


@dataclass
class RatioReport:
    inequality_id: str
    params: dict
    seed: int
    trials: int
    Ns: list
    ratios: dict = dc_field(default_factory=dict)  # N -> list of per-trial ratios
    skipped: dict = dc_field(default_factory=dict)  # N -> degenerate-trial count
    config: dict = dc_field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def maxima(self):
        return {N: (max(r) if r else 0.0) for N, r in self.ratios.items()}

    @property
    def medians(self):
        return {N: (float(np.median(r)) if r else 0.0) for N, r in self.ratios.items()}

    def _payload(self, with_time=True):
        doc = {
            "id": self.inequality_id,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "Ns": list(self.Ns),
            "ratios": {str(N): list(r) for N, r in self.ratios.items()},
            "max": {str(N): v for N, v in self.maxima.items()},
            "median": {str(N): v for N, v in self.medians.items()},
            "skipped": {str(N): v for N, v in self.skipped.items()},
            "config": self.config,
        }
        if with_time:
            doc["wall_time_s"] = self.wall_time_s
        return doc

    def to_json(self):
        return json.dumps(self._payload(), sort_keys=True)

    def content_hash(self):
        """Hash of the deterministic content (wall time excluded)."""
        blob = json.dumps(self._payload(with_time=False), sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["id", "N", "trial", "seed", "ratio"])
        for N in self.Ns:
            for trial, r in enumerate(self.ratios.get(N, [])):
                w.writerow([self.inequality_id, N, trial, self.seed, f"{r:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        rep = cls(
            inequality_id=doc["id"],
            params=doc["params"],
            seed=doc["seed"],
            trials=doc["trials"],
            Ns=[int(N) for N in doc["Ns"]],
            ratios={int(N): list(r) for N, r in doc["ratios"].items()},
            skipped={int(N): v for N, v in doc["skipped"].items()},
            config=doc.get("config", {}),
            wall_time_s=doc.get("wall_time_s", 0.0),
        )
        return rep


def emit(report, format="json"):
    """Serialize a report; floats carry 17 significant digits either way."""
    if format == "json":
        return report.to_json().encode()
    if format == "csv":
        return report.to_csv().encode()
    raise ValueError(f"unknown format {format!r}")


def parse_csv(data):
    """Rebuild the per-trial ratio table from emitted CSV."""
    text = data.decode() if isinstance(data, bytes) else data
    rows = list(csv.reader(io.StringIO(text)))
    if rows and rows[0] == ["id", "N", "trial", "seed", "ratio"]:
        rows = rows[1:]
    out = {}
    meta = {"id": None, "seed": None}
    for rid, N, trial, seed, ratio in rows:
        meta["id"], meta["seed"] = rid, int(seed)
        out.setdefault(int(N), []).append(float(ratio))
    return meta, out


# ---------------------------------------------------------------------------
# estimation


def _context(grid, params, q=8):
    fam = standard_family()
    tgrid = TimeGrid.for_grid(grid, q=q)
    rw = regularize(make_log_weight(params.get("b", 1.0)))
    return _Context(grid, fam, tgrid, rw, params)


def estimate_ratio(inequality_id, trials, grid, seed=0, params=None, q=8):
    """Per-trial ratios for one inequality on one grid."""
    if inequality_id not in _REGISTRY:
        raise KeyError(f"unknown inequality id {inequality_id!r}")
    fn, draw, defaults = _REGISTRY[inequality_id]
    merged = dict(defaults)
    if params:
        merged.update(params)
    ctx = _context(grid, merged, q=q)
    t0 = time.perf_counter()
    ratios, skipped = [], 0
    for trial in range(trials):
        seed_f = field_seed(seed, inequality_id, trial, "f")
        seed_g = field_seed(seed, inequality_id, trial, "g")
        f, g = draw(ctx, seed_f, seed_g, trial)
        try:
            num, den = fn(ctx, f, g)
            if den == 0.0:
                if num == 0.0:
                    skipped += 1
                    continue
                raise DegenerateDenominator(inequality_id)
            ratios.append(float(num / den))
        except DegenerateDenominator:
            skipped += 1
    rep = RatioReport(
        inequality_id=inequality_id,
        params=merged,
        seed=seed,
        trials=trials,
        Ns=[grid.N],
        ratios={grid.N: ratios},
        skipped={grid.N: skipped},
        config={"n": grid.n, "L": grid.L, "q": q},
    )
    rep.wall_time_s = time.perf_counter() - t0
    return rep


def resolution_sweep(inequality_id, Ns, trials, seed=0, n=1, L=16.0, params=None, q=8):
    """estimate_ratio per N with shared seeds; collects per-N maxima."""
    if list(Ns) != sorted(Ns):
        raise ValueError("resolutions must be ascending")
    t0 = time.perf_counter()
    out = None
    for N in Ns:
        rep = estimate_ratio(inequality_id, trials, Grid(n, N, L), seed, params, q)
        if out is None:
            out = rep
            out.Ns = list(Ns)
        else:
            out.ratios[N] = rep.ratios[N]
            out.skipped[N] = rep.skipped[N]
    if out is None:
        out = RatioReport(inequality_id, dict(params or {}), seed, trials, list(Ns))
    out.wall_time_s = time.perf_counter() - t0
    return out
