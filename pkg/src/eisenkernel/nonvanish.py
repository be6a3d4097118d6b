"""Nonvanishing of sum_f L*(f,s) L*(f,w) / <f,f> near the critical lines.

Dividing the continued first coefficient by its leading term T1 gives

    N(s, w) = 1 + T2/T1 + T3/T1 + T4/T1 + R/T1,

and the sum over eigenforms is nonzero wherever |N_main| exceeds a bound for
|R/T1|.  The scanner evaluates N on a grid of the quadrant
Re s, Re w <= k/2 - delta; the remaining quadrants follow from the
functional equations (see :func:`symmetry_orbit`).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lfunc
from .continuation import (
    envelope_ratio_from_sums, envelope_sums, exact_remainder_ratio, g_func, lemma_f1_rhs,
    remainder_envelope_ratio, sing_pair_values,
)
from .errors import ConvergenceError, DomainError, InsufficientCoefficientsError, ParameterError, PreconditionError
from .kernel import KernelPoint, coprime_pairs
from .specfun import LOG_TWO_PI, _hurwitz_em, log_gamma, riemann_zeta

EXACT_CHECK_MAX_WEIGHT = 60
EXACT_CHECK_TOL = 1e-4
EXACT_NOISE_FLOOR = 1e-11


def _sign(k: int) -> int:
    return -1 if (k // 2) % 2 else 1


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("EISENKERNEL_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# normalized expression
# --------------------------------------------------------------------------

def normalized_main(s, w, k: int):
    """N_main = 1 + ((-1)^(k/2) sing_pair + g(s) g(w) zeta(1+s+w-k)) / zeta(1+k-s-w), vectorized."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    s, w = np.broadcast_arrays(s, w)
    if np.any(np.isclose(s + w, k, rtol=0, atol=1e-14)):
        raise DomainError("T4 pole at s + w = k")
    denom = riemann_zeta(1.0 + k - s - w)
    num = _sign(k) * sing_pair_values(s, w, k) + g_func(s, k) * g_func(w, k) * riemann_zeta(1.0 + s + w - k)
    return 1.0 + num / denom


@dataclass(frozen=True)
class NormalizedValue:
    value: complex
    remainder_ratio: float


def normalized_expression(p: KernelPoint, mode: str = "heuristic") -> NormalizedValue:
    """N_main at p together with the remainder bound divided by |T1|."""
    if not p.in_F:
        raise DomainError("normalized_expression needs 3/2 < Re s, Re w < k-2")
    if p.k - p.s.real - p.w.real <= 0:
        raise DomainError("T1 needs Re(k - s - w) > 0 so that its zeta factor sits in Re > 1")
    if abs(p.s - p.w) > 0.5:
        val = lemma_f1_rhs(p, mode=mode)
        t1 = val.main_terms[0]
        return NormalizedValue(val.total_main / t1, val.remainder_bound / abs(t1))
    value = complex(normalized_main(p.s, p.w, p.k))
    if mode == "heuristic":
        ratio = remainder_envelope_ratio(p)
    elif mode == "empirical":
        ratio = 10.0 * abs(exact_remainder_ratio(p))
    else:
        ratio = 0.0
    return NormalizedValue(value, ratio)


def spectral_normalized(s, w, k: int, basis=None):
    """N from the eigenform side: 4 pi^(k+1) Gamma(k-1) S / (Gamma(k-s)Gamma(k-w)(2pi)^(s+w) zeta(1+k-s-w)).

    ``s`` and ``w`` are 1-d arrays; the result is the full outer grid.  Points
    where L* cannot be evaluated come back as nan.
    """
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    basis = lfunc.spectral_basis(k) if basis is None else basis
    total = np.zeros((s.size, w.size), dtype=complex)
    for f, norm in basis:
        ls = np.array([_safe_lstar(f, x) for x in s])
        lw = np.array([_safe_lstar(f, x) for x in w])
        total += np.outer(ls, lw) / norm
    ss, ww = s[:, None], w[None, :]
    log_pref = (math.log(4.0) + (k + 1) * math.log(math.pi) + log_gamma(k - 1.0) - log_gamma(k - ss)
                - log_gamma(k - ww) - (ss + ww) * LOG_TWO_PI)
    with np.errstate(invalid="ignore"):
        return np.exp(log_pref) * total / _zeta_off_pole(1.0 + k - ss - ww)


def _zeta_off_pole(x):
    """zeta on an array, nan where the argument hits the pole at 1."""
    x = np.asarray(x, dtype=complex)
    pole = np.abs(x - 1.0) < 1e-12
    out = np.full(x.shape, complex(math.nan, math.nan))
    out[~pole] = riemann_zeta(x[~pole])
    return out


def _safe_lstar(f, x):
    try:
        return lfunc.lstar(f, x)
    except (InsufficientCoefficientsError, DomainError):
        return complex(math.nan, math.nan)


def exact_remainder_grid(s, w, k: int, rtol: float = 1e-8, c0: int = 4, c_cap: int = 128):
    """R/T1 on the outer grid s x w, by the pole-free Hurwitz integrals.

    The u-integral factorizes into (weight in s) x (Hurwitz values in w), so
    each (a, c) block is two matrix products.
    """
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    q = int(96 + k // 2)
    t, wt = np.polynomial.legendre.leggauss(q)
    t = 0.5 * (t + 1.0)
    half = 0.5 * math.pi * t
    u = np.sin(half) ** 2
    log_w = ((2.0 * s[:, None] - 1.0) * np.log(np.sin(half)) + (2.0 * k - 2.0 * s[:, None] - 1.0)
             * np.log(np.cos(half)) + math.log(math.pi))
    weights = 0.5 * wt * np.exp(log_w)  # (S, Q)
    ww = np.broadcast_to(w[None, :], (q, w.size))
    acc1 = np.zeros((s.size, w.size), dtype=complex)
    acc2 = np.zeros_like(acc1)
    ss, wgrid = s[:, None], w[None, :]
    cp = np.cos(0.5 * np.pi * (ss + wgrid))
    cm = np.cos(0.5 * np.pi * (ss - wgrid))
    log_pref = (math.log(2.0) + (k - ss - wgrid) * LOG_TWO_PI + log_gamma(wgrid) - log_gamma(k - ss))
    with np.errstate(invalid="ignore"):
        pref = _sign(k) * np.exp(log_pref) / _zeta_off_pole(1.0 + k - ss - wgrid)

    def add_pairs(c_lo, c_hi):
        for a, c, ap in coprime_pairs(c_hi, c_lo):
            a, c, ap = int(a), int(c), int(ap)
            x1 = ap / c - u / (a * c)
            x2 = 1.0 - ap / c + u / (a * c)
            if a == 1:
                x1 = x1 + 1.0
            if c == 1:
                x2 = x2 + 1.0
            z1 = _hurwitz_em(ww, np.broadcast_to(x1[:, None], ww.shape))
            z2 = _hurwitz_em(ww, np.broadcast_to(x2[:, None], ww.shape))
            lead = weights * np.exp((s[:, None] - k) * math.log(c) - s[:, None] * math.log(a))
            acc1[...] += lead @ z1
            acc2[...] += lead @ z2

    c = c0
    add_pairs(0, c)
    prev = pref * (cp * acc1 + cm * acc2)
    while c < c_cap:
        add_pairs(c, 2 * c)
        c *= 2
        cur = pref * (cp * acc1 + cm * acc2)
        change = float(np.nanmax(np.abs(cur - prev) / np.maximum(1.0, np.abs(cur))))
        if change <= rtol:
            return cur, c
        prev = cur
    raise ConvergenceError("remainder grid did not settle", partial=prev, trace=[c])


# --------------------------------------------------------------------------
# regions and scans
# --------------------------------------------------------------------------

REGION_KINDS = ("R", "R_prime", "R_tilde")


@dataclass(frozen=True)
class RegionSpec:
    kind: str
    k: int
    T: float = 1.0
    delta: float = 0.25
    grid_step: float = 0.05

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise ParameterError(f"region kind must be one of {REGION_KINDS}")
        if self.k % 2 or self.k < 12:
            raise ParameterError("weight must be an even integer >= 12")
        if self.T <= 0 or self.delta <= 0 or self.grid_step <= 0:
            raise ParameterError("T, delta and grid_step must be positive")

    def offsets(self) -> np.ndarray:
        """Offsets Re(z) - k/2 on the fixed lattice -1/2 + j*step, j >= 1, within the region's quadrant."""
        j = np.arange(1, int(math.floor(0.5 / self.grid_step + 1e-9)) + 1)
        off = -0.5 + j * self.grid_step
        off = off[off < 1e-12]
        if self.kind in ("R", "R_prime"):
            off = off[off <= -self.delta + 1e-12]
        return np.round(off, 12)

    def imaginary_parts(self) -> np.ndarray:
        n = int(math.floor(self.T / self.grid_step + 1e-9))
        im = np.round(np.arange(-n, n + 1) * self.grid_step, 12)
        if self.kind == "R_tilde":
            im = im[np.abs(im) >= self.delta - 1e-12]
        return im

    def line_points(self):
        """(points, offsets) for one variable: every Re offset paired with every Im part."""
        off = self.offsets()
        im = self.imaginary_parts()
        pts = (self.k / 2 + off)[:, None] + 1j * im[None, :]
        offs = np.broadcast_to(off[:, None], pts.shape)
        return pts.ravel(), offs.ravel()

    def pair_mask(self, off_s: np.ndarray, off_w: np.ndarray) -> np.ndarray:
        if self.kind == "R_tilde":
            return (np.abs(off_s)[:, None] + np.abs(off_w)[None, :]) >= self.delta - 1e-12
        return np.ones((off_s.size, off_w.size), dtype=bool)


@dataclass
class ScanReport:
    region: RegionSpec
    mode: str
    s: np.ndarray
    w: np.ndarray
    N: np.ndarray
    remainder_ratio: np.ndarray
    min_modulus: float
    min_margin: float
    certified: bool
    vacuous: bool = False
    estimated_C: int | None = None
    exact_check: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def margin(self) -> np.ndarray:
        return np.abs(self.N) - self.remainder_ratio

    @property
    def n_points(self) -> int:
        return int(self.N.size)


def _envelope_grid(spec: RegionSpec, s_pts, s_off, w_pts, w_off):
    k = spec.k
    ratio = np.full((s_pts.size, w_pts.size), math.nan)
    for so in np.unique(s_off):
        for wo in np.unique(w_off):
            if not spec.pair_mask(np.array([so]), np.array([wo]))[0, 0]:
                continue
            si = np.flatnonzero(s_off == so)
            wi = np.flatnonzero(w_off == wo)
            s1, s2 = envelope_sums(k / 2 + so, k / 2 + wo, k)
            sub = envelope_ratio_from_sums(s_pts[si][:, None], w_pts[wi][None, :], k, s1, s2)
            ratio[np.ix_(si, wi)] = sub
    return ratio


def scan_region(spec: RegionSpec, mode: str = "heuristic", exact_check: bool | None = None) -> ScanReport:
    """Evaluate N on the grid over the reduced quadrant and certify |N| > remainder bound.

    ``exact_check`` (default: k <= 60) also computes the exact remainder and the
    eigenform side and records their agreement.
    """
    if mode not in ("heuristic", "empirical"):
        raise ParameterError("mode must be heuristic or empirical")
    k = spec.k
    empty = np.zeros(0, dtype=complex)
    if spec.kind in ("R", "R_prime") and spec.delta >= 0.5:
        return ScanReport(spec, mode, empty, empty, empty, np.zeros(0), math.inf, math.inf, True, vacuous=True,
                          notes=["region is empty: no real part lies in (k/2 - 1/2, k/2 - delta]"])
    s_pts, s_off = spec.line_points()
    if s_pts.size == 0:
        return ScanReport(spec, mode, empty, empty, empty, np.zeros(0), math.inf, math.inf, True, vacuous=True,
                          notes=["grid has no points in the region"])
    w_pts, w_off = s_pts, s_off
    mask = spec.pair_mask(s_off, w_off)
    S, W = np.meshgrid(s_pts, w_pts, indexing="ij")
    # masked-out pairs may sit on the s + w = k pole
    N = np.full(S.shape, complex(math.nan, math.nan))
    N[mask] = normalized_main(S[mask], W[mask], k)
    do_exact = (k <= EXACT_CHECK_MAX_WEIGHT) if exact_check is None else exact_check
    exact = {}
    r_exact = None
    if do_exact or mode == "empirical":
        r_exact, c_used = exact_remainder_grid(s_pts, w_pts, k)
        exact["remainder_cutoff"] = c_used
    if mode == "heuristic":
        rem = _envelope_grid(spec, s_pts, s_off, w_pts, w_off)
    else:
        rem = 10.0 * np.abs(r_exact)
    if do_exact:
        n_cont = N + r_exact
        basis = lfunc.spectral_basis(k)
        n_spec = spectral_normalized(s_pts, w_pts, k, basis)
        ok = np.isfinite(n_spec) & mask
        # relative, except on an empty cusp space where the spectral side is exactly 0
        denom = np.abs(n_spec) if basis else np.ones(n_spec.shape)
        with np.errstate(invalid="ignore", divide="ignore"):
            dev = np.abs(n_cont - n_spec) / denom
            dev_main = np.abs(N - n_spec) / denom
        worst = float(np.max(dev[ok])) if ok.any() else math.nan
        exact.update({
            "points": int(ok.sum()), "skipped": int((~np.isfinite(n_spec) & mask).sum()),
            "deviation": "relative" if basis else "absolute",
            "max_deviation": worst, "tolerance": EXACT_CHECK_TOL,
            "max_deviation_main_only": float(np.max(dev_main[ok])) if ok.any() else math.nan,
            "agrees": bool(ok.any() and worst <= EXACT_CHECK_TOL),
            "max_remainder_ratio": float(np.max(np.abs(r_exact[mask]))),
            # below ~1e-11 the exact route only resolves rounding noise
            "envelope_holds": (bool(np.all(np.abs(r_exact[mask]) <= rem[mask] + EXACT_NOISE_FLOOR))
                               if mode == "heuristic" else None),
        })
    margin = np.abs(N) - rem
    min_mod = float(np.min(np.abs(N[mask])))
    min_margin = float(np.min(margin[mask]))
    report = ScanReport(spec, mode, S[mask], W[mask], N[mask], rem[mask], min_mod, min_margin,
                        bool(min_margin > 0), exact_check=exact)
    report.notes.append("quadrant Re s, Re w <= k/2; the other quadrants follow by symmetry_orbit")
    return report


@dataclass
class EstimateReport:
    k0: int | None
    margins: dict
    certified: dict
    exact_checks: dict
    T: float
    delta: float
    grid_step: float


def estimate_C(T: float, delta: float, k_min: int, k_max: int, grid_step: float = 0.05,
               mode: str = "heuristic", exact_check: bool | None = None) -> EstimateReport:
    """Smallest even k0 in [k_min, k_max] such that every even k in [k0, k_max] certifies."""
    if k_min % 2 or k_max % 2 or k_min > k_max:
        raise ParameterError("k_min <= k_max, both even")
    ks = list(range(k_min, k_max + 1, 2))

    def run(k):
        return k, scan_region(RegionSpec("R", k, T, delta, grid_step), mode, exact_check)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, ks))
    else:
        results = [run(k) for k in ks]
    margins = {k: r.min_margin for k, r in results}
    certified = {k: r.certified for k, r in results}
    exact = {k: r.exact_check for k, r in results if r.exact_check}
    k0 = None
    for k in reversed(ks):
        if not certified[k]:
            break
        k0 = k
    return EstimateReport(k0, margins, certified, exact, T, delta, grid_step)


# --------------------------------------------------------------------------
# shifted-coordinate quantity, assumption check, symmetries
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Theorem34Value:
    value: complex
    terms: tuple  # (1, second, third, fourth)


def gamma_ratio_log(s: complex, k: int) -> complex:
    """log Gamma(s + (k-1)/2) - log Gamma((k+1)/2 - s)."""
    return complex(log_gamma(s + (k - 1) / 2.0) - log_gamma((k + 1) / 2.0 - s))


def theorem34_quantity(s: complex, w: complex, k: int, include=(True, True, True)) -> Theorem34Value:
    """N in coordinates centred on the critical lines: N(s + (k-1)/2, w + (k-1)/2).

    ``include`` switches the second, third and fourth terms on or off.
    """
    s, w = complex(s), complex(w)
    if k % 2:
        raise ParameterError("weight must be even")
    zden = complex(riemann_zeta(2.0 - s - w))
    if zden == 0:
        raise DomainError("zeta(2 - s - w) vanishes")
    sign = _sign(k)
    rs, rw = gamma_ratio_log(s, k), gamma_ratio_log(w, k)
    ls = (1.0 - 2.0 * s) * LOG_TWO_PI + rs
    lw = (1.0 - 2.0 * w) * LOG_TWO_PI + rw
    if abs(s - w) < 1e-8:
        # both pole terms merge; split the pole-free combination evenly
        S, Wp = s + (k - 1) / 2.0, w + (k - 1) / 2.0
        pair = complex(sing_pair_values(S, Wp, k))
        second = third = 0.5 * sign * pair / zden
    else:
        second = sign * complex(np.exp(ls)) * complex(riemann_zeta(1.0 + s - w)) / zden
        third = sign * complex(np.exp(lw)) * complex(riemann_zeta(1.0 + w - s)) / zden
    fourth = complex(np.exp(ls + lw)) * complex(riemann_zeta(s + w)) / zden
    terms = (1.0 + 0j, second if include[0] else 0j, third if include[1] else 0j, fourth if include[2] else 0j)
    return Theorem34Value(complex(sum(terms)), terms)


def gamma_ratio_exponent(s: complex, k: int) -> float:
    """Measured exponent e in |Gamma(s+(k-1)/2)/Gamma((k+1)/2-s)| ~ (k/2)^e."""
    return gamma_ratio_log(s, k).real / math.log(k / 2.0)


@dataclass
class AssumptionReport:
    t0: float
    z0: complex
    radius: float
    per_k: dict  # k -> {"min", "max", "epsilon", "side"}

    @property
    def consistent(self) -> bool:
        sides = {v["side"] for v in self.per_k.values()}
        return len(sides) == 1

    @property
    def verdict(self) -> str:
        sides = {v["side"] for v in self.per_k.values()}
        return sides.pop() if len(sides) == 1 else "mixed"


def assumption_check(t0: float, z0: complex, radius: float, k_list, n_grid: int = 5) -> AssumptionReport:
    """Range of |(4 pi/k)^s zeta(1+z+s)/zeta(1+z-s)| over a ball around (i t0, z0)."""
    z0 = complex(z0)
    if t0 == 0:
        raise PreconditionError("t0 must be nonzero")
    if z0.imag == 0 or z0.real <= 0:
        raise PreconditionError("z0 needs Re(z0) > 0 and Im(z0) != 0")
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    lin = np.linspace(-radius, radius, n_grid)
    dr, di, er, ei = np.meshgrid(lin, lin, lin, lin, indexing="ij")
    inside = dr ** 2 + di ** 2 + er ** 2 + ei ** 2 <= radius ** 2 + 1e-15
    s = (1j * t0 + dr + 1j * di)[inside]
    z = (z0 + er + 1j * ei)[inside]
    if np.min((z - s).real) <= 0 or np.min((z + s).real) <= 0:
        raise DomainError("ball too large: a zeta argument leaves Re > 1")
    ratio_base = np.abs(riemann_zeta(1.0 + z + s) / riemann_zeta(1.0 + z - s))
    per_k = {}
    for k in k_list:
        vals = ratio_base * np.exp(s.real * math.log(4.0 * math.pi / k))
        lo, hi = float(vals.min()), float(vals.max())
        if lo > 1.0:
            side, eps = "above", lo - 1.0
        elif hi < 1.0:
            side, eps = "below", 1.0 - hi
        else:
            side, eps = "straddles", None
        per_k[int(k)] = {"min": lo, "max": hi, "epsilon": eps, "side": side}
    return AssumptionReport(float(t0), z0, float(radius), per_k)


@dataclass
class Orbit:
    points: list  # [(s, w, sign)]
    forced_zero: bool


def symmetry_orbit(s: complex, w: complex, k: int, tol: float = 1e-12) -> Orbit:
    """Orbit of (s, w) under swapping and s -> k - s, w -> k - w, with the sign each move carries.

    The spectral sum picks up the sign: swapping gives +1, each reflection gives (-1)^(k/2).
    If a point is reached with both signs the value there is forced to vanish.
    """
    eps = _sign(k)
    moves = (
        lambda a, b: (b, a, 1),
        lambda a, b: (k - a, b, eps),
        lambda a, b: (a, k - b, eps),
    )
    start = (complex(s), complex(w), 1)
    seen = [start]
    queue = [start]
    forced = False
    while queue:
        a, b, sg = queue.pop(0)
        for mv in moves:
            na, nb, ms = mv(a, b)
            nsg = sg * ms
            match = next((p for p in seen if abs(p[0] - na) <= tol and abs(p[1] - nb) <= tol), None)
            if match is None:
                item = (na, nb, nsg)
                seen.append(item)
                queue.append(item)
            elif match[2] != nsg:
                forced = True
    return Orbit(seen, forced)
