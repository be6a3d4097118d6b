"""Analytic continuation of the kernel's first Fourier coefficient.

The Kloosterman-type part of the m=1 coefficient is a sum over coprime (a, c)
of G_{a,c}(s, w).  Rewriting each G_{a,c} as an integral of Hurwitz zeta values
continues it from the absolute convergence region to a strip around the
critical lines, where the coefficient splits into four explicit main terms and
a remainder.

Two normalizations appear:

* ``prop_F``: the m=1 Fourier coefficient itself (the value computed by
  :func:`eisenkernel.kernel.fourier_coefficient` with m=1);
* ``lemma_F1``: the same quantity times (2 pi)^w / Gamma(w), in which the four
  main terms become symmetric under s <-> w.

Main terms can be astronomically large or small at high weight, so a
:class:`ContinuationValue` keeps them as complex numbers relative to a common
factor exp(log_scale).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import ConvergenceError, DomainError, ParameterError, PoleError
from .kernel import KernelPoint, coprime_pairs
from .specfun import (
    LOG_TWO_PI, TWO_PI, _hurwitz_em, digamma, kummer_f11, log_gamma, polygamma,
    riemann_zeta, zeta_near_pole,
)

NEAR_DIAGONAL = 1e-4


@dataclass(frozen=True)
class ContinuationValue:
    """Four main terms and a remainder bound, all relative to exp(log_scale)."""

    main_terms: tuple
    remainder_bound: float
    normalization: str
    log_scale: float = 0.0
    mode: str = "explicit"

    def __post_init__(self):
        if len(self.main_terms) != 4:
            raise ParameterError("exactly four main terms expected")
        if not self.remainder_bound >= 0:
            raise ParameterError("remainder bound must be nonnegative")

    @property
    def total_main(self) -> complex:
        return complex(sum(self.main_terms))

    def absolute(self, value: complex) -> complex:
        """Undo the common scale (may overflow at high weight)."""
        return complex(value) * math.exp(self.log_scale) if self.log_scale < 709 else complex(math.inf)

    def terms_absolute(self) -> tuple:
        return tuple(self.absolute(t) for t in self.main_terms)


def _sign(k: int) -> int:
    return -1 if (k // 2) % 2 else 1


def _log_zeta(x: complex) -> complex:
    z = complex(riemann_zeta(x))
    if z == 0:
        raise DomainError(f"zeta vanishes at {x}")
    return complex(np.log(z))


def _assemble(logs, factors, normalization):
    """Scale exp(log_i) * factor_i by the largest modulus."""
    scale = max(l.real for l, f in zip(logs, factors) if f != 0)
    terms = tuple(complex(f * np.exp(l - scale)) if f != 0 else 0j for l, f in zip(logs, factors))
    return ContinuationValue(terms, 0.0, normalization, scale)


# --------------------------------------------------------------------------
# G_{a,c}
# --------------------------------------------------------------------------

def _inverse(a: int, c: int) -> int:
    return 1 if c == 1 else pow(a, -1, c)


def beta_nodes(s: complex, k: int, q: int):
    """Nodes u in (0,1) and weights for int_0^1 u^(s-1) (1-u)^(k-s-1) h(u) du.

    Uses u = sin^2(pi t / 2) and Gauss-Legendre in t, which flattens both
    endpoint behaviours of the weight.
    """
    t, wt = np.polynomial.legendre.leggauss(q)
    t = 0.5 * (t + 1.0)
    wt = 0.5 * wt
    half = 0.5 * math.pi * t
    log_sin, log_cos = np.log(np.sin(half)), np.log(np.cos(half))
    u = np.sin(half) ** 2
    log_w = (2.0 * s - 1.0) * log_sin + (2.0 * k - 2.0 * s - 1.0) * log_cos + math.log(math.pi)
    return u, wt * np.exp(log_w)


def beta_log_nodes(sigma: float, k: int, q: int):
    """Same nodes as :func:`beta_nodes` for real sigma, with log weights (no underflow)."""
    t, wt = np.polynomial.legendre.leggauss(q)
    t = 0.5 * (t + 1.0)
    half = 0.5 * math.pi * t
    log_w = ((2.0 * sigma - 1.0) * np.log(np.sin(half)) + (2.0 * k - 2.0 * sigma - 1.0) * np.log(np.cos(half))
             + math.log(math.pi) + np.log(0.5 * wt))
    return np.sin(half) ** 2, log_w


def _regular_parts(a: int, c: int, ap: int, w: complex, u: np.ndarray):
    """Hurwitz zeta values at both arguments, with the x^-w pole term removed where x reaches 0."""
    x1 = ap / c - u / (a * c)
    x2 = 1.0 - ap / c + u / (a * c)
    ww = np.full(u.shape, w, dtype=complex)
    z1 = _hurwitz_em(ww, x1 + 1.0) if a == 1 else _hurwitz_em(ww, x1)
    z2 = _hurwitz_em(ww, x2 + 1.0) if c == 1 else _hurwitz_em(ww, x2)
    return z1, z2


def _g_integral(a, c, s, w, k, q):
    u, weights = beta_nodes(s, k, q)
    z1, z2 = _regular_parts(a, c, _inverse(a, c), w, u)
    cp, cm = np.cos(0.5 * math.pi * (s + w)), np.cos(0.5 * math.pi * (s - w))
    integrand = weights * (cp * z1 + cm * z2)
    value = complex(np.sum(integrand))
    scale = float(np.sum(np.abs(integrand)))
    # pole parts integrate to beta functions
    if a == 1:
        extra = cp * complex(np.exp(w * math.log(c) + log_gamma(s) + log_gamma(k - s - w) - log_gamma(k - w)))
        value, scale = value + extra, scale + abs(extra)
    if c == 1:
        extra = cm * complex(np.exp(w * math.log(a) + log_gamma(s - w) + log_gamma(k - s) - log_gamma(k - w)))
        value, scale = value + extra, scale + abs(extra)
    return value, scale


def _g_hurwitz(a, c, p: KernelPoint, rtol: float, q0: int = 128, q_max: int = 4096) -> complex:
    s, w, k = p.s, p.w, p.k
    pref = 2.0 * complex(np.exp(-w * LOG_TWO_PI + log_gamma(w)))
    q = q0
    prev, _ = _g_integral(a, c, s, w, k, q)
    trace = [(q, prev)]
    while q < q_max:
        q *= 2
        cur, scale = _g_integral(a, c, s, w, k, q)
        trace.append((q, cur))
        # measured against the term magnitudes, since the pieces may cancel
        if abs(cur - prev) <= rtol * scale:
            return pref * cur
        prev = cur
    raise ConvergenceError("Hurwitz-integral quadrature did not settle", partial=pref * prev, trace=trace)


def _g_series(a, c, p: KernelPoint, rtol: float, n0: int = 256, n_max: int = 1 << 16) -> complex:
    s, w, k = p.s, p.w, p.k
    ap = _inverse(a, c)
    e_plus = np.exp(0.5j * math.pi * s)

    def block(lo, hi):
        n = np.arange(lo, hi + 1, dtype=np.int64)
        x = TWO_PI * n / (a * c)
        phase = np.exp(2j * math.pi * ((n * ap) % c) / c)
        weight = np.exp((w - 1.0) * np.log(n))
        first = e_plus * phase * kummer_f11(s, k, -1j * x)
        second = phase.conjugate() / e_plus * kummer_f11(s, k, 1j * x)
        return complex(np.sum(weight * (first + second)))

    total = block(1, n0)
    n = n0
    while n < n_max:
        step = block(n + 1, 2 * n)
        total += step
        n *= 2
        if abs(step) <= rtol * abs(total):
            return total
    raise ConvergenceError("G_{a,c} series did not settle", partial=total, trace=[n])


def g_ac(a: int, c: int, p: KernelPoint, route: str = "hurwitz", rtol: float = 1e-10) -> complex:
    """G_{a,c}(s, w): the n-sum of one (a, c) block, by series or by the Hurwitz integral."""
    if a < 1 or c < 1 or math.gcd(a, c) != 1:
        raise ParameterError("a and c must be coprime positive integers")
    if route == "series":
        if not p.in_D1:
            raise DomainError("series route needs 2 < Re s < k-2 and Re w < 0")
        return _g_series(a, c, p, rtol)
    if route == "hurwitz":
        if not p.in_D and not p.in_F:
            raise DomainError("Hurwitz route needs the absolute convergence region or its continuation strip")
        return _g_hurwitz(a, c, p, rtol)
    raise ParameterError(f"unknown route {route!r}")


# --------------------------------------------------------------------------
# main terms
# --------------------------------------------------------------------------

def _check_integer_pole(x: complex, what: str):
    if abs(x.imag) < 1e-14 and abs(x.real - round(x.real)) < 1e-14 and round(x.real) <= 0:
        raise PoleError(f"{what} has a pole here; use sing_pair for the pole-cancelled combination", location=x)


def prop_f_remainder_bound(p: KernelPoint) -> float:
    """The explicit remainder envelope, in the prop_F normalization."""
    s, w, k = p.s, p.w, p.k
    rs, rw = s.real, w.real
    zs = riemann_zeta(np.array([rs, k - 1.0 - rw, rw], dtype=complex)).real
    log_b = (math.log(2.0) + math.pi * (abs(s.imag) + abs(w.imag)) + (k - rw) * LOG_TWO_PI
             + log_gamma(w).real + math.log(zs[0]) - log_gamma(s).real - log_gamma(k - s).real)
    return math.exp(log_b) * (zs[1] + zs[2] + 1.0)


def _prop_f_logs(p: KernelPoint):
    s, w, k = p.s, p.w, p.k
    sign = _sign(k)
    _check_integer_pole(s - w, "Gamma(s - w)")
    _check_integer_pole(k - s - w, "Gamma(k - s - w)")
    if s - w == 1:
        raise PoleError("zeta(s - w) has a pole at s - w = 1", location=s - w)
    lg = lambda z: complex(log_gamma(z))  # noqa: E731
    logs = [
        s * LOG_TWO_PI - lg(s) + _log_zeta(k - s - w + 1),
        (k - s) * LOG_TWO_PI - lg(k - s) + _log_zeta(s - w + 1),
        math.log(2.0) + (k - w) * LOG_TWO_PI + lg(w) + lg(s - w) - lg(s) - lg(k - w),
        math.log(2.0) + (k - w) * LOG_TWO_PI + lg(w) + lg(k - s - w) - lg(k - s) - lg(k - w),
    ]
    zeta_sw = complex(riemann_zeta(s - w))
    factors = [1.0, sign, sign * np.cos(0.5 * math.pi * (s - w)) * zeta_sw,
               sign * np.cos(0.5 * math.pi * (s + w))]
    return logs, factors


def prop_f_rhs(p: KernelPoint) -> ContinuationValue:
    """Four explicit terms of the continued m=1 coefficient and its remainder envelope."""
    if not p.in_F:
        raise DomainError("prop_f_rhs needs 3/2 < Re s, Re w < k-2")
    logs, factors = _prop_f_logs(p)
    bound = prop_f_remainder_bound(p)
    value = _assemble(logs, factors, "prop_F")
    rel = bound * math.exp(-value.log_scale) if bound > 0 else 0.0
    return ContinuationValue(value.main_terms, rel, "prop_F", value.log_scale, "explicit")


def _f1_logs(s: complex, w: complex, k: int):
    if s == w:
        raise PoleError("T2 and T3 have poles at s = w; use sing_pair", location=s)
    if s + w == k:
        raise PoleError("T4 has a pole at s + w = k", location=s + w)
    lg = lambda z: complex(log_gamma(z))  # noqa: E731
    sign = _sign(k)
    logs = [
        (s + w) * LOG_TWO_PI - lg(s) - lg(w) + _log_zeta(k - s - w + 1),
        (k - s + w) * LOG_TWO_PI - lg(w) - lg(k - s) + _log_zeta(s - w + 1),
        (k + s - w) * LOG_TWO_PI - lg(s) - lg(k - w) + _log_zeta(w - s + 1),
        (2 * k - s - w) * LOG_TWO_PI - lg(k - s) - lg(k - w) + _log_zeta(s + w - k + 1),
    ]
    return logs, [1.0, sign, sign, 1.0]


def lemma_f1_rhs(p: KernelPoint, mode: str = "heuristic") -> ContinuationValue:
    """Symmetric four-term form; the remainder bound depends on ``mode``.

    heuristic: the explicit envelope :func:`remainder_envelope_ratio`;
    empirical: ten times the measured exact remainder;
    none: no bound (zero).
    """
    if not p.in_F:
        raise DomainError("lemma_f1_rhs is evaluable on 3/2 < Re s, Re w < k-2")
    logs, factors = _f1_logs(p.s, p.w, p.k)
    value = _assemble(logs, factors, "lemma_F1")
    log_t1 = logs[0].real
    if mode == "heuristic":
        ratio = remainder_envelope_ratio(p)
    elif mode == "empirical":
        ratio = 10.0 * abs(exact_remainder_ratio(p))
    elif mode == "none":
        ratio = 0.0
    else:
        raise ParameterError(f"unknown remainder mode {mode!r}")
    bound = ratio * math.exp(log_t1 - value.log_scale)
    return ContinuationValue(value.main_terms, bound, "lemma_F1", value.log_scale, mode)


def fourth_term_difference(p: KernelPoint) -> complex:
    """(Gamma(w)/(2 pi)^w) T4 minus the fourth Prop F term, relative to that term.

    Equals zeta(k - s - w) - 1: the pole parts of the c >= 2 blocks, which the
    symmetric form folds into its fourth term.
    """
    lf, ff = _f1_logs(p.s, p.w, p.k)
    lp, fp = _prop_f_logs(p)
    t4 = ff[3] * np.exp(lf[3] + log_gamma(p.w) - p.w * LOG_TWO_PI - lp[3])
    return complex(t4 / fp[3] - 1.0)


# --------------------------------------------------------------------------
# remainders
# --------------------------------------------------------------------------

def _t1_log(s, w, k):
    return (s + w) * LOG_TWO_PI - log_gamma(s) - log_gamma(w) + np.log(riemann_zeta(k - s - w + 1))


def _remainder_sum(s, w, k, c_max, q):
    u, weights = beta_nodes(s, k, q)
    cp, cm = np.cos(0.5 * math.pi * (s + w)), np.cos(0.5 * math.pi * (s - w))
    total = 0j
    for a, c, ap in coprime_pairs(c_max):
        a, c, ap = int(a), int(c), int(ap)
        z1, z2 = _regular_parts(a, c, ap, w, u)
        j = complex(np.sum(weights * (cp * z1 + cm * z2)))
        total += complex(np.exp((s - k) * math.log(c) - s * math.log(a))) * j
    return total


def exact_remainder_ratio(p: KernelPoint, rtol: float = 1e-10, c0: int = 4, c_cap: int = 256) -> complex:
    """R / T1 for the symmetric form, with R from the pole-free parts of every G_{a,c}.

    The (a, c) cutoff doubles until the ratio moves by less than ``rtol``.
    """
    s, w, k = p.s, p.w, p.k
    q = int(96 + k // 2)
    log_pref = (math.log(2.0) + (k - s - w) * LOG_TWO_PI + log_gamma(w) - log_gamma(k - s)
                - np.log(riemann_zeta(k - s - w + 1)))
    pref = _sign(k) * complex(np.exp(log_pref))
    c = c0
    prev = pref * _remainder_sum(s, w, k, c, q)
    # the quadrature must already be converged on the leading blocks
    check = pref * _remainder_sum(s, w, k, c, 2 * q)
    if abs(check - prev) > rtol * max(1.0, abs(prev)):
        q *= 2
        prev = check
    while c < c_cap:
        c *= 2
        cur = pref * _remainder_sum(s, w, k, c, q)
        if abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ConvergenceError("remainder (a, c) sum did not settle", partial=prev, trace=[c])


def continued_first_coefficient(p: KernelPoint, rtol: float = 1e-8) -> complex:
    """m = 1 coefficient of E* in the spectral normalization, by continuation.

    Sum of the four symmetric main terms and the exact remainder, rescaled by
    Gamma(s)Gamma(w)Gamma(k-s)Gamma(k-w) / (4 pi^(k+1) Gamma(k-1)).  Valid on
    the continuation strip, including points whose swap lies in the region of
    absolute convergence.
    """
    val = lemma_f1_rhs(p, mode="none")
    total = val.total_main + exact_remainder_ratio(p, rtol=rtol) * val.main_terms[0]
    s, w, k = p.s, p.w, p.k
    lg = log_gamma(np.array([s, w, k - s, k - w, k - 1.0]))
    log_conv = (val.log_scale + lg[0] + lg[1] + lg[2] + lg[3] - lg[4] - math.log(4.0)
                - (k + 1) * math.log(math.pi))
    return complex(total * np.exp(log_conv))


def _lse(x: np.ndarray, axis: int = -1) -> np.ndarray:
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return np.squeeze(m, axis=axis) + np.log(np.sum(np.exp(x - m), axis=axis))


def _log_hurwitz_real(nu: float, x: np.ndarray, n_head: int = 64) -> np.ndarray:
    """log of an upper bound for zeta(nu, x), nu > 1 real, x > 0: head sum plus integral tail."""
    n = np.arange(n_head)
    logs = -nu * np.log(x[..., None] + n)
    tail = np.log(x + n_head - 1.0) * (1.0 - nu) - math.log(nu - 1.0)
    stacked = np.concatenate([logs, tail[..., None]], axis=-1)
    return _lse(stacked)


def envelope_sums(sigma: float, nu: float, k: int, rtol: float = 1e-3, c0: int = 8, c_cap: int = 512):
    """(S1, S2): sum over (a,c) of c^(sigma-k) a^(-sigma) E_beta[zeta(nu, x_i(u))].

    E_beta is the average against the normalized weight u^(sigma-1)(1-u)^(k-sigma-1).
    Pole terms are removed exactly as in the exact remainder.  The cutoff doubles
    until the sums move by less than ``rtol``; the last increment is added as a
    tail allowance.
    """
    q = int(96 + k // 2)
    u, log_weights = beta_log_nodes(sigma, k, q)
    log_wn = log_weights - sp.betaln(sigma, k - sigma)

    def partial(c_lo, c_hi):
        pairs = coprime_pairs(c_hi, c_lo)
        if pairs.size == 0:
            return 0.0, 0.0
        a = pairs[:, 0:1].astype(float)
        c = pairs[:, 1:2].astype(float)
        ap = pairs[:, 2:3].astype(float)
        x1 = ap / c - u / (a * c)
        x2 = 1.0 - ap / c + u / (a * c)
        x1 = np.where(a == 1, x1 + 1.0, x1)
        x2 = np.where(c == 1, x2 + 1.0, x2)
        lw = (sigma - k) * np.log(c[:, 0]) - sigma * np.log(a[:, 0])
        s1 = _lse(log_wn + _log_hurwitz_real(nu, x1)) + lw
        s2 = _lse(log_wn + _log_hurwitz_real(nu, x2)) + lw
        return float(np.exp(_lse(s1, 0))), float(np.exp(_lse(s2, 0)))

    c = c0
    s1, s2 = partial(0, c)
    while c < c_cap:
        d1, d2 = partial(c, 2 * c)
        s1, s2 = s1 + d1, s2 + d2
        c *= 2
        if d1 <= rtol * s1 and d2 <= rtol * s2:
            return s1 + d1, s2 + d2
    raise ConvergenceError("envelope sums did not settle", partial=(s1, s2), trace=[c])


def envelope_ratio_from_sums(s, w, k, s1: float, s2: float):
    """Vectorized |R|/|T1| envelope given the real-part-only sums."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    sigma = s.real
    nu = w.real
    log_env = (math.log(2.0) + (k - sigma - nu) * LOG_TWO_PI + log_gamma(w).real
               + sp.betaln(sigma, k - sigma) - log_gamma(k - s).real
               - np.log(np.abs(riemann_zeta(1.0 + k - s - w))))
    cp = np.abs(np.cos(0.5 * np.pi * (s + w)))
    cm = np.abs(np.cos(0.5 * np.pi * (s - w)))
    return np.exp(log_env) * (cp * s1 + cm * s2)


def remainder_envelope_ratio(p: KernelPoint) -> float:
    """Computed upper envelope for |R| / |T1| in the symmetric form.

    Uses |u^(s-1)| = u^(Re s - 1) on (0,1), |zeta(w, x)| <= zeta(Re w, x) and an
    integral tail for the Hurwitz sums.  Requires Re w > 1.
    """
    if p.w.real <= 1.0 or p.s.real <= 0:
        raise DomainError("envelope needs Re w > 1 and Re s > 0")
    s1, s2 = envelope_sums(p.s.real, p.w.real, p.k)
    return float(envelope_ratio_from_sums(p.s, p.w, p.k, s1, s2))


# --------------------------------------------------------------------------
# pole-cancelled pair
# --------------------------------------------------------------------------

def log_g(z, k: int):
    """log g(z) with g(z) = (2 pi)^(k-2z) Gamma(z) / Gamma(k-z)."""
    z = np.asarray(z, dtype=complex)
    return (k - 2.0 * z) * LOG_TWO_PI + log_gamma(z) - log_gamma(k - z)


def g_func(z, k: int):
    return np.exp(log_g(z, k))


def g_prime(z, k: int):
    """g'(z) = g(z) (-2 log 2pi + psi(z) + psi(k - z))."""
    z = np.asarray(z, dtype=complex)
    return g_func(z, k) * (-2.0 * LOG_TWO_PI + digamma(z) + digamma(k - z))


def difference_quotient(s, w, k: int):
    """(g(s) - g(w)) / (s - w), stable as s -> w."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    s, w = np.broadcast_arrays(s, w)
    h = s - w
    out = np.empty(s.shape, dtype=complex)
    near = np.abs(h) < NEAR_DIAGONAL
    far = ~near
    if far.any():
        lw = log_g(w[far], k)
        out[far] = np.exp(lw) * np.expm1(log_g(s[far], k) - lw) / h[far]
    if near.any():
        m = 0.5 * (s[near] + w[near])
        hn = h[near]
        d1 = -2.0 * LOG_TWO_PI + digamma(m) + digamma(k - m)
        d2 = polygamma(1, m) - polygamma(1, k - m)
        d3 = polygamma(2, m) + polygamma(2, k - m)
        arg = 0.5 * hn * d1 + hn ** 3 * d3 / 48.0
        safe = np.where(hn == 0, 1.0, hn)
        ratio = np.where(hn == 0, d1, 2.0 * np.sinh(arg) / safe)
        out[near] = g_func(m, k) * np.exp(hn * hn * d2 / 8.0) * ratio
    return out


def sing_pair_values(s, w, k: int):
    """g(s) zeta(1+s-w) + g(w) zeta(1+w-s) with the poles at s = w cancelled."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return (g_func(s, k) * zeta_near_pole(s - w) + g_func(w, k) * zeta_near_pole(w - s)
            + difference_quotient(s, w, k))


def sing_pair(p: KernelPoint) -> complex:
    """Pole-cancelled combination; (T2 + T3) = (-1)^(k/2) (2pi)^(s+w) / (Gamma(s)Gamma(w)) * sing_pair."""
    if abs(p.s - p.w) >= 0.5:
        raise DomainError("sing_pair is meant for |s - w| < 1/2")
    return complex(sing_pair_values(p.s, p.w, p.k))


@dataclass(frozen=True)
class SupBound:
    value: float
    refinement_delta: float
    argmax: complex
    grid_step: float


def _sup_on_grid(k, T, delta, step):
    lo, hi = -0.5, -delta
    n_re = max(1, int(round((hi - lo) / step)) + 1)
    n_im = int(round(2 * T / step)) + 1
    re = np.linspace(lo, hi, n_re) + k / 2
    im = np.linspace(-T, T, n_im)
    z = re[:, None] + 1j * im[None, :]
    vals = np.abs(g_prime(z, k))
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    return float(vals[idx]), complex(z[idx])


def g_sup_bound(k: int, T: float, delta: float, step: float = 0.01) -> SupBound:
    """Grid supremum of |g'| over -1/2 <= Re z - k/2 <= -delta, |Im z| <= T."""
    if k % 2:
        raise ParameterError("weight must be even")
    if not 0 < delta <= 0.5 or T <= 0:
        raise ParameterError("need 0 < delta <= 1/2 and T > 0")
    value, arg = _sup_on_grid(k, T, delta, step)
    fine, _ = _sup_on_grid(k, T, delta, step / 2)
    return SupBound(max(value, fine), abs(fine - value), arg, step)
