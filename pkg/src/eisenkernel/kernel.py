"""Fourier coefficients of the completed double Eisenstein series E*_{s,k-s}(z, w).

Three independent routes are provided:

* ``fourier_coefficient``: the closed formula for c_{s,w,k}(m), split into the
  zeta terms I, II and the Kloosterman-type triple sums III, IV;
* ``spectral_coefficient``: sum over Hecke eigenforms of L*(f,s) L*(f,w) a_f(m) / <f,f>;
* ``kernel_direct_sum``: brute-force summation over integer matrices of
  determinant n, for checking the Fourier expansion at a point z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lfunc
from .errors import ConvergenceError, DomainError, ParameterError
from .specfun import (
    LOG_TWO_PI, TWO_PI, LogScaled, _hurwitz_em, divisor_sigma, divisors, kummer_f11,
    log_gamma, principal_log, riemann_zeta,
)


@dataclass(frozen=True)
class KernelPoint:
    """(s, w, k) with region membership; T and delta parametrize the strip region."""

    s: complex
    w: complex
    k: int
    T: float = 1.0
    delta: float = 0.25

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k % 2 or self.k < 6:
            raise ParameterError("weight must be an even integer >= 6")
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "k", int(self.k))

    @property
    def in_D(self) -> bool:
        rs, rw, k = self.s.real, self.w.real, self.k
        return 2 < rs < k - 2 and rw < min(rs - 1, k - rs - 1)

    @property
    def in_D1(self) -> bool:
        return 2 < self.s.real < self.k - 2 and self.w.real < 0

    @property
    def in_F(self) -> bool:
        k = self.k
        return 1.5 < self.s.real < k - 2 and 1.5 < self.w.real < k - 2

    @property
    def in_F1(self) -> bool:
        k, rs, rw = self.k, self.s.real, self.w.real
        return ((k - 1) / 2 < rs < (k + 1) / 2 and (k - 1) / 2 < rw < (k + 1) / 2
                and rs + rw < k - self.delta
                and abs(self.s.imag) <= self.T and abs(self.w.imag) <= self.T)

    def swapped(self) -> "KernelPoint":
        return KernelPoint(self.w, self.s, self.k, self.T, self.delta)

    def conjugate(self) -> "KernelPoint":
        return KernelPoint(self.s.conjugate(), self.w.conjugate(), self.k, self.T, self.delta)


@dataclass(frozen=True)
class IntegerMatrix2x2:
    a: int
    b: int
    c: int
    d: int

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def in_M(self, n: int) -> bool:
        return self.det == n

    def act(self, z: complex) -> complex:
        return (self.a * z + self.b) / (self.c * z + self.d)


@dataclass(frozen=True)
class Truncation:
    A_max: int
    C_max: int
    N_max: int
    tail_estimate: float
    abs_totals: tuple = ()


@dataclass(frozen=True)
class CoefficientBreakdown:
    term_I: complex
    term_II: complex
    term_III: complex
    term_IV: complex
    prefactor: LogScaled
    truncation: Truncation
    m: int = 1

    @property
    def total(self) -> complex:
        return self.term_I + self.term_II + self.term_III + self.term_IV

    @property
    def scale(self) -> float:
        return abs(self.term_I) + abs(self.term_II) + abs(self.term_III) + abs(self.term_IV)

    def completed(self) -> complex:
        """prefactor * c(m), the m-th coefficient of E* in the spectral normalization."""
        return self.prefactor.to_complex() * self.total


def kernel_prefactor(s: complex, w: complex, k: int) -> LogScaled:
    """Gamma(s)Gamma(k-s)Gamma(k-w) / (2^(2-w) pi^(k+1-w) Gamma(k-1))."""
    lg = log_gamma(np.array([s, k - s, k - w, k - 1.0]))
    log_val = lg[0] + lg[1] + lg[2] - lg[3] - (2.0 - w) * math.log(2.0) - (k + 1.0 - w) * math.log(math.pi)
    return LogScaled.from_log(log_val)


def _cpow_int(base: int, expo: complex) -> complex:
    return complex(np.exp(expo * math.log(base)))


def _zeta_terms(s: complex, w: complex, k: int, m: int) -> tuple[complex, complex]:
    sign = (-1) ** (k // 2)
    zeta = riemann_zeta(np.array([k - s - w + 1.0, s - w + 1.0]))
    term1 = np.exp(s * LOG_TWO_PI - log_gamma(s)) * _cpow_int(m, s - 1.0) * divisor_sigma(m, w - s) * zeta[0]
    term2 = sign * np.exp((k - s) * LOG_TWO_PI - log_gamma(k - s)) * _cpow_int(m, k - s - 1.0) \
        * divisor_sigma(m, w + s - k) * zeta[1]
    return complex(term1), complex(term2)


def coprime_pairs(c_max: int, c_min: int = 0) -> np.ndarray:
    """Rows (a, c, a') with gcd(a, c) = 1, max(a, c) in (c_min, c_max], a a' = 1 mod c, 0 < a' <= c."""
    rows = []
    for a in range(1, c_max + 1):
        for c in range(1, c_max + 1):
            if max(a, c) <= c_min or math.gcd(a, c) != 1:
                continue
            ap = 1 if c == 1 else pow(a, -1, c)
            rows.append((a, c, ap))
    return np.array(rows, dtype=np.int64).reshape(-1, 3)


def _triple_sum_block(s, w, k, m, pairs, n_lo, n_hi):
    """Partial sums of the III and IV series over the given (a, c) pairs and n in [n_lo, n_hi]."""
    if pairs.size == 0 or n_hi < n_lo:
        return 0j, 0j, 0.0
    n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
    a = pairs[:, 0][:, None, None]
    c = pairs[:, 1][:, None, None]
    ap = pairs[:, 2][:, None, None]
    rs = np.array(divisors(m), dtype=np.int64)
    r = rs[None, None, :]
    mr = (m // rs)[None, None, :]
    nn = n[None, :, None]
    num = mr * nn
    t = num / (a * c)  # exact rationals rounded once, so equal values collide
    frac = ((num * ap) % c) / c
    t_flat = np.broadcast_to(t, np.broadcast_shapes(t.shape, frac.shape)).ravel()
    uniq, inv = np.unique(t_flat, return_inverse=True)
    f_minus = kummer_f11(s, k, -TWO_PI * 1j * uniq)[inv]
    f_plus = kummer_f11(s, k, TWO_PI * 1j * uniq)[inv]
    shape = np.broadcast_shapes(t.shape, frac.shape)
    f_minus = f_minus.reshape(shape)
    f_plus = f_plus.reshape(shape)
    log_w = ((s - k) * np.log(c) - s * np.log(a) + (w - 1.0) * np.log(nn) + (w - k) * np.log(r))
    weight = np.exp(log_w)
    phase = np.exp(2j * math.pi * frac)
    e_plus = np.exp(0.5j * math.pi * s)
    part3 = weight * e_plus * phase * f_minus
    part4 = weight / e_plus / phase * f_plus
    abs_sum = float(np.sum(np.abs(part3)) + np.sum(np.abs(part4)))
    return complex(np.sum(part3)), complex(np.sum(part4)), abs_sum


def fourier_coefficient(p: KernelPoint, m: int = 1, rel_tol: float = 1e-6, c_start: int = 8,
                        n_start: int = 32, c_cap: int = 128, n_cap: int = 1024) -> CoefficientBreakdown:
    """c_{s,w,k}(m) with per-term breakdown and a doubling-based truncation estimate."""
    if not p.in_D:
        raise DomainError(f"fourier_coefficient needs (s, w) in the absolute convergence region; got {p}")
    if m < 1:
        raise ParameterError("m must be >= 1")
    s, w, k = p.s, p.w, p.k
    term1, term2 = _zeta_terms(s, w, k, m)
    pre34 = (-1) ** (k // 2) * np.exp(k * LOG_TWO_PI + (k - 1) * math.log(m) - log_gamma(s) - log_gamma(k - s))
    C, N = c_start, n_start
    sum3, sum4, abs_sum = _triple_sum_block(s, w, k, m, coprime_pairs(C), 1, N)
    history = [(C, N, complex(pre34 * (sum3 + sum4)), abs_sum)]
    last_change = math.inf
    prev_change = math.inf
    while True:
        C2, N2 = 2 * C, 2 * N
        if C2 > c_cap or N2 > n_cap:
            partial = CoefficientBreakdown(term1, term2, complex(pre34 * sum3), complex(pre34 * sum4),
                                           kernel_prefactor(s, w, k),
                                           Truncation(C, C, N, last_change, tuple(h[3] for h in history)), m)
            raise ConvergenceError("triple sum did not settle within the cutoff cap", partial=partial,
                                   trace=history)
        d3a, d4a, absa = _triple_sum_block(s, w, k, m, coprime_pairs(C), N + 1, N2)
        d3b, d4b, absb = _triple_sum_block(s, w, k, m, coprime_pairs(C2, C), 1, N2)
        sum3 += d3a + d3b
        sum4 += d4a + d4b
        abs_sum += absa + absb
        C, N = C2, N2
        value34 = complex(pre34 * (sum3 + sum4))
        prev_change, last_change = last_change, abs(value34 - history[-1][2])
        history.append((C, N, value34, abs_sum))
        scale = abs(term1) + abs(term2) + abs(value34)
        if last_change < rel_tol * scale:
            break
    # increments shrink geometrically under doubling
    ratio = last_change / prev_change if math.isfinite(prev_change) and prev_change > 0 else 0.5
    tail = last_change * ratio / (1.0 - ratio) if ratio < 1.0 else last_change
    return CoefficientBreakdown(term1, term2, complex(pre34 * sum3), complex(pre34 * sum4),
                                kernel_prefactor(s, w, k),
                                Truncation(C, C, N, float(tail), tuple(h[3] for h in history)), m)


@dataclass(frozen=True)
class SpectralValue:
    value: complex
    empty: bool
    n_forms: int
    convention: str


def spectral_coefficient(k: int, s: complex, w: complex, m: int = 1,
                         convention: lfunc.LStarConvention = lfunc.DEFAULT_CONVENTION,
                         n_coeffs: int = 64) -> SpectralValue:
    """sum_f L*(f,s) L*(f,w) a_f(m) / <f,f> over the Hecke eigenbasis of S_k."""
    if k % 2 or k < 4:
        raise ParameterError("weight must be even and >= 4")
    basis = lfunc.spectral_basis(k, max(n_coeffs, m))
    if not basis:
        return SpectralValue(0j, True, 0, convention.tag)
    total = 0j
    for f, norm in basis:
        total += lfunc.lstar(f, s, convention) * lfunc.lstar(f, w, convention) * f.a(m) / norm
    return SpectralValue(complex(total), False, len(basis), convention.tag)


# --------------------------------------------------------------------------
# Direct summation over matrices of determinant n
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectSum:
    value: complex        # E*(z, w) with the completion factor applied
    raw: complex          # sum_n n^(w-1) sum_{gamma in M_n} (gamma z)^-s j(gamma, z)^-k
    tail_indicator: float
    slow_convergence: bool
    n_max: int
    height_max: int


def _reduce_to_fundamental(tau: complex) -> tuple[complex, complex]:
    """Return (tau', j) with tau' = g tau in the standard fundamental domain and j = j(g, tau)."""
    j = 1 + 0j
    a, b, c, d = 1, 0, 0, 1
    z = tau
    for _ in range(1000):
        shift = math.floor(z.real + 0.5)
        z -= shift
        a, b = a - shift * c, b - shift * d
        if abs(z) >= 1.0:
            break
        z = -1.0 / z
        a, b, c, d = -c, -d, a, b
    j = c * tau + d
    return z, j


def _primitive_rows(height: int) -> np.ndarray:
    rows = [(c, d) for c in range(-height, height + 1) for d in range(-height, height + 1)
            if (c, d) != (0, 0) and math.gcd(c, d) == 1]
    return np.array(rows, dtype=np.int64)


def _translate_sums(x: np.ndarray, s: complex) -> np.ndarray:
    """sum_{t in Z} (x + t)^-s for Im x > 0, completed exactly with Hurwitz zeta tails."""
    shift = np.floor(x.real + 0.5)
    x = x - shift
    head = np.exp(-s * principal_log(x))
    right = _hurwitz_em(np.full(x.shape, s), x + 1.0)
    left = _hurwitz_em(np.full(x.shape, s), 1.0 - x)
    return head + right + np.exp(-1j * math.pi * s) * left


def _gamma_sum(tau: complex, s: complex, k: int, rows: np.ndarray) -> complex:
    """Phi(tau) = sum_{g in SL2(Z)} (g tau)^-s j(g, tau)^-k, truncated to bottom rows in ``rows``."""
    tau_f, jac = _reduce_to_fundamental(tau)
    c = rows[:, 0].astype(float)
    d = rows[:, 1].astype(float)
    # any top row completing (c, d) works since every translate is summed
    tops = np.array([_complete_row(int(ci), int(di)) for ci, di in rows], dtype=float)
    jj = c * tau_f + d
    x0 = (tops[:, 0] * tau_f + tops[:, 1]) / jj
    inner = _translate_sums(x0, s)
    phi_f = complex(np.sum(jj ** (-k) * inner))
    return phi_f * jac ** (-k)


def _complete_row(c: int, d: int) -> tuple[int, int]:
    # a d - b c = 1
    g, x, y = _ext_gcd(d, -c)
    if g < 0:
        x, y = -x, -y
    return x, y


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return a, 1, 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _direct_raw(z: complex, s: complex, w: complex, k: int, n_max: int, height: int) -> complex:
    rows = _primitive_rows(height)
    total = 0j
    for n in range(1, n_max + 1):
        level = 0j
        for d in divisors(n):
            a = n // d
            for b in range(d):
                level += d ** (-k) * _gamma_sum((a * z + b) / d, s, k, rows)
        total += complex(np.exp((w - 1.0) * math.log(n))) * level
    return total


def direct_prefactor(s: complex, w: complex, k: int) -> complex:
    lg = log_gamma(np.array([s, k - s, k - w, k - 1.0]))
    log_val = (0.5j * math.pi * s + lg[0] + lg[1] + lg[2] - lg[3]
               - (3.0 - w) * math.log(2.0) - (k + 1.0 - w) * math.log(math.pi))
    return complex(np.exp(log_val))


def kernel_direct_sum(z: complex, p: KernelPoint, n_max: int = 16, height_max: int = 24) -> DirectSum:
    """E*_{s,k-s}(z, w) by summing over M_n, n <= n_max.

    M_n is split into Gamma-cosets of Hermite normal forms; on each coset the
    bottom rows (c, d) run over primitive vectors with |c|, |d| <= height_max
    and the translates by Gamma_infinity are summed in closed form.
    """
    if not p.in_D:
        raise DomainError("kernel_direct_sum needs (s, w) in the absolute convergence region")
    z = complex(z)
    if z.imag < 1.5:
        raise DomainError("kernel_direct_sum needs Im(z) >= 1.5")
    raw = _direct_raw(z, p.s, p.w, p.k, n_max, height_max)
    coarse = _direct_raw(z, p.s, p.w, p.k, max(1, n_max // 2), max(1, height_max // 2))
    pref = direct_prefactor(p.s, p.w, p.k)
    tail = abs(pref * (raw - coarse))
    value = pref * raw
    return DirectSum(value, raw, tail, tail > 1e-4 * abs(value), n_max, height_max)


def fourier_partial_sum(z: complex, p: KernelPoint, m_max: int = 6, rel_tol: float = 1e-6) -> complex:
    """sum_{m <= m_max} prefactor * c(m) e^{2 pi i m z}.

    Each coefficient only needs accuracy relative to the running sum, so the
    triple-sum tolerance for m >= 2 is loosened by the damping |e^{2 pi i m z}|
    (measured against the closed-form zeta terms).
    """
    z = complex(z)
    pref = abs(kernel_prefactor(p.s, p.w, p.k).to_complex())
    total = 0j
    for m in range(1, m_max + 1):
        weight = complex(np.exp(2j * math.pi * m * z))
        tol = rel_tol
        if m > 1:
            t1, t2 = _zeta_terms(p.s, p.w, p.k, m)
            size = pref * (abs(t1) + abs(t2)) * abs(weight)
            if size > 0:
                tol = min(0.1, max(rel_tol, rel_tol * abs(total) / size))
        total += fourier_coefficient(p, m, rel_tol=tol).completed() * weight
    return complex(total)


# --------------------------------------------------------------------------
# Identity verification
# --------------------------------------------------------------------------

@dataclass
class IdentityEntry:
    s: complex
    w: complex
    m: int
    fourier: complex | None = None
    spectral: complex | None = None
    rel_err: float | None = None
    degenerate: bool = False
    truncation: dict = field(default_factory=dict)
    error: str | None = None


@dataclass
class IdentityReport:
    k: int
    convention: str
    entries: list
    tolerance: float
    rel_tol: float

    @property
    def max_rel_err(self) -> float:
        errs = [e.rel_err for e in self.entries if e.rel_err is not None]
        return max(errs) if errs else math.nan

    @property
    def passed(self) -> bool:
        return all(e.error is None and e.rel_err is not None and e.rel_err <= self.tolerance
                   for e in self.entries)


def verify_identity(k: int, points, m_list=(1, 2, 3),
                    convention: lfunc.LStarConvention = lfunc.DEFAULT_CONVENTION,
                    tolerance: float = 1e-4, rel_tol: float | None = None) -> IdentityReport:
    """Compare the Fourier-formula and spectral routes for each (s, w, m)."""
    rel_tol = tolerance / 10.0 if rel_tol is None else rel_tol
    entries = []
    for s, w in points:
        for m in m_list:
            entry = IdentityEntry(complex(s), complex(w), int(m))
            try:
                p = KernelPoint(s, w, k)
                br = fourier_coefficient(p, m, rel_tol=rel_tol)
                spec = spectral_coefficient(k, p.s, p.w, m, convention)
                entry.fourier = br.completed()
                entry.spectral = spec.value
                entry.truncation = {"C_max": br.truncation.C_max, "N_max": br.truncation.N_max,
                                    "tail_estimate": br.truncation.tail_estimate}
                if spec.empty:
                    # no cusp forms: the Fourier side must cancel down to zero
                    entry.degenerate = True
                    entry.rel_err = abs(entry.fourier) / (br.prefactor.to_complex().__abs__() * br.scale)
                else:
                    entry.rel_err = abs(entry.fourier - entry.spectral) / abs(entry.spectral)
            except Exception as exc:  # noqa: BLE001 - reported per point
                entry.error = f"{type(exc).__name__}: {exc}"
            entries.append(entry)
    return IdentityReport(k, convention.tag, entries, tolerance, rel_tol)


@dataclass
class ConventionReport:
    k: int
    candidates: list
    chosen: str | None


def disambiguate_convention(k: int = 12, points=None, m: int = 1) -> ConventionReport:
    """Evaluate both L* conventions against the Fourier formula.

    For each convention the ratio fourier / spectral is computed at every point.
    A convention is consistent when the ratio is constant over the points; the
    constant is the implied normalization of the Petersson product.
    """
    points = points or [(5.5 + 0.5j, -1.5 - 0.25j), (6.5 - 0.3j, -2.0 + 0.4j), (4.5 + 0.2j, -0.5 + 0.1j)]
    fouriers = [fourier_coefficient(KernelPoint(s, w, k), m, rel_tol=1e-7).completed() for s, w in points]
    candidates = []
    chosen = None
    for sign in (-1, 1):
        conv = lfunc.LStarConvention(sign)
        ratios = [f / spectral_coefficient(k, s, w, m, conv).value for f, (s, w) in zip(fouriers, points)]
        spread = max(abs(r / ratios[0] - 1.0) for r in ratios)
        consistent = spread < 1e-4
        candidates.append({"convention": conv.tag, "ratios": ratios, "spread": spread,
                           "constant": ratios[0] if consistent else None, "consistent": consistent})
        if consistent and abs(ratios[0] - 1.0) < 1e-4 and chosen is None:
            chosen = conv.tag
    return ConventionReport(k, candidates, chosen)
