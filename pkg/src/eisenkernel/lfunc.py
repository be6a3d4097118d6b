"""Completed L-functions of Hecke eigenforms and Petersson norms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import qexp
from .errors import ConvergenceError, DomainError, InsufficientCoefficientsError, ParameterError
from .specfun import LOG_TWO_PI, TWO_PI, log_gamma, upper_incomplete_gamma

LSTAR_TERM_CAP = 200


@dataclass(frozen=True)
class LStarConvention:
    """L* = (2 pi)^(sign * s) Gamma(s) L(f, s)."""

    two_pi_exponent_sign: int = -1

    def __post_init__(self):
        if self.two_pi_exponent_sign not in (1, -1):
            raise ParameterError("two_pi_exponent_sign must be +1 or -1")

    @property
    def tag(self) -> str:
        return "(2pi)^(-s)Gamma(s)L" if self.two_pi_exponent_sign < 0 else "(2pi)^(+s)Gamma(s)L"


DEFAULT_CONVENTION = LStarConvention(-1)


@dataclass(frozen=True)
class DirichletValue:
    value: complex
    tail_bound: float
    cutoff: int


def _divisor_counts(n_max: int) -> np.ndarray:
    counts = np.zeros(n_max + 1, dtype=float)
    for d in range(1, n_max + 1):
        counts[d::d] += 1
    return counts[1:]


_DIVISOR_COUNTS = _divisor_counts(LSTAR_TERM_CAP)


def dirichlet_l(f: qexp.Eigenform, s: complex, N: int | None = None) -> DirichletValue:
    """Partial Dirichlet series sum_{n <= N} a(n) n^-s with a Deligne-bound tail estimate."""
    k = f.weight
    s = complex(s)
    if s.real <= k / 2 + 1:
        raise DomainError(f"dirichlet_l needs Re(s) > {k / 2 + 1} for absolute convergence")
    N = f.N if N is None else N
    if N > f.N:
        raise InsufficientCoefficientsError(f"only {f.N} coefficients available, asked for {N}", N)
    n = np.arange(1, N + 1)
    a = np.asarray(f.coeffs[:N])
    value = complex(np.sum(a * np.exp(-s * np.log(n))))
    # d(n) <= 2 sqrt(n), then compare the sum with an integral
    expo = k / 2 - s.real
    tail = 2.0 * N ** (expo + 1) / (-(expo + 1))
    return DirichletValue(value, float(tail), N)


def _lstar_terms(k: int, s: complex, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    x = TWO_PI * np.arange(1, n_max + 1)
    logx = np.log(x)
    sign = (-1) ** (k // 2)
    first = upper_incomplete_gamma(s, x) * np.exp(-s * logx)
    second = upper_incomplete_gamma(k - s, x) * np.exp(-(k - s) * logx)
    return first + sign * second, np.abs(first) + np.abs(second)


def _term_bounds(k: int, sigma: float, n_max: int) -> np.ndarray:
    # |a(n)| <= d(n) n^((k-1)/2) and |Gamma(s, x)| <= Gamma(Re s, x)
    n = np.arange(1, n_max + 1)
    x = TWO_PI * n
    g1 = np.abs(upper_incomplete_gamma(sigma, x)) * x ** (-sigma)
    g2 = np.abs(upper_incomplete_gamma(k - sigma, x)) * x ** (sigma - k)
    return _DIVISOR_COUNTS[:n_max] * n ** ((k - 1) / 2) * (g1 + g2)


def lstar(f: qexp.Eigenform, s: complex, convention: LStarConvention = DEFAULT_CONVENTION,
          tol: float = 1e-14) -> complex:
    """Completed L-function through the incomplete-gamma expansion."""
    k = f.weight
    s = complex(s)
    if not (-2.0 <= s.real <= k + 2.0):
        raise DomainError(f"lstar validated for Re(s) in [-2, {k + 2}]")
    bounds = _term_bounds(k, s.real, LSTAR_TERM_CAP)
    n_avail = min(f.N, LSTAR_TERM_CAP)
    a = np.asarray(f.coeffs[:n_avail])
    combined, magnitude = _lstar_terms(k, s, n_avail)
    terms = a * combined
    # measured against both halves so a forced central zero still terminates
    scale = float(np.sum(np.abs(a) * magnitude))
    tails = np.cumsum(bounds[::-1])[::-1]  # tails[j] = sum of bounds for n > j
    tails = np.append(tails[1:], 0.0)
    ok = np.flatnonzero(tails <= tol * max(scale, 1e-300))
    required = int(ok[0]) + 1 if ok.size else LSTAR_TERM_CAP
    if required > n_avail:
        raise InsufficientCoefficientsError(
            f"lstar at s={s} needs {required} coefficients, eigenform has {f.N}", required)
    value = complex(np.sum(terms[:required]))
    if convention.two_pi_exponent_sign > 0:
        value *= complex(np.exp(2.0 * s * LOG_TWO_PI))
    return value


def lstar_from_dirichlet(f: qexp.Eigenform, s: complex) -> complex:
    """(2 pi)^-s Gamma(s) L(f, s) in the region of absolute convergence."""
    d = dirichlet_l(f, s)
    return complex(np.exp(-s * LOG_TWO_PI + log_gamma(s))) * d.value


@dataclass(frozen=True)
class NormRefinement:
    value: float
    trace: tuple = field(default_factory=tuple)


def _f_values(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    n = np.arange(1, coeffs.size + 1)
    return np.exp(2j * math.pi * np.multiply.outer(z, n)) @ coeffs


def _lower_region(coeffs: np.ndarray, k: int, q: int) -> float:
    # 2 * int_0^{1/2} dx int_{sqrt(1-x^2)}^{1} |f|^2 y^(k-2) dy
    t, w = np.polynomial.legendre.leggauss(q)
    x = 0.25 * (t + 1.0)
    wx = 0.25 * w
    y0 = np.sqrt(1.0 - x * x)
    half = 0.5 * (1.0 - y0)
    y = y0[:, None] + half[:, None] * (t[None, :] + 1.0)
    wy = half[:, None] * w[None, :]
    vals = np.abs(_f_values(coeffs, x[:, None] + 1j * y)) ** 2 * y ** (k - 2)
    return 2.0 * float(np.sum(wx[:, None] * wy * vals))


def _upper_region(coeffs: np.ndarray, k: int) -> float:
    # int_{y >= 1} over a full period: sum a(n)^2 Gamma(k-1, 4 pi n) / (4 pi n)^(k-1)
    n = np.arange(1, coeffs.size + 1)
    x = 4.0 * math.pi * n
    g = np.real(upper_incomplete_gamma(k - 1.0, x))
    nz = coeffs != 0
    logs = 2.0 * np.log(np.abs(coeffs[nz])) + np.log(g[nz]) - (k - 1) * np.log(x[nz])
    return float(np.sum(np.exp(logs)))


def petersson_refinement(f: qexp.Eigenform, q0: int = 16, q_max: int = 512,
                         rtol: float = 1e-13) -> NormRefinement:
    if f.N < 30:
        raise ParameterError("petersson_norm needs at least 30 coefficients")
    coeffs = np.asarray(f.coeffs)
    upper = _upper_region(coeffs, f.weight)
    trace = []
    q = q0
    prev = None
    while q <= q_max:
        val = upper + _lower_region(coeffs, f.weight, q)
        trace.append((q, val))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return NormRefinement(val, tuple(trace))
        prev = val
        q *= 2
    raise ConvergenceError("Petersson quadrature did not settle", partial=prev, trace=trace)


@lru_cache(maxsize=256)
def petersson_norm(f: qexp.Eigenform) -> float:
    """<f, f> = int_F |f|^2 y^(k-2) dx dy over the standard fundamental domain."""
    return petersson_refinement(f).value


@lru_cache(maxsize=64)
def spectral_basis(k: int, N: int = 64) -> tuple:
    """((eigenform, norm), ...) for S_k; empty when the space is zero."""
    return tuple((f, petersson_norm(f)) for f in qexp.eigenforms(k, N))
