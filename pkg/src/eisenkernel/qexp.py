"""Exact q-expansions of level one modular forms and the Hecke eigenbasis of S_k.

Coefficients are ``Fraction`` objects.  The only floating point step is the
eigen-decomposition in :func:`eigenforms`, done at high precision with mpmath
and rounded to doubles at the end.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import CapabilityError, ConvergenceError, ParameterError

MAX_WEIGHT = 120
SPLITTING_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated q-expansion sum_{n=0}^{N} c_n q^n with exact coefficients."""

    coefficients: tuple
    truncation_order: int

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if len(coeffs) != self.truncation_order + 1:
            raise ParameterError("coefficient count must equal truncation_order + 1")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_list(cls, coeffs) -> "PowerSeries":
        coeffs = list(coeffs)
        return cls(tuple(coeffs), len(coeffs) - 1)

    def __getitem__(self, n: int) -> Fraction:
        return self.coefficients[n]

    def __len__(self):
        return self.truncation_order + 1

    def _common(self, other: "PowerSeries") -> int:
        return min(self.truncation_order, other.truncation_order)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = self._common(other)
        return PowerSeries.from_list(self[i] + other[i] for i in range(n + 1))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = self._common(other)
        return PowerSeries.from_list(self[i] - other[i] for i in range(n + 1))

    def __neg__(self) -> "PowerSeries":
        return self.scale(-1)

    def scale(self, c) -> "PowerSeries":
        c = Fraction(c)
        return PowerSeries.from_list(c * x for x in self.coefficients)

    def __mul__(self, other):
        if not isinstance(other, PowerSeries):
            return self.scale(other)
        n = self._common(other)
        a, b = self.coefficients, other.coefficients
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(n + 1 - i):
                out[i + j] += ai * b[j]
        return PowerSeries.from_list(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "PowerSeries":
        if e < 0:
            raise ParameterError("negative powers are not supported")
        result = PowerSeries.from_list([1] + [0] * self.truncation_order)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def truncate(self, n: int) -> "PowerSeries":
        return PowerSeries.from_list(self.coefficients[: n + 1])


def _sigma_int(n: int, r: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** r
            if d * d != n:
                total += (n // d) ** r
        d += 1
    return total


def eisenstein_qexp(weight: int, N: int) -> PowerSeries:
    if weight not in (4, 6):
        raise ParameterError("eisenstein_qexp supports weight 4 or 6")
    if N < 1:
        raise ParameterError("N must be >= 1")
    c, r = (240, 3) if weight == 4 else (-504, 5)
    return PowerSeries.from_list([1] + [c * _sigma_int(n, r) for n in range(1, N + 1)])


def delta_qexp(N: int) -> PowerSeries:
    if N < 1:
        raise ParameterError("N must be >= 1")
    e4, e6 = eisenstein_qexp(4, N), eisenstein_qexp(6, N)
    return (e4 ** 3 - e6 ** 2).scale(Fraction(1, 1728))


def cusp_dimension(k: int) -> int:
    if k % 2 or k < 4:
        raise ParameterError("weight must be even and >= 4")
    d = k // 12
    return d - 1 if k % 12 == 2 else d


@dataclass(frozen=True)
class CuspSpace:
    weight: int
    dimension: int
    miller_basis: tuple = field(default_factory=tuple)

    @property
    def truncation_order(self) -> int:
        return self.miller_basis[0].truncation_order if self.miller_basis else 0


def _check_weight(k: int):
    if not isinstance(k, int) or k % 2 or k < 4:
        raise ParameterError("weight must be even and >= 4")
    if k > MAX_WEIGHT:
        raise CapabilityError(f"weights above {MAX_WEIGHT} are not supported")


def miller_basis(k: int, N: int) -> CuspSpace:
    """Echelonized basis q^i + O(q^{d+1}), i = 1..d, of S_k."""
    _check_weight(k)
    d = cusp_dimension(k)
    if N < d + 1:
        raise ParameterError(f"truncation N={N} too small, need N >= {d + 1}")
    if d == 0:
        return CuspSpace(k, 0, ())
    e4, e6, delta = eisenstein_qexp(4, N), eisenstein_qexp(6, N), delta_qexp(N)
    gens = []
    for j in range(1, d + 1):
        r = k - 12 * j
        a, b = (r // 4, 0) if r % 4 == 0 else ((r - 6) // 4, 1)
        gens.append(delta ** j * e4 ** a * e6 ** b)
    # each gen is q^j + O(q^{j+1}); clear entries above the diagonal bottom-up
    for i in range(d - 1, -1, -1):
        for j in range(i + 1, d):
            c = gens[i][j + 1]
            if c:
                gens[i] = gens[i] - gens[j].scale(c)
    return CuspSpace(k, d, tuple(gens))


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def hecke_matrix(space: CuspSpace, p: int) -> list[list[Fraction]]:
    """Matrix A of T_p on the Miller basis; column i holds T_p(g_i), so A v = lambda v."""
    if not _is_prime(p):
        raise ParameterError(f"{p} is not prime")
    d = space.dimension
    if d == 0:
        return []
    need = p * d + 1
    if space.truncation_order < need:
        raise ParameterError(f"hecke_matrix needs truncation order >= {need} (p*d + 1)")
    pk = Fraction(p) ** (space.weight - 1)
    cols = []
    for g in space.miller_basis:
        cols.append([g[p * n] + (pk * g[n // p] if n % p == 0 else 0) for n in range(1, d + 1)])
    return [[cols[i][j] for i in range(d)] for j in range(d)]


def _charpoly(matrix: list[list[Fraction]]) -> list[Fraction]:
    """Coefficients [1, c_1, ..., c_d] of det(xI - A) by Faddeev-LeVerrier."""
    d = len(matrix)
    ident = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    coeffs = [Fraction(1)]
    m = [[Fraction(0)] * d for _ in range(d)]
    for k in range(1, d + 1):
        # M_k = A M_{k-1} + c_{k-1} I
        prod = [[sum(matrix[i][t] * m[t][j] for t in range(d)) for j in range(d)] for i in range(d)]
        m = [[prod[i][j] + coeffs[-1] * ident[i][j] for j in range(d)] for i in range(d)]
        am = [[sum(matrix[i][t] * m[t][j] for t in range(d)) for j in range(d)] for i in range(d)]
        coeffs.append(-sum(am[i][i] for i in range(d)) / k)
    return coeffs


def _trim(p: list) -> list:
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def _poly_rem(a: list, b: list) -> list:
    a = list(a)
    while len(a) >= len(b):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = _trim(a[1:])
    return a


def _poly_gcd_degree(a: list, b: list) -> int:
    """Degree of gcd(a, b) for coefficient lists, leading coefficient first."""
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_rem(a, b)
    return len(a) - 1


def has_distinct_eigenvalues(matrix: list[list[Fraction]]) -> bool:
    d = len(matrix)
    if d <= 1:
        return True
    cp = _charpoly(matrix)
    deriv = [c * (d - i) for i, c in enumerate(cp[:-1])]
    return _poly_gcd_degree(cp, deriv) == 0


@dataclass(frozen=True)
class Eigenform:
    weight: int
    coeffs: tuple  # a(1), ..., a(N) as floats
    exact: bool = False
    prime: int = 0
    eigenvalue: float = 0.0

    def a(self, n: int) -> float:
        return self.coeffs[n - 1]

    @property
    def N(self) -> int:
        return len(self.coeffs)


_PRECISION_DIGITS = 80


def _eigenvectors(matrix, dps=_PRECISION_DIGITS):
    """High-precision eigenpairs of a rational matrix with simple real spectrum."""
    d = len(matrix)
    with mpmath.workdps(dps):
        A = mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in row] for row in matrix])
        cp = _charpoly(matrix)
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in cp],
                                 maxsteps=500, extraprec=4 * dps)
        pairs = []
        for lam in roots:
            lam = mpmath.re(lam)
            # inverse iteration from a slightly shifted eigenvalue
            tiny = mpmath.mpf(10) ** (-dps // 4)
            shift = lam * (1 + tiny) + tiny
            B = A - shift * mpmath.eye(d)
            v = mpmath.matrix([1] * d)
            for _ in range(6):
                v = mpmath.lu_solve(B, v)
                v = v / v[0]
            resid = mpmath.norm(A * v - lam * v) / mpmath.norm(v)
            if resid > mpmath.mpf(10) ** (-10):
                raise ConvergenceError(f"eigenvector residual {float(resid):.3g} too large")
            pairs.append((lam, v))
        pairs.sort(key=lambda t: t[0])
    return pairs


@lru_cache(maxsize=64)
def eigenforms(k: int, N: int = 64) -> tuple:
    """Normalized Hecke eigenforms of weight k with coefficients a(1..N)."""
    _check_weight(k)
    if k < 12:
        return ()
    if N < 1:
        raise ParameterError("N must be >= 1")
    d = cusp_dimension(k)
    if d == 0:
        return ()
    space = None
    for p in SPLITTING_PRIMES:
        order = max(N, p * d + 1)
        if space is None or space.truncation_order < order:
            space = miller_basis(k, order)
        T = hecke_matrix(space, p)
        if has_distinct_eigenvalues(T):
            break
    else:
        raise ConvergenceError("T_p has repeated eigenvalues for every prime up to 19")
    if d == 1:
        coeffs = tuple(float(space.miller_basis[0][n]) for n in range(1, N + 1))
        exact = all(space.miller_basis[0][n].denominator == 1 for n in range(1, N + 1))
        return (Eigenform(k, coeffs, exact, p, float(T[0][0])),)
    forms = []
    with mpmath.workdps(_PRECISION_DIGITS):
        basis = [[mpmath.mpf(g[n].numerator) / g[n].denominator for n in range(1, N + 1)]
                 for g in space.miller_basis]
        for lam, v in _eigenvectors(T):
            coeffs = tuple(float(sum(v[j] * basis[j][n] for j in range(d))) for n in range(N))
            forms.append(Eigenform(k, coeffs, False, p, float(lam)))
    return tuple(forms)
