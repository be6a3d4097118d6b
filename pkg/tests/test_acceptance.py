"""End-to-end acceptance checks.

Each test records one PASS/FAIL line; conftest prints them in the terminal
summary. Run this file alone with ``pytest tests/test_acceptance.py -s``
to see the lines as they are produced.
"""
import math
import time

import numpy as np
import pytest

from eisenkernel import continuation as cont
from eisenkernel import kernel, lfunc, nonvanish, qexp
from eisenkernel.kernel import KernelPoint

RESULTS: dict[int, str] = {}

WEIGHTS = (12, 16, 18, 20, 22, 24, 26)


def record(n: int, title: str, ok: bool, elapsed: float, limit: float, detail: str) -> None:
    ok = ok and elapsed < limit
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} ({detail}; {elapsed:.1f} s of {limit:.0f} s)"
    RESULTS[n] = line
    print(line)
    assert ok, line


def brute_delta(n_max):
    c = [0] * (n_max + 1)
    c[0] = 1
    for n in range(1, n_max + 1):
        for _ in range(24):
            for i in range(n_max, n - 1, -1):
                c[i] -= c[i - n]
    return c[:n_max]


def test_criterion_1_eigenforms():
    t = time.perf_counter()
    worst = 0.0
    for k in WEIGHTS:
        for f in qexp.eigenforms(k, 100):
            worst = max(worst, abs(f.a(1) - 1))
            for m in range(2, f.N + 1):
                for r in range(m + 1, f.N // m + 1):
                    if math.gcd(m, r) == 1:
                        prod = f.a(m) * f.a(r)
                        worst = max(worst, abs(f.a(m * r) - prod) / max(abs(prod), 1.0))
            for p in (2, 3, 5, 7):
                expect = f.a(p) ** 2 - p ** (k - 1)
                worst = max(worst, abs(f.a(p * p) - expect) / max(abs(expect), f.a(p) ** 2))
    (delta,) = qexp.eigenforms(12, 50)
    exact = [int(c) for c in delta.coeffs] == brute_delta(50)
    record(1, "eigenform Hecke relations and Delta expansion", worst <= 1e-9 and exact,
           time.perf_counter() - t, 10, f"max rel dev {worst:.1e}, Delta exact through 50: {exact}")


def test_criterion_2_functional_equation():
    t = time.perf_counter()
    rng = np.random.default_rng(20260)
    worst, worst_zero = 0.0, 0.0
    for k in WEIGHTS:
        forms = qexp.eigenforms(k, 200)
        sign = (-1) ** (k // 2)
        for s in rng.uniform(2, k - 2, 20) + 1j * rng.uniform(-2, 2, 20):
            for f in forms:
                a, b = lfunc.lstar(f, s), lfunc.lstar(f, k - s)
                worst = max(worst, abs(b - sign * a) / max(abs(a), abs(b)))
        if k % 4 == 2:
            for f in forms:
                worst_zero = max(worst_zero, abs(lfunc.lstar(f, k / 2)) / abs(lfunc.lstar(f, k / 2 + 0.5)))
    record(2, "L* functional equation and forced central zeros", worst <= 1e-8 and worst_zero <= 1e-10,
           time.perf_counter() - t, 30, f"max rel dev {worst:.1e}, central ratio {worst_zero:.1e}")


IDENTITY_S = (0.5 + 0.5j, -0.7 + 0.3j, 1.3 - 0.2j)
IDENTITY_W = (-1.5 - 0.25j, -0.5 + 0.4j, -1.9 + 0.1j)


def test_criterion_3_kernel_identity():
    t = time.perf_counter()
    worst, passed = 0.0, True
    for k in (12, 16, 18, 20):
        pts = [(k / 2 + ds, w) for ds, w in zip(IDENTITY_S, IDENTITY_W)]
        assert all(KernelPoint(s, w, k).in_D for s, w in pts)
        rep = kernel.verify_identity(k, pts, m_list=(1, 2, 3), tolerance=1e-4)
        passed = passed and rep.passed
        worst = max(worst, rep.max_rel_err)
    record(3, "spectral vs Fourier kernel coefficients", passed and worst <= 1e-4,
           time.perf_counter() - t, 300, f"max rel err {worst:.1e} over 36 cases")


def test_criterion_4_direct_sum():
    t = time.perf_counter()
    p = KernelPoint(5.5 + 0.5j, -1.5 - 0.25j, 12)
    z = 0.3 + 2j
    direct = kernel.kernel_direct_sum(z, p).value
    fourier = kernel.fourier_partial_sum(z, p, m_max=8)
    err = abs(direct / fourier - 1)
    record(4, "direct lattice sum vs Fourier partial sum", err <= 1e-3,
           time.perf_counter() - t, 120, f"rel err {err:.1e}")


F1_POINTS = [(5.6 + 0.3j, 5.8 - 0.4j, 12), (5.7 - 0.9j, 5.55 + 0.2j, 12), (7.6 + 0.5j, 7.9 - 0.5j, 16),
             (9.55 + 1.0j, 9.7 - 0.1j, 20), (11.6 - 0.3j, 11.75 + 0.7j, 24)]
PAIRS = [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (1, 5), (5, 3), (4, 7), (7, 4), (6, 5)]


def test_criterion_5_continuation():
    t = time.perf_counter()
    p = KernelPoint(5.5 + 0.5j, -1.5 - 0.25j, 12)
    g_err = 0.0
    for a, c in PAIRS:
        ser = cont.g_ac(a, c, p, "series")
        g_err = max(g_err, abs(cont.g_ac(a, c, p, "hurwitz") - ser) / abs(ser))

    f1_err = 0.0
    for s, w, k in F1_POINTS:
        q = KernelPoint(s, w, k)
        val = cont.lemma_f1_rhs(q, mode="none")
        got = val.total_main / val.main_terms[0] + cont.exact_remainder_ratio(q)
        ref = nonvanish.spectral_normalized(np.array([s]), np.array([w]), k)[0, 0]
        f1_err = max(f1_err, abs(got - ref) / abs(ref))

    sing_err = 0.0
    for s, k in ((5.7 + 0.2j, 12), (5.55 - 0.8j, 12), (11.6 + 0.5j, 24)):
        at = cont.sing_pair(KernelPoint(s, s, k))
        for h in (1e-8, 1e-8j, -1e-8 + 1e-8j):
            sing_err = max(sing_err, abs(cont.sing_pair(KernelPoint(s, s + h, k)) - at) / abs(at))

    fd_err = 0.0
    h = 1e-5
    for k in (12, 40, 100):
        for dz in (-0.4 + 0.5j, 0.1 - 0.9j, 0.3 + 0.2j):
            z = k / 2 + dz
            fd = (cont.g_func(z + h, k) - cont.g_func(z - h, k)) / (2 * h)
            gp = cont.g_prime(z, k)
            fd_err = max(fd_err, abs(fd - gp) / max(abs(gp), abs(cont.g_func(z, k))))

    ok = g_err <= 1e-7 and f1_err <= 1e-5 and sing_err <= 1e-6 and fd_err <= 1e-5
    record(5, "continuation consistency", ok, time.perf_counter() - t, 120,
           f"g_ac {g_err:.1e}, strip vs spectral {f1_err:.1e}, diagonal {sing_err:.1e}, g' {fd_err:.1e}")


def test_criterion_6_nonvanishing_scan():
    t = time.perf_counter()
    rep = nonvanish.estimate_C(1.0, 0.25, 12, 300)
    tail = rep.k0 is not None and all(rep.certified[k] for k in range(rep.k0, 301, 2))
    checked = [k for k in range(12, 61, 2) if k in rep.exact_checks]
    worst = max(rep.exact_checks[k]["max_deviation"] for k in checked)
    agree = len(checked) == 25 and all(rep.exact_checks[k]["agrees"] for k in checked) and worst <= 1e-4
    record(6, "certified nonvanishing scan over 12..300", tail and agree, time.perf_counter() - t, 1800,
           f"k0 = {rep.k0}, exact checks {len(checked)} weights, max deviation {worst:.1e}")


def test_criterion_7_shifted_quantity():
    t = time.perf_counter()
    ks = (50, 100, 200, 400)
    decreasing = True
    for s, w in ((0.4 + 1j, 0.3 + 0.5j), (0.45 - 0.2j, 0.35 + 0.8j)):
        vals = [nonvanish.theorem34_quantity(s, w, k).terms for k in ks]
        for i in (2, 3):
            mods = [abs(v[i]) for v in vals]
            decreasing = decreasing and all(b < a for a, b in zip(mods, mods[1:]))
    rep = nonvanish.assumption_check(1.0, 0.6 + 0.5j, 0.05, [100, 200, 400])
    record(7, "shifted-coordinate decay and ratio assumption", decreasing and rep.consistent,
           time.perf_counter() - t, 60, f"third/fourth decreasing: {decreasing}, verdict {rep.verdict}")


SYMMETRY_POINTS = [(10 + 0.3j, 4.5 + 0.2j, 20), (8 + 0.3j, 3.5 + 0.2j, 16), (9 + 0.3j, 4 + 0.2j, 18),
                   (12 + 0.3j, 6.5 + 0.2j, 24), (12 + 0.3j, 8 + 0.2j, 24), (11 + 0.5j, 5.5 - 0.3j, 22),
                   (13 - 0.4j, 7.5 + 0.1j, 26), (14 + 0.2j, 9 - 0.3j, 28), (9.5 - 0.2j, 4 + 0.4j, 18),
                   (10.5 + 0.1j, 5 - 0.2j, 20)]


def test_criterion_8_symmetries():
    t = time.perf_counter()
    swap_err = refl_err = 0.0
    for s, w, k in SYMMETRY_POINTS:
        p = KernelPoint(s, w, k)
        assert p.in_D and not p.swapped().in_D
        a = kernel.fourier_coefficient(p, 1, rel_tol=1e-7).completed()
        # (w, s) lies outside the convergence region, so it is reached by continuation
        b = cont.continued_first_coefficient(p.swapped())
        swap_err = max(swap_err, abs(a / b - 1))
        r = kernel.fourier_coefficient(KernelPoint(k - s, w, k), 1, rel_tol=1e-7).completed()
        refl_err = max(refl_err, abs(r / ((-1) ** (k // 2) * a) - 1))
    record(8, "swap and reflection symmetries", swap_err <= 1e-6 and refl_err <= 1e-6,
           time.perf_counter() - t, 120, f"swap {swap_err:.1e}, reflection {refl_err:.1e}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
