import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisenkernel import nonvanish as nv
from eisenkernel.errors import DomainError, ParameterError, PreconditionError
from eisenkernel.kernel import KernelPoint

mpmath.mp.dps = 30


def n_main_mpmath(s, w, k):
    s, w = mpmath.mpc(s), mpmath.mpc(w)
    tp = 2 * mpmath.pi
    sg = (-1) ** (k // 2)
    g = lambda z: tp ** (k - 2 * z) * mpmath.gamma(z) / mpmath.gamma(k - z)  # noqa: E731
    num = sg * (g(s) * mpmath.zeta(1 + s - w) + g(w) * mpmath.zeta(1 + w - s)) + g(s) * g(w) * mpmath.zeta(1 + s + w - k)
    return complex(1 + num / mpmath.zeta(1 + k - s - w))


@pytest.mark.parametrize("s,w,k", [(5.6 + 0.3j, 5.8 - 0.4j, 12), (99.7 + 0.5j, 99.6 - 0.5j, 200),
                                   (19.55 + 1j, 19.75 + 0.2j, 40)])
def test_normalized_main_against_mpmath(s, w, k):
    assert abs(complex(nv.normalized_main(s, w, k)) - n_main_mpmath(s, w, k)) < 1e-11


def test_normalized_main_diagonal_is_limit():
    k, s = 40, 19.7 + 0.4j
    at = complex(nv.normalized_main(s, s, k))
    near = n_main_mpmath(s, s + 1e-8, k)
    assert abs(at - near) < 1e-6


def test_normalized_main_pole():
    with pytest.raises(DomainError):
        nv.normalized_main(5.7, 6.3, 12)


def test_normalized_expression_branches():
    far = nv.normalized_expression(KernelPoint(5.6 + 0.3j, 5.8 - 0.4j, 12), "none")
    assert abs(far.value - n_main_mpmath(5.6 + 0.3j, 5.8 - 0.4j, 12)) < 1e-11 and far.remainder_ratio == 0
    near = nv.normalized_expression(KernelPoint(19.7 + 0.1j, 19.7 - 0.1j, 40))
    assert near.remainder_ratio > 0
    with pytest.raises(DomainError):
        nv.normalized_expression(KernelPoint(5.5, -1, 12))


def test_spectral_normalized_nan_outside_strip():
    out = nv.spectral_normalized(np.array([5.7 + 0.2j]), np.array([-2.5 + 0j, 5.6 + 0j]), 12)
    assert np.isnan(out[0, 0]) and np.isfinite(out[0, 1])


def test_region_spec():
    r = nv.RegionSpec("R", 40)
    assert np.allclose(r.offsets(), [-0.45, -0.4, -0.35, -0.3, -0.25])
    assert r.imaginary_parts().size == 41
    pts, offs = r.line_points()
    assert pts.size == 5 * 41 and np.all(np.abs(pts.real - 20 - offs) < 1e-12)
    t = nv.RegionSpec("R_tilde", 40)
    assert t.offsets().max() == 0 and np.all(np.abs(t.imaginary_parts()) >= 0.25 - 1e-12)
    with pytest.raises(ParameterError):
        nv.RegionSpec("X", 40)
    with pytest.raises(ParameterError, match="even"):
        nv.RegionSpec("R", 41)
    with pytest.raises(ParameterError):
        nv.RegionSpec("R", 40, delta=0)


def test_scan_weight_40_with_exact_check():
    rep = nv.scan_region(nv.RegionSpec("R", 40, grid_step=0.1))
    assert rep.certified and rep.min_margin > 0
    ex = rep.exact_check
    assert ex["agrees"] and ex["max_deviation"] <= nv.EXACT_CHECK_TOL and ex["envelope_holds"]
    assert rep.n_points == rep.N.size == rep.margin.size


def test_scan_empirical_mode():
    rep = nv.scan_region(nv.RegionSpec("R", 24, grid_step=0.1), mode="empirical", exact_check=False)
    assert rep.mode == "empirical" and rep.certified
    with pytest.raises(ParameterError):
        nv.scan_region(nv.RegionSpec("R", 24), mode="bogus")


def test_scan_vacuous_region():
    rep = nv.scan_region(nv.RegionSpec("R", 40, delta=0.5))
    assert rep.vacuous and rep.certified and rep.n_points == 0


def test_scan_tilde_region_mask():
    spec = nv.RegionSpec("R_tilde", 200, grid_step=0.1)
    rep = nv.scan_region(spec)
    off_s = rep.s.real - 100
    off_w = rep.w.real - 100
    assert np.all(np.abs(off_s) + np.abs(off_w) >= 0.25 - 1e-9)
    assert rep.n_points > 0


def test_weight_14_is_uncertified():
    # S_14 = 0, so N vanishes identically and no dominance is possible
    rep = nv.scan_region(nv.RegionSpec("R", 14, grid_step=0.1))
    assert not rep.certified
    assert rep.exact_check["agrees"]


def test_estimate_c_short_range():
    rep = nv.estimate_C(1.0, 0.25, 100, 104, grid_step=0.1)
    assert rep.k0 == 100 and all(rep.certified.values())
    with pytest.raises(ParameterError):
        nv.estimate_C(1.0, 0.25, 101, 104)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("EISENKERNEL_THREADS", "3")
    assert nv.worker_count() == 3
    monkeypatch.setenv("EISENKERNEL_THREADS", "x")
    assert nv.worker_count() == 1


def test_estimate_c_threads_deterministic(monkeypatch):
    one = nv.estimate_C(1.0, 0.25, 100, 102, grid_step=0.1)
    monkeypatch.setenv("EISENKERNEL_THREADS", "2")
    two = nv.estimate_C(1.0, 0.25, 100, 102, grid_step=0.1)
    assert one.margins == two.margins and one.k0 == two.k0


@given(st.floats(0.05, 0.45), st.floats(-1, 1), st.floats(0.05, 0.45), st.floats(-1, 1), st.sampled_from([50, 100, 200]))
def test_theorem34_is_shifted_normalized_main(x, y, u, v, k):
    s, w = complex(x, y), complex(u, v)
    if abs(s - w) < 1e-6:
        return
    val = nv.theorem34_quantity(s, w, k)
    ref = complex(nv.normalized_main(s + (k - 1) / 2, w + (k - 1) / 2, k))
    assert abs(val.value - ref) <= 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("s,w", [(0.4 + 1j, 0.3 + 0.5j), (0.45 - 0.2j, 0.35 + 0.8j)])
def test_theorem34_third_fourth_terms_decrease(s, w):
    ks = (50, 100, 200, 400)
    third = [abs(nv.theorem34_quantity(s, w, k).terms[2]) for k in ks]
    fourth = [abs(nv.theorem34_quantity(s, w, k).terms[3]) for k in ks]
    assert all(b < a for a, b in zip(third, third[1:]))
    assert all(b < a for a, b in zip(fourth, fourth[1:]))


def test_theorem34_include_switches():
    v = nv.theorem34_quantity(0.4 + 1j, 0.3 + 0.5j, 100, include=(False, True, False))
    assert v.terms[1] == 0 and v.terms[3] == 0 and v.terms[2] != 0


def test_gamma_ratio_exponent_tends_to_2s_minus_1():
    s = 0.3 + 0.5j
    e = nv.gamma_ratio_exponent(s, 10 ** 6)
    assert abs(e - (2 * s.real - 1)) < 1e-2


def test_assumption_check():
    rep = nv.assumption_check(1.0, 0.6 + 0.5j, 0.05, [100, 200, 400])
    assert rep.consistent and rep.verdict in ("above", "below", "straddles")
    assert set(rep.per_k) == {100, 200, 400}
    with pytest.raises(PreconditionError):
        nv.assumption_check(0.0, 0.6 + 0.5j, 0.05, [100])
    with pytest.raises(PreconditionError):
        nv.assumption_check(1.0, 0.6, 0.05, [100])
    with pytest.raises(DomainError):
        nv.assumption_check(1.0, 0.6 + 0.5j, 0.8, [100])


def test_symmetry_orbit():
    orb = nv.symmetry_orbit(5.7 + 0.2j, 5.6 - 0.1j, 16)
    assert len(orb.points) == 8 and not orb.forced_zero
    # on the centre line at k = 2 mod 4 the reflection sign is -1 and fixes the point
    assert nv.symmetry_orbit(9.0, 8.7 + 0.3j, 18).forced_zero
    assert not nv.symmetry_orbit(8.0, 7.7 + 0.3j, 16).forced_zero


def test_symmetry_orbit_signs_match_spectral():
    k = 18
    s, w = 8.7 + 0.3j, 8.6 - 0.2j
    base = nv.spectral_normalized(np.array([s]), np.array([w]), k)[0, 0]
    raw = lambda a, b: (nv.spectral_normalized(np.array([a]), np.array([b]), k)[0, 0]  # noqa: E731
                        * np.exp(nv.log_gamma(k - a) + nv.log_gamma(k - b) + (a + b) * nv.LOG_TWO_PI)
                        * nv.riemann_zeta(1 + k - a - b))
    ref = raw(s, w)
    for a, b, sign in nv.symmetry_orbit(s, w, k).points:
        if not (-2 <= a.real <= k + 2 and -2 <= b.real <= k + 2):
            continue
        assert abs(raw(a, b) - sign * ref) <= 1e-8 * abs(ref)
    assert np.isfinite(base)


def test_scan_tilde_with_exact_check():
    rep = nv.scan_region(nv.RegionSpec("R_tilde", 40, grid_step=0.1))
    assert rep.certified and rep.exact_check["agrees"] and rep.exact_check["skipped"] == 0
    assert np.all(np.isfinite(rep.N))


def test_large_weight_main_term_dominates():
    # both real parts 0.4 left of the centre line, conjugate imaginary parts
    val = nv.normalized_expression(KernelPoint(99.6 + 0.5j, 99.6 - 0.5j, 200))
    assert abs(val.value - 1) < 0.5


def test_wider_delta_never_raises_k0():
    narrow = nv.estimate_C(1.0, 0.25, 12, 40, grid_step=0.1, exact_check=False)
    wide = nv.estimate_C(1.0, 0.4, 12, 40, grid_step=0.1, exact_check=False)
    assert narrow.k0 is not None and wide.k0 is not None and wide.k0 <= narrow.k0


def test_single_weight_range():
    rep = nv.estimate_C(1.0, 0.25, 300, 300, grid_step=0.1, exact_check=False)
    assert rep.k0 == 300
