import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nearfield_dephasing.constants import C_LIGHT
from nearfield_dephasing.errors import DomainError, SingularityError
from nearfield_dephasing.kernels import (
    FG,
    IDEAL_EPS,
    asymptotic_F,
    branch_u,
    branch_v,
    coth_factor,
    et_density,
    ew_density,
    kernel_point,
    neg_im_g,
    pw_density,
)
from nearfield_dephasing.materials import IDEAL, Conductor, Dielectric, Vacuum, surface_scales

COPPER = Conductor(5e17)
W_CU = 3.33e8


def test_branch_u_examples():
    assert branch_u(0.0) == 1
    assert branch_u(math.sqrt(2)) == pytest.approx(1j, abs=1e-15)
    assert branch_u(0.6) == pytest.approx(0.8, abs=1e-15)
    assert branch_u(1.0) == 0


def test_branch_v_examples():
    assert branch_v(100, 6.0) == pytest.approx(8.0)
    assert branch_v(100, math.sqrt(101)) == pytest.approx(1j, abs=1e-12)
    assert branch_v(2e10j, 1.0) == pytest.approx((1 + 1j) * 1e5, rel=1e-9)


eps_strategy = st.builds(complex, st.floats(-1e3, 1e6), st.floats(0, 1e12))


@given(st.floats(0, 10), eps_strategy)
def test_branch_imag_nonnegative(xi, eps):
    assert branch_u(xi).imag >= 0
    assert branch_v(eps, xi).imag >= 0


def test_fg_ideal():
    fl, ft, gl, gt = FG(IDEAL_EPS, 0.6)
    assert (fl, ft) == (gl, gt)
    assert gl == pytest.approx(2.05) and gt == pytest.approx(-0.45)


def test_fg_small_xi():
    _, _, gl, gt = FG(100.0, 1e-9)
    assert gl == pytest.approx(2.0) and gt == pytest.approx(0.0, abs=1e-15)


def test_fg_pole():
    with pytest.raises(SingularityError):
        FG(100.0, 1.0)


def _diel_closed(eps, xi, sign):
    return -2 / (eps - 1) * math.sqrt(eps - xi**2) * (eps * (xi**2 - 1) / ((eps + 1) * xi**2 - eps) + sign)


@pytest.mark.parametrize("xi", [1.5, 2.0, 5.0, 9.5])
def test_fg_dielectric_evanescent(xi):
    fl, ft, _, _ = FG(100.0, xi)
    assert fl.real == pytest.approx(_diel_closed(100.0, xi, +1), rel=1e-12)
    assert ft.real == pytest.approx(_diel_closed(100.0, xi, -1), rel=1e-12)


def test_kernel_point_domain():
    assert kernel_point(100.0, 0.5, 1.0).domain == "PW"
    assert kernel_point(100.0, 2.0, 1.0).domain == "EW"


# -Im g (cm) from an independent 40-digit evaluation of the printed F formula.
COPPER_ORACLE = [
    (0.3, 0.011648022468317742, -1.1984006911658106e-8),
    (0.99, 0.011647577881764139, -1.9315306552105203e-8),
    (2.0, 0.011647003917636622, 1.3846328868337666e-7),
    (1000.0, 0.011333281234705547, 5.8641208353199979e-5),
    (1e6, 1.3485817847111546e-11, 1.348461779084704e-11),
]
DIELECTRIC_ORACLE = [
    (0.6, 227.94802263864421, -5.0329695773099429),
    (2.0, 242.68653476193969, -1.6071955944499318),
    (5.0, 208.11318578618488, -1.0783066621045849),
]


@pytest.mark.parametrize("xi,gl,gt", COPPER_ORACLE)
def test_neg_im_g_copper_oracle(xi, gl, gt):
    v = neg_im_g(COPPER, W_CU, xi * W_CU / C_LIGHT, 1e-3)
    assert v.neg_im_gl == pytest.approx(gl, rel=1e-9)
    assert v.neg_im_gt == pytest.approx(gt, rel=1e-7)


@pytest.mark.parametrize("xi,gl,gt", DIELECTRIC_ORACLE)
def test_neg_im_g_dielectric_oracle(xi, gl, gt):
    v = neg_im_g(Dielectric(10.0), 3e8, xi * 3e8 / C_LIGHT, 0.5)
    assert v.neg_im_gl == pytest.approx(gl, rel=1e-12)
    assert v.neg_im_gt == pytest.approx(gt, rel=1e-12)


def test_vacuum_kernel():
    k0 = 1e9 / C_LIGHT
    v = neg_im_g(Vacuum(), 1e9, 0.6 * k0, 3.0)
    assert v.neg_im_gl == pytest.approx(2 * math.pi / k0 * 2.05)
    assert v.neg_im_gt == pytest.approx(2 * math.pi / k0 * -0.45)
    e = neg_im_g(Vacuum(), 1e9, 2 * k0, 3.0)
    assert e.neg_im_gl == 0 and e.neg_im_gt == 0 and e.domain == "EW"


@pytest.mark.parametrize("xi", [0.1, 0.5, 0.99])
def test_ideal_at_contact_vanishes(xi):
    v = neg_im_g(IDEAL, 1e9, xi * 1e9 / C_LIGHT, 0.0)
    assert v.neg_im_gl == 0 and v.neg_im_gt == 0


def test_light_line_is_finite():
    v = neg_im_g(COPPER, W_CU, W_CU / C_LIGHT, 1e-3)
    assert v.domain == "EW" and math.isfinite(v.neg_im_gl)


def test_conductor_between_borderlines():
    s = surface_scales(5e17, W_CU)
    k0 = W_CU / C_LIGHT
    d = 1e-3
    xi_lo, xi_hi = 30.0, s.k_border2 / (30 * k0)
    for xi in np.geomspace(xi_lo, xi_hi, 5):
        k = xi * k0
        v = neg_im_g(COPPER, W_CU, k, d)
        assert v.neg_im_gl == pytest.approx(8 * math.pi / k0 * s.zeta * math.exp(-2 * k * d), rel=0.05)
        assert v.neg_im_gt == pytest.approx(8 * math.pi / k0**2 * s.zeta**2 * k * math.exp(-2 * k * d), rel=0.05)


def test_conductor_above_borderline():
    s = surface_scales(5e17, W_CU)
    k0 = W_CU / C_LIGHT
    d = 1e-5
    for f in (30, 100, 1000):
        k = f * s.k_border2
        v = neg_im_g(COPPER, W_CU, k, d)
        ref = 8 * math.pi / k0**2 * s.zeta**2 * k * math.exp(-2 * k * d)
        assert v.neg_im_gl == pytest.approx(ref, rel=0.05)
        assert v.neg_im_gt == pytest.approx(ref, rel=0.05)


def test_asymptotic_below():
    xi = 0.5
    fl, ft, _, _ = FG(100.0, xi)
    al, at = asymptotic_F(100.0, xi, "below")
    assert abs(fl - al) / abs(fl) < 3e-2
    assert abs(ft - at) / abs(ft) < 3e-2
    gl, gt = asymptotic_F(IDEAL_EPS, xi, "below")
    assert (gl, gt) == pytest.approx((FG(IDEAL_EPS, xi)[2], FG(IDEAL_EPS, xi)[3]))


def test_asymptotic_above_conductor():
    eps = complex(1.0, 4 * math.pi * 5e17 / W_CU)
    zeta = surface_scales(5e17, W_CU).zeta
    xi = 1e3 * abs(eps) ** 0.5
    al, at = asymptotic_F(eps, xi, "above")
    assert al.real == pytest.approx(-4 * zeta**2 * xi, rel=1e-6)
    fl, ft, _, _ = FG(eps, xi)
    assert fl.real == pytest.approx(-4 * zeta**2 * xi, rel=1e-2)
    assert ft.real == pytest.approx(-4 * zeta**2 * xi, rel=1e-2)


def test_asymptotic_bad_branch():
    with pytest.raises(DomainError):
        asymptotic_F(100.0, 2.0, "sideways")
    with pytest.raises(DomainError):
        asymptotic_F(IDEAL_EPS, 2.0, "above")


@pytest.mark.parametrize("eps", [IDEAL_EPS, 1.0 + 0j])
def test_ew_vanishes_vacuum_and_ideal(eps):
    assert np.all(ew_density(eps, np.logspace(-3, 3, 20), 0.3)[0] == 0)


def test_ew_vanishes_above_n():
    n = 4.0
    w = np.sqrt(np.linspace(n * n + 1e-9, 1e3, 40) - 1)
    hl, ht = ew_density(complex(n * n), w, 0.2)
    assert np.all(hl == 0) and np.all(ht == 0)


def test_pw_density_far_limit_averages_to_vacuum():
    # the reflected term oscillates away: at large p, h -> G on average
    xi = np.linspace(0.05, 0.9, 400)
    hl, _ = pw_density(100.0, xi, 5e4)
    u = np.sqrt(1 - xi**2)
    assert np.mean(hl) == pytest.approx(np.mean(u + 1 / u), rel=5e-2)


materials = st.sampled_from([Vacuum(), IDEAL, Dielectric(1.5), Dielectric(30.0), COPPER, Conductor(1e12)])


@given(materials, st.floats(1e6, 1e12), st.floats(1e-3, 1e3), st.floats(0, 1e2))
def test_tensor_positive_semidefinite(m, omega, xi, d):
    k0 = omega / C_LIGHT
    if isinstance(m, Conductor) and d == 0 and xi > 1:
        d = 1e-6
    if xi == 1.0:
        xi = 1.0001
    v = neg_im_g(m, omega, xi * k0, d)
    scale = max(abs(v.neg_im_gl), abs(v.neg_im_gt), 1e-300)
    assert v.neg_im_gl + v.neg_im_gt >= -1e-10 * scale
    assert v.neg_im_gl - v.neg_im_gt >= -1e-10 * scale


@given(st.floats(0, 2 * math.pi))
def test_et_density_rotates_covariantly(angle):
    k = 1e-2
    base = et_density(COPPER, W_CU, [k, 0.0], 1e-2, 300.0)
    rot = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
    turned = et_density(COPPER, W_CU, rot @ [k, 0.0], 1e-2, 300.0)
    assert np.allclose(turned, rot @ base @ rot.T, rtol=1e-10, atol=1e-12 * np.abs(base).max())


def test_et_density_trace_only_longitudinal():
    k0 = 1e9 / C_LIGHT
    t = et_density(Dielectric(3.0), 1e9, [0.3 * k0, 0.4 * k0], 1.0, 0.0)
    v = neg_im_g(Dielectric(3.0), 1e9, 0.5 * k0, 1.0)
    pref = 2 * 1.054571817e-27 / (2 * math.pi) ** 3 * k0**2
    assert np.trace(t) == pytest.approx(pref * v.neg_im_gl, rel=1e-12)


def test_et_density_vacuum_evanescent_zero():
    k0 = 1e9 / C_LIGHT
    assert np.all(et_density(Vacuum(), 1e9, [2 * k0, 0.0], 1.0, 300.0) == 0)


def test_et_density_negative_temperature():
    with pytest.raises(DomainError):
        et_density(COPPER, 1e9, [1.0, 0.0], 1.0, -1.0)


def test_coth_factor_limits():
    assert coth_factor(1e9, 0.0) == 1.0
    x = 1.054571817e-27 * 1e9 / (2 * 1.380649e-16 * 300)
    assert coth_factor(1e9, 300.0) == pytest.approx(1 / math.tanh(x), rel=1e-14)
    assert coth_factor(1e9, 600.0, high_temperature=True) == pytest.approx(2 * coth_factor(1e9, 300.0, True))
