import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nearfield_dephasing.constants import C_LIGHT, SIGMA_SI_TO_CGS
from nearfield_dephasing.errors import DomainError
from nearfield_dephasing.materials import (
    IDEAL,
    Conductor,
    Dielectric,
    Vacuum,
    borderlines,
    material_from_dict,
    material_to_dict,
    permittivity,
    surface_scales,
)

COPPER = Conductor(5e17)
OMEGA = 3.33e8

omegas = st.floats(1e3, 1e16)
sigmas = st.floats(1e6, 1e20)


def test_permittivity_vacuum_and_dielectric():
    assert permittivity(Vacuum(), 1e9) == 1 + 0j
    assert permittivity(Dielectric(10.0), 1e9) == 100 + 0j


def test_permittivity_copper():
    eps = permittivity(COPPER, OMEGA)
    assert eps.real == 1.0
    assert eps.imag == pytest.approx(1.886e10, rel=1e-3)


@pytest.mark.parametrize("omega", [0.0, -1.0, math.inf, math.nan])
def test_permittivity_rejects_bad_omega(omega):
    with pytest.raises(DomainError):
        permittivity(COPPER, omega)


def test_ideal_has_no_finite_permittivity():
    with pytest.raises(DomainError):
        permittivity(IDEAL, 1e9)


@pytest.mark.parametrize("bad", [1.0, 0.5, math.nan, math.inf])
def test_dielectric_validation(bad):
    with pytest.raises(DomainError):
        Dielectric(bad)


def test_conductor_validation():
    with pytest.raises(DomainError):
        Conductor(0.0)
    with pytest.raises(DomainError):
        Conductor(1.0, eps0=0.5)


def test_surface_scales_copper():
    s = surface_scales(5e17, OMEGA)
    assert s.zeta == pytest.approx(5.15e-6, rel=2e-3)
    assert s.delta == pytest.approx(9.3e-4, rel=5e-3)
    assert s.delta == pytest.approx(2 * s.zeta * C_LIGHT / OMEGA, rel=1e-15)
    assert s.k_border2 == pytest.approx(1.52e3, rel=5e-3)
    assert s.good_conductor


def test_surface_scales_silicon():
    s = surface_scales(9e11, OMEGA)
    assert s.zeta == pytest.approx(math.sqrt(OMEGA / (8 * math.pi * 9e11)), rel=1e-14)
    assert s.zeta == pytest.approx(3.84e-3, rel=1e-2)


def test_surface_scales_rejects_bad_sigma():
    with pytest.raises(DomainError):
        surface_scales(-1.0, 1.0)


def test_borderlines():
    assert borderlines(Vacuum(), 1e9).k2 == pytest.approx(1e9 / C_LIGHT)
    b = borderlines(Dielectric(10.0), 3e8)
    assert b.k0 == pytest.approx(1.0007e-2, rel=1e-4)
    assert b.k2 == pytest.approx(10 * b.k0, rel=1e-14)
    assert math.isinf(borderlines(IDEAL, 1e9).k2)
    assert borderlines(COPPER, OMEGA).k2 == pytest.approx(surface_scales(5e17, OMEGA).k_border2, rel=1e-6)


@given(omegas, sigmas)
def test_conductor_passive(omega, sigma):
    assert permittivity(Conductor(sigma), omega).imag >= 0


@given(omegas, sigmas)
def test_k2_is_sqrt_abs_eps(omega, sigma):
    m = Conductor(sigma)
    b = borderlines(m, omega)
    assert b.k2 / b.k0 == pytest.approx(abs(permittivity(m, omega)) ** 0.5, rel=1e-12)


@given(omegas, sigmas)
def test_zeta_decreases_with_sigma(omega, sigma):
    assert surface_scales(2 * sigma, omega).zeta < surface_scales(sigma, omega).zeta


def test_si_conversion():
    assert Conductor.from_si(1.0).sigma == SIGMA_SI_TO_CGS
    assert material_from_dict({"kind": "conductor", "sigma_si": 2.0}).sigma == 2 * SIGMA_SI_TO_CGS


@pytest.mark.parametrize("m", [Vacuum(), IDEAL, Dielectric(3.0), Conductor(1e15, 2.0)])
def test_dict_round_trip(m):
    assert material_from_dict(material_to_dict(m)) == m


@pytest.mark.parametrize("bad", [{}, {"kind": "plasma"}, {"kind": "conductor", "sigma": 1, "sigma_si": 1}])
def test_dict_rejects(bad):
    with pytest.raises(DomainError):
        material_from_dict(bad)
