"""Spectral density S(omega) of tangential field fluctuations at height d.

``S = S_p + S_e`` splits into propagating (``k < omega/c``) and evanescent
(``k > omega/c``) parts. Far from any surface ``S = (2/3) omega / c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR
from .errors import DivergenceError, DomainError, UnsupportedMaterialError
from .kernels import coth_factor, eps_of, ew_density, pw_density_phi
from .materials import Conductor, Dielectric, Material, Vacuum, is_ideal, surface_scales
from .numerics import QuadratureSpec, QuadResult, integrate_adaptive, integrate_semi_infinite

__all__ = [
    "SpectrumPart",
    "SpectrumResult",
    "AsymptoticValue",
    "SPECTRUM_SPEC",
    "S_p_quadrature",
    "S_e_quadrature",
    "spectral_density",
    "S_ideal_closed",
    "S_ideal_reduced",
    "S_asymptotic",
    "crossover_distance",
    "Et2",
    "ew_integrand",
]

SPECTRUM_SPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-300)

# Extra e-folds on top of the tail budget: the integrand grows like w^2
# above the second borderline before the exponential takes over.
_GROWTH_ALLOWANCE = 10.0


@dataclass(frozen=True)
class SpectrumPart:
    """One of ``S_p`` or ``S_e`` with its absolute error."""

    value: float
    error: float
    method: str


@dataclass(frozen=True)
class SpectrumResult:
    """Both parts of ``S(omega)`` in cm^-1."""

    S_p: float
    S_e: float
    err_p: float
    err_e: float
    method: str

    @property
    def total(self) -> float:
        return self.S_p + self.S_e


def _check(omega, d):
    if not (omega > 0 and math.isfinite(omega)):
        raise DomainError("omega must be positive")
    if not (d >= 0 and math.isfinite(d)):
        raise DomainError("d must be non-negative")


def _pw_reduced(eps, p, spec):
    """``(1/2) int_0^1 xi h_l dxi`` through ``xi = sin phi``."""

    def f(phi):
        return np.sin(phi) * pw_density_phi(eps, phi, p)[0]

    r = integrate_adaptive(f, 0.0, 0.5 * math.pi, spec)
    return 0.5 * r.value, 0.5 * r.error


def S_p_quadrature(m: Material, omega: float, d: float, spec: QuadratureSpec | None = None) -> SpectrumPart:
    """Propagating-wave part ``S_p`` by adaptive quadrature.

    Parameters
    ----------
    m : Material
    omega : float
        Angular frequency, s^-1.
    d : float
        Height above the surface, cm.
    spec : QuadratureSpec, optional

    Returns
    -------
    SpectrumPart
        Value and absolute error in cm^-1.
    """
    _check(omega, d)
    k0 = omega / C_LIGHT
    if isinstance(m, Vacuum):
        return SpectrumPart(2.0 * k0 / 3.0, 0.0, "closed")
    val, err = _pw_reduced(eps_of(m, omega), 2.0 * k0 * d, spec or SPECTRUM_SPEC)
    return SpectrumPart(k0 * val, k0 * err, "quadrature")


def ew_integrand(eps, p):
    """``w h_l(w)``, the evanescent integrand in the variable ``w = sqrt(xi^2 - 1)``."""

    def f(w):
        return w * ew_density(eps, w, p)[0]

    return f


def _ew_breakpoints(eps, p, upper):
    pts = [math.sqrt(abs(eps))]
    if p > 0:
        pts.append(1.0 / p)
    pts += [10.0 ** e for e in range(-2, 40)]
    return sorted(x for x in pts if 0 < x < upper)


def _ew_reduced(eps, p, spec):
    """``(1/2) int_0^inf w h_l dw`` for a lossy medium (``p > 0``)."""
    f = ew_integrand(eps, p)
    scale = 1.0 / p
    upper = (spec.tail_exponent_budget + _GROWTH_ALLOWANCE) * scale
    r = integrate_semi_infinite(f, 0.0, scale, spec, _ew_breakpoints(eps, p, upper), _GROWTH_ALLOWANCE)
    return 0.5 * r.value, 0.5 * r.error


def _ew_reduced_dielectric(n, p, spec):
    """Evanescent part for a lossless dielectric: support is ``1 < xi < n``.

    ``w = w_n sin(theta)`` with ``w_n = sqrt(n^2 - 1)`` removes the square-root
    edge at ``xi = n``.
    """
    eps = complex(n * n, 0.0)
    wn = math.sqrt(n * n - 1.0)

    def f(theta):
        w = wn * np.sin(theta)
        return wn * wn * np.sin(theta) * np.cos(theta) * ew_density(eps, w, p)[0]

    pts = [math.asin(min(1.0, x / wn)) for x in (1.0 / p if p > 0 else 0.0, 1.0) if 0 < x < wn]
    r = integrate_adaptive(f, 0.0, 0.5 * math.pi, spec, pts)
    return 0.5 * r.value, 0.5 * r.error


def S_e_quadrature(m: Material, omega: float, d: float, spec: QuadratureSpec | None = None) -> SpectrumPart:
    """Evanescent-wave part ``S_e`` by adaptive quadrature.

    Raises
    ------
    DivergenceError
        For a conductor at ``d = 0``.
    """
    _check(omega, d)
    spec = spec or SPECTRUM_SPEC
    k0 = omega / C_LIGHT
    p = 2.0 * k0 * d
    if isinstance(m, Vacuum) or is_ideal(m):
        return SpectrumPart(0.0, 0.0, "closed")
    if isinstance(m, Dielectric):
        val, err = _ew_reduced_dielectric(m.n, p, spec)
    else:
        if d == 0:
            raise DivergenceError("evanescent spectral density diverges at d = 0 for a conductor")
        val, err = _ew_reduced(eps_of(m, omega), p, spec)
    return SpectrumPart(k0 * val, k0 * err, "quadrature")


def spectral_density(m: Material, omega: float, d: float, spec: QuadratureSpec | None = None) -> SpectrumResult:
    """``S_p`` and ``S_e`` together; the mirror uses its closed form."""
    if is_ideal(m):
        return SpectrumResult(S_ideal_closed(omega, d), 0.0, 0.0, 0.0, "closed")
    sp = S_p_quadrature(m, omega, d, spec)
    se = S_e_quadrature(m, omega, d, spec)
    method = "closed" if sp.method == se.method == "closed" else "quadrature"
    return SpectrumResult(sp.value, se.value, sp.error, se.error, method)


def _ideal_series_coeffs(n_terms=12):
    """Taylor coefficients ``c_j`` of the reduced mirror density in ``p^(2j)``."""
    f = math.factorial
    out = []
    for j in range(1, n_terms + 1):
        s = (-1) ** j
        out.append(s / f(2 * j + 2) - s / f(2 * j + 1) - s / f(2 * j + 3))
    return np.array(out)


_IDEAL_SERIES = _ideal_series_coeffs()
_SERIES_SWITCH = 0.5


def S_ideal_reduced(p):
    """``S / k0`` above a perfect mirror as a function of ``p = 2 k0 d``.

    ``2/3 - cos p / p^2 - (sin p / p)(1 - 1/p^2)``, with a Taylor series for
    small ``p`` where the closed form cancels catastrophically.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("p must be non-negative")
    small = p < _SERIES_SWITCH
    ps = np.where(small, p, 1.0)
    p2 = ps * ps
    series = np.polyval(_IDEAL_SERIES[::-1], p2) * p2
    pl = np.where(small, 1.0, p)
    closed = 2.0 / 3.0 - np.cos(pl) / pl**2 - np.sin(pl) / pl * (1.0 - 1.0 / pl**2)
    out = np.where(small, series, closed)
    return out[()] if out.ndim == 0 else out


def S_ideal_closed(omega: float, d: float) -> float:
    """Closed-form ``S(omega)`` above a perfect mirror, cm^-1."""
    _check(omega, d)
    k0 = omega / C_LIGHT
    return float(k0 * S_ideal_reduced(2.0 * k0 * d))


@dataclass(frozen=True)
class AsymptoticValue:
    """Near-field estimate of ``S_e`` and the branch that produced it."""

    value: float
    tag: str


def S_asymptotic(m: Material, omega: float, d: float) -> AsymptoticValue:
    """Piecewise near-field form of ``S_e``.

    Dielectric: ``(2/3) k0 n`` close to the surface, ``1 / (2 k0 n d^2)``
    beyond the in-medium wavelength. Conductor: ``delta^2 / (8 d^3)`` inside
    the skin depth, ``delta / (4 d^2)`` outside. Each pair switches where its
    two pieces are equal, so the result is continuous.
    """
    _check(omega, d)
    k0 = omega / C_LIGHT
    if isinstance(m, Dielectric):
        lam_n = 1.0 / (k0 * m.n)
        if d <= 0.5 * math.sqrt(3.0) * lam_n:
            return AsymptoticValue(2.0 * k0 * m.n / 3.0, "dielectric-near")
        return AsymptoticValue(1.0 / (2.0 * k0 * m.n * d * d), "dielectric-far")
    if isinstance(m, Conductor):
        delta = surface_scales(m.sigma, omega).delta
        if d == 0:
            return AsymptoticValue(math.inf, "conductor-skin")
        if d <= 0.5 * delta:
            return AsymptoticValue(delta**2 / (8.0 * d**3), "conductor-skin")
        return AsymptoticValue(delta / (4.0 * d * d), "conductor-between")
    raise UnsupportedMaterialError("near-field asymptotics need a dielectric or a conductor")


def crossover_distance(m: Material, omega: float) -> float:
    """Distance below which ``S_e`` exceeds the far-field value, cm.

    ``(c/omega) zeta^(1/4)`` for a conductor and ``(c/omega) n^(-1/4)`` for a
    dielectric; order-one factors are set to one.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    lam = C_LIGHT / omega
    if isinstance(m, Dielectric):
        return lam * m.n ** -0.25
    if isinstance(m, Conductor):
        return lam * surface_scales(m.sigma, omega).zeta ** 0.25
    raise UnsupportedMaterialError("no near-field crossover for vacuum or the ideal mirror")


def Et2(
    m: Material,
    omega: float,
    d: float,
    T: float,
    spec: QuadratureSpec | None = None,
    high_temperature: bool = False,
) -> QuadResult:
    """Spectral amplitude ``(hbar/pi)(omega/c)^2 coth(hbar omega / 2 k_B T) S``.

    Returns a :class:`QuadResult` carrying the propagated error.
    """
    s = spectral_density(m, omega, d, spec)
    pref = HBAR / math.pi * (omega / C_LIGHT) ** 2 * float(coth_factor(omega, T, high_temperature))
    return QuadResult(pref * s.total, pref * (s.err_p + s.err_e))
