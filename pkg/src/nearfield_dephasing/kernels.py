"""Fluctuation kernels of a half-space at height ``d``.

Wavevectors are measured in units of ``k0 = omega / c``: ``xi = k / k0`` and
``p = 2 k0 d``. The normal wavenumbers are ``u = sqrt(1 - xi^2)`` in vacuum
and ``v = sqrt(eps - xi^2)`` in the medium, both on the branch with a
non-negative imaginary part.

The reflected part is written ``F = G + Delta`` with ``G_{l,t} = u +- 1/u``.
``Delta`` is evaluated in a form free of cancellation, so both the near
ideal limit (``Delta -> 0``) and the evanescent side stay accurate.
The dimensionless densities

    h = G (1 - cos pu) - Re(exp(i p u) Delta)      (xi < 1)
    h = -exp(-p w) Re Delta,  w = sqrt(xi^2 - 1)    (xi > 1)

give ``-Im g = (2 pi / k0) h``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, K_B
from .errors import DomainError, SingularityError
from .materials import Material, is_ideal, permittivity

__all__ = [
    "IDEAL_EPS",
    "KernelPoint",
    "KernelValues",
    "eps_of",
    "branch_u",
    "branch_v",
    "reflection_deltas",
    "FG",
    "kernel_point",
    "pw_density",
    "pw_density_phi",
    "ew_density",
    "neg_im_g",
    "asymptotic_F",
    "coth_factor",
    "et_density",
]

# Sentinel standing for the |eps| = infinity mirror.
IDEAL_EPS = math.inf


def eps_of(m: Material, omega: float):
    """Permittivity, or :data:`IDEAL_EPS` for the perfect mirror."""
    if is_ideal(m):
        if not omega > 0:
            raise DomainError("omega must be positive")
        return IDEAL_EPS
    return permittivity(m, omega)


def _is_ideal_eps(eps) -> bool:
    return isinstance(eps, float) and math.isinf(eps)


def _is_vacuum_eps(eps) -> bool:
    return not _is_ideal_eps(eps) and complex(eps) == 1.0


def _upper_sqrt(w):
    """Square root with Im >= 0; real negative input maps to +i sqrt|w|."""
    r = np.sqrt(np.asarray(w, dtype=complex))
    return np.where(r.imag < 0, -r, r)


def branch_u(xi):
    """Vacuum normal wavenumber ``sqrt(1 - xi^2)`` with Im >= 0."""
    xi = np.asarray(xi, dtype=float)
    out = _upper_sqrt(1.0 - xi * xi)
    return out[()] if out.ndim == 0 else out


def branch_v(eps, xi):
    """Medium normal wavenumber ``sqrt(eps - xi^2)`` with Im >= 0.

    For real ``eps`` this is the limit Im eps -> 0+.
    """
    xi = np.asarray(xi, dtype=float)
    out = _upper_sqrt(complex(eps) - xi * xi)
    return out[()] if out.ndim == 0 else out


def _sum_term(u, v, xi2, eps):
    """``u v + xi^2`` evaluated without cancellation."""
    direct = u * v + xi2
    den = u * v - xi2
    alt = (eps - xi2 * (1.0 + eps)) / np.where(den == 0, 1.0, den)
    return np.where(np.abs(den) > np.abs(direct), alt, direct)


def reflection_deltas(eps, u, v, xi2):
    """Return ``Delta_l``, ``Delta_t`` and ``Delta_l - Delta_t``.

    ``Delta = F - G`` where ``F`` is the reflected part of the kernel. For
    the ideal mirror all three vanish.
    """
    if _is_ideal_eps(eps):
        z = np.zeros(np.broadcast(u, xi2).shape, dtype=complex)
        return z, z, z
    s1 = v + u
    s2 = v + eps * u
    dl = -2.0 / s1 - 2.0 * u * v / s2
    dt = 2.0 * xi2 / s2
    diff = -2.0 / s1 - 2.0 * _sum_term(u, v, xi2, eps) / s2
    return dl, dt, diff


def FG(eps, xi):
    """Kernel functions ``(F_l, F_t, G_l, G_t)`` at ``xi = k / k0``.

    Parameters
    ----------
    eps : complex or float
        Permittivity, or :data:`IDEAL_EPS` for the mirror (then ``F = G``).
    xi : float or array
        Must differ from 1, where ``G`` has a pole.

    Raises
    ------
    SingularityError
        If any ``xi`` equals 1.
    """
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 1.0):
        raise SingularityError("G has a pole at xi = 1")
    u = branch_u(xi)
    gl = u + 1.0 / u
    gt = u - 1.0 / u
    if _is_ideal_eps(eps):
        return gl, gt, gl, gt
    v = branch_v(eps, xi)
    dl, dt, _ = reflection_deltas(eps, u, v, xi * xi)
    return gl + dl, gt + dt, gl, gt


@dataclass(frozen=True)
class KernelPoint:
    """All intermediate quantities at one ``(xi, p)``."""

    xi: float
    p: float
    u: complex
    v: complex
    Fl: complex
    Ft: complex
    Gl: complex
    Gt: complex
    domain: str


def kernel_point(eps, xi: float, p: float) -> KernelPoint:
    """Bundle branch values and F/G at a single point (``xi != 1``)."""
    fl, ft, gl, gt = FG(eps, xi)
    v = complex("nan") if _is_ideal_eps(eps) else complex(branch_v(eps, xi))
    return KernelPoint(
        float(xi), float(p), complex(branch_u(xi)), v,
        complex(fl), complex(ft), complex(gl), complex(gt),
        "PW" if xi < 1 else "EW",
    )


def pw_density_phi(eps, phi, p, with_difference=False):
    """``u h_l`` and ``u h_t`` on the propagating side with ``xi = sin phi``.

    Multiplying by ``u = cos phi`` removes the integrable pole at ``xi = 1``
    so the results are smooth on ``[0, pi/2]``. With ``with_difference`` the
    value of ``u (h_l - h_t)`` is returned as a third array.
    """
    phi = np.asarray(phi, dtype=float)
    xi = np.sin(phi)
    u = np.cos(phi)
    if _is_vacuum_eps(eps):
        # F = 0: only the direct term u G survives.
        out = (u * u + 1.0, u * u - 1.0, np.full_like(u, 2.0))
        return out if with_difference else out[:2]
    one_minus_cos = 2.0 * np.sin(0.5 * p * u) ** 2
    uhl = (u * u + 1.0) * one_minus_cos
    uht = (u * u - 1.0) * one_minus_cos
    udiff = 2.0 * one_minus_cos
    if not _is_ideal_eps(eps):
        uc = u.astype(complex)
        v = _upper_sqrt(eps - xi * xi)
        dl, dt, diff = reflection_deltas(eps, uc, v, xi * xi)
        phase = np.exp(1j * p * u)
        uhl = uhl - u * (phase * dl).real
        uht = uht - u * (phase * dt).real
        udiff = udiff - u * (phase * diff).real
    return (uhl, uht, udiff) if with_difference else (uhl, uht)


def pw_density(eps, xi, p):
    """``h_l``, ``h_t`` for ``xi < 1``."""
    xi = np.asarray(xi, dtype=float)
    uhl, uht = pw_density_phi(eps, np.arcsin(xi), p)
    u = np.sqrt(1.0 - xi * xi)
    return uhl / u, uht / u


def ew_density(eps, w, p, with_difference=False):
    """``h_l``, ``h_t`` on the evanescent side, parametrised by ``w = sqrt(xi^2 - 1)``.

    With ``with_difference`` the accurately computed ``h_l - h_t`` is
    returned as a third value.
    """
    w = np.asarray(w, dtype=float)
    if _is_ideal_eps(eps) or _is_vacuum_eps(eps):
        z = np.zeros_like(w)
        return (z, z, z) if with_difference else (z, z)
    xi2 = 1.0 + w * w
    u = 1j * w
    v = _upper_sqrt(eps - xi2)
    dl, dt, diff = reflection_deltas(eps, u, v, xi2)
    env = np.exp(-p * w)
    hl = -env * dl.real
    ht = -env * dt.real
    if with_difference:
        return hl, ht, -env * diff.real
    return hl, ht


@dataclass(frozen=True)
class KernelValues:
    """``-Im g_l`` and ``-Im g_t`` (in cm) at one ``(omega, k, d)``."""

    neg_im_gl: float
    neg_im_gt: float
    domain: str


def neg_im_g(m: Material, omega: float, k: float, d: float) -> KernelValues:
    """Exact ``-Im g_{l,t}(omega, k)`` at height ``d`` above ``m``.

    ``k == omega / c`` is taken as the limit from the evanescent side.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    if not d >= 0:
        raise DomainError("d must be non-negative")
    eps = eps_of(m, omega)
    k0 = omega / C_LIGHT
    xi = k / k0
    p = 2.0 * k0 * d
    if xi < 1.0:
        hl, ht = pw_density(eps, xi, p)
        domain = "PW"
    else:
        hl, ht = ew_density(eps, math.sqrt(xi * xi - 1.0), p)
        domain = "EW"
    scale = 2.0 * math.pi / k0
    return KernelValues(float(scale * hl), float(scale * ht), domain)


def asymptotic_F(eps, xi, which: str):
    """Leading expansions of ``(F_l, F_t)`` far below or far above ``|eps|^(1/2)``.

    Parameters
    ----------
    which : {"below", "above"}
        ``below``: ``F_l = G_l - 4 eps^(-1/2)``, ``F_t = G_t (1 - 2/eps)``.
        ``above``: ``F = i r xi + i r^2 / (2 xi)`` with ``r = (eps-1)/(eps+1)``,
        identical for both polarisations.
    """
    xi = np.asarray(xi, dtype=float)
    if which == "below":
        u = branch_u(xi)
        gl, gt = u + 1.0 / u, u - 1.0 / u
        if _is_ideal_eps(eps):
            return gl, gt
        root = np.sqrt(complex(eps))
        return gl - 4.0 / root, gt * (1.0 - 2.0 / eps)
    if which == "above":
        if _is_ideal_eps(eps):
            raise DomainError("no region above the borderline for the ideal mirror")
        r = (eps - 1.0) / (eps + 1.0)
        f = 1j * r * xi + 1j * r * r / (2.0 * xi)
        return f, f
    raise DomainError("which must be 'below' or 'above'")


def coth_factor(omega: float, T: float, high_temperature: bool = False):
    """``coth(hbar omega / 2 k_B T)``; 1 at ``T = 0``.

    ``high_temperature`` replaces it by ``2 k_B T / (hbar omega)``.
    """
    if T < 0:
        raise DomainError("temperature must be non-negative")
    omega = np.asarray(omega, dtype=float)
    if T == 0:
        return np.ones_like(omega)[()]
    x = HBAR * omega / (2.0 * K_B * T)
    if high_temperature:
        return (1.0 / x)[()]
    return (1.0 / np.tanh(x))[()]


def et_density(m: Material, omega: float, k_vec, d: float, T: float) -> np.ndarray:
    """Spectral density of tangential field correlations ``(E_a E_b)_{omega k}``.

    Returns the 2x2 real tensor
    ``(2 hbar / (2 pi)^3) (omega/c)^2 coth(.) (-Im g_ab)`` with
    ``g_ab = g_t (k_a k_b / k^2 - delta_ab / 2) + delta_ab g_l / 2``.
    """
    if T < 0:
        raise DomainError("temperature must be non-negative")
    k_vec = np.asarray(k_vec, dtype=float)
    k = float(np.hypot(k_vec[0], k_vec[1]))
    vals = neg_im_g(m, omega, k, d)
    khat = k_vec / k
    eye = np.eye(2)
    tensor = vals.neg_im_gt * (np.outer(khat, khat) - 0.5 * eye) + 0.5 * vals.neg_im_gl * eye
    pref = 2.0 * HBAR / (2.0 * math.pi) ** 3 * (omega / C_LIGHT) ** 2 * coth_factor(omega, T)
    return pref * tensor
