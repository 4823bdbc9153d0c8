"""Material models for the half-space below the beams.

Every model exposes a complex permittivity ``eps(omega)``. The perfect
mirror is a separate variant: it has no finite permittivity and all
downstream code branches on :func:`is_ideal` instead of doing arithmetic
with a huge number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

from .constants import C_LIGHT, SIGMA_SI_TO_CGS
from .errors import DomainError

__all__ = [
    "Vacuum",
    "IdealMirror",
    "Dielectric",
    "Conductor",
    "Material",
    "SurfaceScales",
    "Borderlines",
    "IDEAL",
    "is_ideal",
    "permittivity",
    "surface_scales",
    "borderlines",
    "material_from_dict",
    "material_to_dict",
]


@dataclass(frozen=True)
class Vacuum:
    """Empty half-space, eps = 1."""

    name: str = field(default="vacuum", init=False)


@dataclass(frozen=True)
class IdealMirror:
    """Perfect conductor, the |eps| -> infinity limit."""

    name: str = field(default="ideal", init=False)


@dataclass(frozen=True)
class Dielectric:
    """Lossless dielectric with real refractive index ``n > 1``."""

    n: float
    name: str = field(default="dielectric", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n > 1.0):
            raise DomainError(f"dielectric needs n > 1, got {self.n!r}")


@dataclass(frozen=True)
class Conductor:
    """Ohmic conductor, eps = eps0 + 4 pi i sigma / omega.

    Parameters
    ----------
    sigma : float
        Static conductivity in Gaussian units (s^-1).
    eps0 : float, optional
        Real background permittivity, at least 1.
    """

    sigma: float
    eps0: float = 1.0
    name: str = field(default="conductor", init=False)

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise DomainError(f"conductor needs sigma > 0, got {self.sigma!r}")
        if not (math.isfinite(self.eps0) and self.eps0 >= 1.0):
            raise DomainError(f"conductor needs eps0 >= 1, got {self.eps0!r}")

    @classmethod
    def from_si(cls, sigma_si: float, eps0: float = 1.0) -> "Conductor":
        """Build from a conductivity given in (Ohm cm)^-1."""
        return cls(sigma=sigma_si * SIGMA_SI_TO_CGS, eps0=eps0)


Material = Union[Vacuum, IdealMirror, Dielectric, Conductor]

IDEAL = IdealMirror()


def is_ideal(m) -> bool:
    """True for the perfect-mirror variant, which has no finite eps."""
    return isinstance(m, IdealMirror)


def _check_omega(omega):
    if not (math.isfinite(omega) and omega > 0.0):
        raise DomainError(f"omega must be positive and finite, got {omega!r}")


def permittivity(m: Material, omega: float) -> complex:
    """Complex permittivity at angular frequency ``omega``.

    Raises
    ------
    DomainError
        For ``omega <= 0`` or for the ideal mirror, whose permittivity is
        infinite and must be handled by an explicit branch.
    """
    _check_omega(omega)
    if isinstance(m, Vacuum):
        return complex(1.0, 0.0)
    if isinstance(m, Dielectric):
        return complex(m.n * m.n, 0.0)
    if isinstance(m, Conductor):
        return complex(m.eps0, 4.0 * math.pi * m.sigma / omega)
    if isinstance(m, IdealMirror):
        raise DomainError("ideal mirror has infinite permittivity; branch on is_ideal()")
    raise TypeError(f"unknown material {m!r}")


@dataclass(frozen=True)
class SurfaceScales:
    """Surface impedance, skin depth and second borderline of a conductor."""

    zeta: float
    delta: float
    k_border2: float
    good_conductor: bool


def surface_scales(sigma: float, omega: float) -> SurfaceScales:
    """Surface impedance ``(omega / 8 pi sigma)^(1/2)`` and related scales.

    ``good_conductor`` is False when ``omega`` is not small compared with
    ``4 pi sigma``; the formulas are then only indicative.
    """
    _check_omega(omega)
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise DomainError(f"sigma must be positive, got {sigma!r}")
    zeta = math.sqrt(omega / (8.0 * math.pi * sigma))
    delta = 2.0 * zeta * C_LIGHT / omega
    return SurfaceScales(
        zeta=zeta,
        delta=delta,
        k_border2=math.sqrt(2.0) / delta,
        good_conductor=omega < 0.1 * 4.0 * math.pi * sigma,
    )


@dataclass(frozen=True)
class Borderlines:
    """Light line ``k0 = omega / c`` and the in-medium line ``k2``."""

    k0: float
    k2: float


def borderlines(m: Material, omega: float) -> Borderlines:
    """Wavenumbers of the two borderlines; ``k2`` is infinite for the mirror."""
    _check_omega(omega)
    k0 = omega / C_LIGHT
    if is_ideal(m):
        return Borderlines(k0, math.inf)
    return Borderlines(k0, k0 * math.sqrt(abs(permittivity(m, omega))))


def material_from_dict(spec: dict) -> Material:
    """Parse a JSON-style material description.

    Accepted forms: ``{"kind": "vacuum"}``, ``{"kind": "ideal"}``,
    ``{"kind": "dielectric", "n": 10}``, ``{"kind": "conductor",
    "sigma": 5e17}`` or ``{"kind": "conductor", "sigma_si": 1.0}`` where
    ``sigma_si`` is in (Ohm cm)^-1.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("material needs a 'kind' field")
    kind = str(spec["kind"]).lower()
    if kind == "vacuum":
        return Vacuum()
    if kind in ("ideal", "ideal_mirror", "mirror"):
        return IDEAL
    if kind == "dielectric":
        return Dielectric(float(spec["n"]))
    if kind == "conductor":
        eps0 = float(spec.get("eps0", 1.0))
        if "sigma_si" in spec:
            if "sigma" in spec:
                raise DomainError("give either sigma or sigma_si, not both")
            return Conductor.from_si(float(spec["sigma_si"]), eps0)
        return Conductor(float(spec["sigma"]), eps0)
    raise DomainError(f"unknown material kind {kind!r}")


def material_to_dict(m: Material) -> dict:
    """Inverse of :func:`material_from_dict` (Gaussian units)."""
    if isinstance(m, Dielectric):
        return {"kind": "dielectric", "n": m.n}
    if isinstance(m, Conductor):
        return {"kind": "conductor", "sigma": m.sigma, "eps0": m.eps0}
    return {"kind": m.name}
