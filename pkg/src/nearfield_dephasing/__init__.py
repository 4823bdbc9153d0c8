"""Dephasing of two-beam electron interference by thermal fields near a surface.

Modules
-------
materials
    Half-space media and their surface scales.
kernels
    Fluctuation kernels ``-Im g_{l,t}`` at a given height.
spectra
    Spectral density ``S(omega)`` and its closed and asymptotic forms.
beams
    Beam geometry and the shape functions ``Psi_1``, ``Psi_2``.
dephasing
    The exponent ``K``: full, dipole and asymptotic evaluations, regimes.
numerics
    Deterministic adaptive quadrature.
"""

from .beams import BeamPair, J_moment, radiation_spectrum
from .dephasing import (
    DephasingResult,
    Scenario,
    K_asymptotic,
    K_dipole,
    K_free,
    K_full,
    classify_regime,
    crossover_d,
    enhancement,
)
from .errors import (
    DivergenceError,
    DomainError,
    NearFieldError,
    QuadratureError,
    ResolutionError,
    SingularityError,
    UnsupportedMaterialError,
)
from .materials import IDEAL, Conductor, Dielectric, IdealMirror, Vacuum
from .numerics import QuadratureSpec
from .spectra import S_asymptotic, S_ideal_closed, spectral_density

__version__ = "0.1.0"

__all__ = [
    "BeamPair", "J_moment", "radiation_spectrum",
    "DephasingResult", "Scenario", "K_asymptotic", "K_dipole", "K_free", "K_full",
    "classify_regime", "crossover_d", "enhancement",
    "DivergenceError", "DomainError", "NearFieldError", "QuadratureError",
    "ResolutionError", "SingularityError", "UnsupportedMaterialError",
    "IDEAL", "Conductor", "Dielectric", "IdealMirror", "Vacuum",
    "QuadratureSpec", "S_asymptotic", "S_ideal_closed", "spectral_density",
]
