"""Two-path electron interferometer and its radiation shape functions.

The canonical model has one time scale ``tau`` and one length ``L``. Both
paths share the longitudinal motion

    v_x(t) = (L / tau) exp(-pi s^2),   s = t / tau,

so ``X(t) = L (1 + erf(sqrt(pi) s)) / 2`` runs from 0 to L. The paths split
transversely as ``y_{1,2}(t) = +-(a/2) exp(-pi s^2)``, which closes the loop.

The shape functions are angle averages of the difference amplitude
``l = l_1 - l_2`` at ``omega = 2 z / tau`` and ``k = y / L``:

    Psi_2(z, y) = <|l|^2> / (theta L^2),  Psi_1(z, y) = <|k.l|^2 / k^2> / (theta L^2)

with ``theta = (a / L)^2``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.special import erf

from .constants import C_LIGHT
from .errors import DomainError, ResolutionError
from .numerics import QuadratureSpec, integrate_adaptive

__all__ = [
    "BeamPair",
    "Path",
    "RadiationSpectrum",
    "N_TIME",
    "S_MAX",
    "N_ANGLES",
    "canonical_trajectories",
    "radiation_amplitude",
    "psi_functions",
    "dipole_psi2",
    "radiation_spectrum",
    "J_moment",
]

N_TIME = 4096
S_MAX = 5.0
N_ANGLES = 64

# Integration rectangle of the shape functions in (z, y).
Z_MAX = 6.0
Y_MAX = 5.0
_NZ = 97
_NY = 81

# Largest phase advance per time step accepted by the trapezoid rule.
_MAX_PHASE_STEP = 1.0


@dataclass(frozen=True)
class BeamPair:
    """Geometry and timing of the two beams.

    Parameters
    ----------
    L : float
        Path length, cm.
    tau : float
        Time of flight, s.
    a : float
        Maximal beam separation, cm.
    d : float
        Height of the beams above the surface, cm.
    """

    L: float
    tau: float
    a: float
    d: float = 0.0

    def __post_init__(self):
        for name in ("L", "tau", "a"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be positive, got {val!r}")
        if not (math.isfinite(self.d) and self.d >= 0):
            raise DomainError(f"d must be non-negative, got {self.d!r}")
        if self.a / self.L > 0.1:
            warnings.warn("a/L > 0.1: the small-separation picture is stretched", stacklevel=3)

    @classmethod
    def from_velocity(cls, L: float, beta: float, a: float, d: float = 0.0) -> "BeamPair":
        """Build from ``beta = v / c`` instead of the flight time."""
        if not (0 < beta < 1):
            raise DomainError("beta must lie in (0, 1)")
        return cls(L=L, tau=L / (beta * C_LIGHT), a=a, d=d)

    @property
    def v(self) -> float:
        return self.L / self.tau

    @property
    def beta(self) -> float:
        return self.v / C_LIGHT

    @property
    def theta(self) -> float:
        return (self.a / self.L) ** 2

    @property
    def lam(self) -> float:
        """Wavelength scale ``c tau`` of the typical emitted photon."""
        return C_LIGHT * self.tau

    def at_height(self, d: float) -> "BeamPair":
        return BeamPair(self.L, self.tau, self.a, d)


@dataclass(frozen=True)
class Path:
    """A sampled trajectory with trapezoid weights."""

    t: np.ndarray
    R: np.ndarray
    v: np.ndarray
    weights: np.ndarray = field(repr=False)


def _unit_grid(n=N_TIME, s_max=S_MAX):
    s = np.linspace(-s_max, s_max, n + 1)
    w = np.full(s.size, s[1] - s[0])
    w[0] = w[-1] = 0.5 * w[0]
    g = np.exp(-math.pi * s * s)
    return s, w, g


def canonical_trajectories(bp: BeamPair, n_time: int = N_TIME) -> tuple[Path, Path]:
    """Sample both paths of the canonical model on ``|t| <= 5 tau``."""
    if n_time < 2**12:
        raise DomainError("at least 4096 time intervals are required")
    s, w, g = _unit_grid(n_time)
    t = s * bp.tau
    x = 0.5 * bp.L * (1.0 + erf(math.sqrt(math.pi) * s))
    vx = bp.L / bp.tau * g
    dy = 0.5 * bp.a * g
    vy = 0.5 * bp.a / bp.tau * (-2.0 * math.pi * s * g)
    weights = w * bp.tau
    p1 = Path(t, np.column_stack([x, dy]), np.column_stack([vx, vy]), weights)
    p2 = Path(t, np.column_stack([x, -dy]), np.column_stack([vx, -vy]), weights)
    return p1, p2


def radiation_amplitude(path: Path, omega: float, k_vec) -> np.ndarray:
    """``(1/2 pi) int dt v(t) exp(i omega t - i k.R(t))`` by the trapezoid rule.

    Raises
    ------
    ResolutionError
        If the phase advances by more than one radian between samples.
    """
    k_vec = np.asarray(k_vec, dtype=float)
    phase = omega * path.t - path.R @ k_vec
    if np.max(np.abs(np.diff(phase))) > _MAX_PHASE_STEP:
        raise ResolutionError("time grid too coarse for the requested (omega, k)")
    e = np.exp(1j * phase) * path.weights
    return (e @ path.v) / (2.0 * math.pi)


def psi_functions(bp: BeamPair, z, y, n_angles: int = N_ANGLES):
    """Direct evaluation of ``(Psi_1, Psi_2)`` from the sampled trajectories.

    Slow but independent of the tabulated grid; intended for validation.
    """
    if n_angles < 32:
        raise DomainError("at least 32 angles are required")
    z_arr, y_arr = np.broadcast_arrays(np.asarray(z, float), np.asarray(y, float))
    if np.any(z_arr < 0) or np.any(y_arr < 0):
        raise DomainError("z and y must be non-negative")
    p1, p2 = canonical_trajectories(bp)
    phis = 2.0 * math.pi * np.arange(n_angles) / n_angles
    out1 = np.empty(z_arr.shape)
    out2 = np.empty(z_arr.shape)
    norm = bp.a**2
    for idx in np.ndindex(z_arr.shape):
        omega = 2.0 * z_arr[idx] / bp.tau
        k = y_arr[idx] / bp.L
        s1 = s2 = 0.0
        for phi in phis:
            khat = np.array([math.cos(phi), math.sin(phi)])
            l = radiation_amplitude(p1, omega, k * khat) - radiation_amplitude(p2, omega, k * khat)
            s2 += float(np.sum(np.abs(l) ** 2))
            s1 += abs(khat @ l) ** 2
        out1[idx] = s1 / n_angles / norm
        out2[idx] = s2 / n_angles / norm
    if out1.ndim == 0:
        return float(out1), float(out2)
    return out1, out2


def dipole_psi2(z):
    """``Psi_2(z, 0)`` from the sampled transverse velocity difference.

    The result depends only on the shape of the canonical profile.
    """
    z = np.asarray(z, dtype=float)
    s, w, g = _unit_grid()
    dv = -2.0 * math.pi * s * g  # (v_1y - v_2y) tau / a
    kernel = np.exp(2j * np.multiply.outer(z, s)) * (w * dv)
    l = kernel.sum(axis=-1) / (2.0 * math.pi)
    return np.abs(l) ** 2


@dataclass(frozen=True)
class RadiationSpectrum:
    """Tabulated shape functions with bicubic interpolation.

    ``Psi_1`` vanishes like ``z^2`` at every ``y`` (charge conservation makes
    the static longitudinal amplitude of a closed loop zero), so the table
    stores ``q_1 = Psi_1 / z^2``; this keeps relative accuracy where callers
    divide by ``z^2``. Outside the rectangle ``[0, z_max] x [0, y_max]`` both
    functions are taken to be zero.
    """

    a_over_L: float
    z: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    q1_grid: np.ndarray = field(repr=False)
    psi2_grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_s1", RectBivariateSpline(self.z, self.y, self.q1_grid))
        object.__setattr__(self, "_s2", RectBivariateSpline(self.z, self.y, self.psi2_grid))

    @property
    def z_max(self) -> float:
        return float(self.z[-1])

    @property
    def y_max(self) -> float:
        return float(self.y[-1])

    @property
    def psi1_grid(self) -> np.ndarray:
        return self.q1_grid * (self.z**2)[:, None]

    def _eval(self, spline, z, y):
        z, y = np.broadcast_arrays(np.asarray(z, float), np.asarray(y, float))
        inside = (z <= self.z_max) & (y <= self.y_max)
        out = np.zeros(z.shape)
        if np.any(inside):
            out[inside] = np.maximum(spline.ev(z[inside], y[inside]), 0.0)
        return out[()] if out.ndim == 0 else out

    def q1(self, z, y):
        """``Psi_1 / z^2``."""
        return self._eval(self._s1, z, y)

    def psi1(self, z, y):
        return np.asarray(z, float) ** 2 * self.q1(z, y)

    def psi2(self, z, y):
        return self._eval(self._s2, z, y)

    def to_csv(self, path) -> None:
        """Write the grid with columns ``z, y, psi1, psi2``."""
        psi1 = self.psi1_grid
        with open(path, "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["z", "y", "psi1", "psi2"])
            for i, zz in enumerate(self.z):
                for j, yy in enumerate(self.y):
                    wr.writerow([f"{zz:.17g}", f"{yy:.17g}",
                                 f"{psi1[i, j]:.17g}", f"{self.psi2_grid[i, j]:.17g}"])


def _tabulate(a_over_L, z, y, n_angles=N_ANGLES):
    s, w, g = _unit_grid()
    gp = -2.0 * math.pi * s * g
    xt = 0.5 * (1.0 + erf(math.sqrt(math.pi) * s))
    phis = 2.0 * math.pi * np.arange(n_angles) / n_angles
    cphi, sphi = np.cos(phis), np.sin(phis)
    time_kernel = (np.exp(2j * np.outer(z, s)) * w).T / (2.0 * math.pi)
    # d/dz of the kernel at z = 0, for the limit of (k.l) / z.
    slope_kernel = (2j * s * w) / (2.0 * math.pi)
    zpos = z > 0
    q1 = np.empty((z.size, y.size))
    psi2 = np.empty((z.size, y.size))
    for j, yy in enumerate(y):
        ph = np.exp(-1j * yy * np.outer(cphi, xt))
        arg = 0.5 * yy * a_over_L * np.outer(sphi, g)
        # The transverse split enters as a difference of two phases; the
        # sin/cos form avoids cancelling nearly equal exponentials.
        mx = (-2j / a_over_L) * g * np.sin(arg) * ph
        my = gp * np.cos(arg) * ph
        lx = mx @ time_kernel
        ly = my @ time_kernel
        lk = cphi[:, None] * lx + sphi[:, None] * ly
        psi2[:, j] = np.mean(np.abs(lx) ** 2 + np.abs(ly) ** 2, axis=0)
        q1[zpos, j] = np.mean(np.abs(lk[:, zpos]) ** 2, axis=0) / z[zpos] ** 2
        mk = cphi[:, None] * mx + sphi[:, None] * my
        q1[~zpos, j] = np.mean(np.abs(mk @ slope_kernel) ** 2)
    return q1, psi2


@lru_cache(maxsize=8)
def _cached_spectrum(a_over_L: float) -> RadiationSpectrum:
    z = np.linspace(0.0, Z_MAX, _NZ)
    y = np.linspace(0.0, Y_MAX, _NY)
    q1, psi2 = _tabulate(a_over_L, z, y)
    return RadiationSpectrum(a_over_L, z, y, q1, psi2)


def radiation_spectrum(bp: BeamPair) -> RadiationSpectrum:
    """Tabulated shape functions for the separation ratio of ``bp`` (cached)."""
    return _cached_spectrum(float(f"{bp.a / bp.L:.12g}"))


def J_moment(bp: BeamPair, kexp: float, spec: QuadratureSpec | None = None) -> float:
    """Moment ``J_k = int_0^inf z^k Psi_2(z, 0) dz``.

    The substitution ``z = t^2`` keeps the fractional and negative powers
    smooth at the origin, where ``Psi_2 ~ z^2``. The canonical shape makes
    the moments independent of the dimensions in ``bp``.
    """
    if kexp <= -3:
        raise DomainError("J_k diverges for k <= -3")
    spec = spec or QuadratureSpec(rel_tol=1e-12)
    # Psi_2 decays like exp(-2 z^2 / pi); stop where it is below e^-60.
    t_max = (0.5 * math.pi * 60.0) ** 0.25

    def f(t):
        return 2.0 * t ** (2.0 * kexp + 1.0) * dipole_psi2(t * t)

    return integrate_adaptive(f, 0.0, t_max, spec).value
