"""Dephasing exponent K of the two-beam interferometer.

All integrals run over the reduced frequency ``z = omega tau / 2`` and the
reduced wavenumber ``y = k L``. With ``beta = v / c`` a point ``(z, xi)`` of
the kernel plane maps to ``y = 2 z beta xi``, and ``p = 2 k0 d = 4 z d / lambda``
with ``lambda = c tau``.

Frequency integrals carry the temperature weight

    W(z) = (z / tau) coth(hbar z / (k_B T tau)),

which tends to ``k_B T / hbar`` at high temperature. Every ``K`` is then

    K = alpha theta (L / c)^2 / tau * (1 / 2 pi) int dz W(z) I(z)

where, over the kernel plane,

    I(z) = int xi dxi [2 h_t Psi_1 + (h_l - h_t) Psi_2](z, 2 z beta xi).

At ``y -> 0`` this collapses onto ``2 (S / k0) Psi_2(z, 0)``, the dipole
form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .beams import Y_MAX, Z_MAX, BeamPair, J_moment, dipole_psi2, radiation_spectrum
from .constants import ALPHA, C_LIGHT, HBAR, K_B
from .errors import DomainError, UnsupportedMaterialError
from .kernels import branch_v, eps_of, ew_density, pw_density_phi, reflection_deltas
from .materials import Conductor, Dielectric, Material, Vacuum, is_ideal
from .numerics import QuadratureSpec, QuadResult, _kronrod_sum, integrate_adaptive
from .spectra import S_asymptotic, S_ideal_reduced, spectral_density

__all__ = [
    "DEPHASING_SPEC",
    "KERNEL_WEIGHT",
    "Scenario",
    "DephasingResult",
    "RegimeInfo",
    "Enhancement",
    "base_combination",
    "b_coefficients",
    "K_free",
    "K_full",
    "K_dipole",
    "K_asymptotic",
    "classify_regime",
    "crossover_d",
    "enhancement",
    "predicted_minimum",
    "derived_scalars",
    "power_law",
]

DEPHASING_SPEC = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-300, max_intervals=2000)

# S is normalised to (2/3) k0 in free space, half of the trace of -Im g over
# the kernel plane. The full integrand carries the same factor so that its
# small-k limit is the dipole formula.
KERNEL_WEIGHT = 0.5

# Extra e-folds beyond the tail budget for the growth of the conductor
# kernel above the second borderline.
_GROWTH = 10.0


@dataclass(frozen=True)
class Scenario:
    """Material, beams and temperature of one dephasing evaluation.

    Parameters
    ----------
    material : Material
    beam : BeamPair
        Includes the height ``d`` above the surface.
    T : float
        Temperature, K. ``T = 0`` keeps only zero-point fluctuations.
    spec : QuadratureSpec
        Outer tolerance; inner integrals run 20 times tighter.
    high_temperature : bool
        Replace ``coth(x)`` by ``1/x``.
    """

    material: Material
    beam: BeamPair
    T: float = 300.0
    spec: QuadratureSpec = DEPHASING_SPEC
    high_temperature: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T >= 0):
            raise DomainError("temperature must be non-negative")
        if self.high_temperature and self.T == 0:
            raise DomainError("the high-temperature form needs T > 0")

    @property
    def d(self) -> float:
        return self.beam.d

    def at_height(self, d: float) -> "Scenario":
        return replace(self, beam=self.beam.at_height(d))

    @property
    def thermal_ratio(self) -> float:
        """``hbar / (k_B T tau)``; small values mean the classical regime."""
        return math.inf if self.T == 0 else HBAR / (K_B * self.T * self.beam.tau)


@dataclass(frozen=True)
class DephasingResult:
    """Dephasing exponent with its split, reference value and scales."""

    K: float
    K_p: float
    K_e: float
    K0: float
    kappa: float
    regime: str
    d_cross: float
    gamma: float
    eta: float
    zeta_bar: float
    delta_bar: float
    lam: float
    error: float
    err_p: float
    err_e: float
    method: str
    notes: tuple = field(default=())


def base_combination(beam: BeamPair, T: float) -> float:
    """``alpha theta (L/c)^2 (k_B T / hbar) / tau``, the free-space scale of K."""
    return ALPHA * beam.theta * (beam.L / C_LIGHT) ** 2 * (K_B * T / HBAR) / beam.tau


def _prefactor(beam: BeamPair) -> float:
    return ALPHA * beam.theta * (beam.L / C_LIGHT) ** 2 / beam.tau


def _weight(sc: Scenario):
    tau = sc.beam.tau
    if sc.T == 0:
        return lambda z: np.asarray(z, float) / tau
    kt = K_B * sc.T / HBAR
    if sc.high_temperature:
        return lambda z: np.full(np.shape(z), kt)

    def w(z):
        x = np.asarray(z, float) / (kt * tau)
        small = x < 1e-8
        xs = np.where(small, 1.0, x)
        return kt * np.where(small, 1.0 + x * x / 3.0, xs / np.tanh(xs))

    return w


def b_coefficients() -> dict:
    """Model numbers that multiply the closed-form laws."""
    bp = BeamPair(1.0, 1.0, 1e-3)
    j = {k: J_moment(bp, k) for k in (-2.0, -1.5, 0.0, 2.0)}
    return {
        "J_-2": j[-2.0],
        "J_-3/2": j[-1.5],
        "J_0": j[0.0],
        "J_2": j[2.0],
        "b_p1": 2.0 * j[0.0] / (3.0 * math.pi),
        "b_p2": 16.0 * j[2.0] / (5.0 * j[0.0]),
        "b_e": 3.0 * j[-2.0] / (8.0 * j[0.0]),
        # K_e / K0 = c_skin delta_bar^2 lambda / d^3 for L << d << delta_bar.
        "c_skin": 3.0 * j[-2.0] / (64.0 * j[0.0]),
        # K_e / K0 = c_between delta_bar lambda / d^2 for delta_bar << d << d_cross.
        "c_between": 3.0 * j[-1.5] / (2.0**4.5 * j[0.0]),
        # K_e / K0 = c_diel lambda^2 / (n d^2) beyond the in-medium wavelength.
        "c_diel": 3.0 * j[-2.0] / (16.0 * j[0.0]),
    }


_B_CACHE: dict = {}


def _b(name):
    if not _B_CACHE:
        _B_CACHE.update(b_coefficients())
    return _B_CACHE[name]


@dataclass(frozen=True)
class RegimeInfo:
    """Velocity interval of a conductor scenario."""

    regime: str
    beta: float
    zeta_bar: float
    gamma: float
    lower_B: bool


def derived_scalars(sc: Scenario) -> dict:
    """``zeta_bar``, ``delta_bar``, ``gamma`` and ``lambda`` (NaN when undefined)."""
    bp = sc.beam
    out = {"lam": bp.lam, "zeta_bar": math.nan, "delta_bar": math.nan, "gamma": math.nan}
    if isinstance(sc.material, Conductor):
        zb = (8.0 * math.pi * sc.material.sigma * bp.tau) ** -0.5
        out.update(
            zeta_bar=zb,
            delta_bar=2.0 * zb * bp.lam,
            gamma=C_LIGHT / (8.0 * math.pi * sc.material.sigma * bp.L),
        )
    return out


def classify_regime(sc: Scenario) -> RegimeInfo:
    """Interval A (``beta < zeta_bar``), B (``beta < zeta_bar^(1/4)``) or C."""
    if not isinstance(sc.material, Conductor):
        raise UnsupportedMaterialError("velocity intervals are defined for conductors")
    s = derived_scalars(sc)
    beta, zb, gamma = sc.beam.beta, s["zeta_bar"], s["gamma"]
    if beta < zb:
        regime = "A"
    elif beta < zb**0.25:
        regime = "B"
    else:
        regime = "C"
    return RegimeInfo(regime, beta, zb, gamma, regime == "B" and beta < gamma ** (1.0 / 3.0))


def crossover_d(sc: Scenario) -> float:
    """Height below which near fields dominate, cm (order-one factors set to 1)."""
    m, bp = sc.material, sc.beam
    if isinstance(m, Dielectric):
        return bp.lam * m.n**-0.25
    if isinstance(m, Conductor):
        info = classify_regime(sc)
        if info.regime == "C":
            return math.sqrt(info.zeta_bar) * bp.lam**2 / bp.L
        return info.zeta_bar**0.25 * bp.lam
    raise UnsupportedMaterialError("no near-field crossover for vacuum or the ideal mirror")


@dataclass(frozen=True)
class Enhancement:
    gamma: float
    eta: float


def enhancement(sc: Scenario) -> Enhancement:
    """``gamma = c / (8 pi sigma L)`` and the near-wall enhancement ``eta``.

    ``eta = gamma / beta^2`` in interval A and ``gamma^(1/2) beta^(-3/2)``
    otherwise (the latter equals ``zeta_bar / beta^2``).
    """
    info = classify_regime(sc)
    if info.regime == "A":
        eta = info.gamma / info.beta**2
    else:
        eta = math.sqrt(info.gamma) * info.beta**-1.5
    return Enhancement(info.gamma, eta)


def predicted_minimum(sc: Scenario) -> tuple[float, float]:
    """Location and depth ``(d_min, kappa_min)`` of the minimum of kappa(d).

    Balances the suppressed propagating part ``b_p2 d^2 / lambda^2`` against
    the evanescent tail ``c_between delta_bar lambda / d^2``.
    """
    s = derived_scalars(sc)
    if not isinstance(sc.material, Conductor):
        raise UnsupportedMaterialError("minimum prediction needs a conductor")
    lam, db = s["lam"], s["delta_bar"]
    a, c = _b("b_p2") / lam**2, _b("c_between") * db * lam
    return (c / a) ** 0.25, 2.0 * math.sqrt(a * c)


def _regime_label(sc: Scenario) -> tuple[str, float]:
    m = sc.material
    if isinstance(m, Vacuum):
        return "far-field", math.nan
    if is_ideal(m):
        return "ideal", math.nan
    dx = crossover_d(sc)
    if sc.d >= dx:
        return "far-field", dx
    if isinstance(m, Dielectric):
        return "dielectric-NF", dx
    return classify_regime(sc).regime, dx


def _outer(fn, spec):
    """``int_0^Z_MAX fn(z) dz`` with ``z = t^2``; returns the QuadResult."""

    def f(t):
        return 2.0 * t * fn(t * t)

    return integrate_adaptive(f, 0.0, math.sqrt(Z_MAX), spec)


def _outer_error(inner_err, res):
    return _kronrod_sum(lambda t: 2.0 * t * inner_err(t * t), res.partition)


def K_free(sc: Scenario) -> QuadResult:
    """Free-space exponent ``K0`` with the scenario's temperature weight."""
    w = _weight(sc)
    res = _outer(lambda z: w(z) * (2.0 / 3.0) * dipole_psi2(z), sc.spec)
    pref = _prefactor(sc.beam) / math.pi
    return QuadResult(pref * res.value, pref * res.error, res.n_eval, res.n_intervals)


def _assemble(sc, kp, ke, ep, ee, method, notes=()):
    k0 = K_free(sc).value
    label, dx = _regime_label(sc)
    s = derived_scalars(sc)
    eta = enhancement(sc).eta if isinstance(sc.material, Conductor) else math.nan
    notes = tuple(notes)
    if sc.T > 0 and sc.thermal_ratio > 1e-3:
        notes += (f"hbar/(k_B T tau) = {sc.thermal_ratio:.3g}: not deep in the classical regime",)
    K = kp + ke
    return DephasingResult(
        K=K, K_p=kp, K_e=ke, K0=k0, kappa=K / k0, regime=label, d_cross=dx,
        gamma=s["gamma"], eta=eta, zeta_bar=s["zeta_bar"], delta_bar=s["delta_bar"],
        lam=s["lam"], error=ep + ee, err_p=ep, err_e=ee, method=method, notes=notes,
    )


class _PlaneIntegrand:
    """Inner integrals over the kernel plane at fixed ``z``, cached per node."""

    def __init__(self, sc: Scenario):
        self.sc = sc
        self.m = sc.material
        self.rs = radiation_spectrum(sc.beam)
        self.beta = sc.beam.beta
        self.tau = sc.beam.tau
        self.p_per_z = 4.0 * sc.d / sc.beam.lam
        self.inner_spec = sc.spec.with_rel_tol(0.05 * sc.spec.rel_tol)
        self.cache: dict[float, tuple[float, float, float, float]] = {}

    def _psi(self, z, y):
        return z * z * self.rs.q1(z, y), self.rs.psi2(z, y)

    def _pw(self, z, eps, p):
        ymax = 2.0 * z * self.beta
        phi_hi = 0.5 * math.pi if ymax <= Y_MAX else math.asin(Y_MAX / ymax)

        def f(phi):
            uhl, uht, udiff = pw_density_phi(eps, phi, p, with_difference=True)
            psi1, psi2 = self._psi(z, ymax * np.sin(phi))
            return np.sin(phi) * (2.0 * uht * psi1 + udiff * psi2)

        r = integrate_adaptive(f, 0.0, phi_hi, self.inner_spec)
        return r.value, r.error

    def _ew_points(self, z, eps, p, w_top):
        pts = [math.sqrt(abs(eps))]
        if p > 0:
            pts.append(1.0 / p)
        pts += [10.0**e for e in range(-2, 30)]
        for y in (0.25, 0.5, 1.0, 2.0, 3.0, 4.0):
            xi = y / (2.0 * z * self.beta)
            if xi > 1:
                pts.append(math.sqrt(xi * xi - 1.0))
        return sorted(x for x in pts if 0 < x < w_top)

    def _ew(self, z, eps, p):
        if isinstance(self.m, Vacuum) or is_ideal(self.m):
            return 0.0, 0.0
        xi_max = Y_MAX / (2.0 * z * self.beta)
        if xi_max <= 1.0:
            return 0.0, 0.0
        w_geo = math.sqrt(xi_max * xi_max - 1.0)
        beta2z = 2.0 * z * self.beta

        def g(w):
            hl, ht, diff = ew_density(eps, w, p, with_difference=True)
            psi1, psi2 = self._psi(z, beta2z * np.sqrt(1.0 + w * w))
            return w * (2.0 * ht * psi1 + diff * psi2)

        if isinstance(self.m, Dielectric):
            wn = math.sqrt(self.m.n**2 - 1.0)
            theta_hi = 0.5 * math.pi if w_geo >= wn else math.asin(w_geo / wn)

            def f(theta):
                return wn * np.cos(theta) * g(wn * np.sin(theta))

            pts = [math.asin(x / wn) for x in self._ew_points(z, eps, p, min(w_geo, wn))]
            r = integrate_adaptive(f, 0.0, theta_hi, self.inner_spec, pts)
            return r.value, r.error
        w_top, tail = w_geo, 0.0
        if p > 0:
            w_exp = (self.inner_spec.tail_exponent_budget + _GROWTH) / p
            if w_exp < w_geo:
                w_top = w_exp
        r = integrate_adaptive(g, 0.0, w_top, self.inner_spec, self._ew_points(z, eps, p, w_top))
        if w_top < w_geo:
            tail = 2.0 * abs(float(g(np.array([w_top]))[0])) / p
        return r.value, r.error + tail

    def __call__(self, z: float):
        key = float(z)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if z <= 0:
            out = (0.0, 0.0, 0.0, 0.0)
        else:
            eps = eps_of(self.m, 2.0 * z / self.tau)
            p = self.p_per_z * z
            out = self._pw(z, eps, p) + self._ew(z, eps, p)
        self.cache[key] = out
        return out

    def vec(self, idx):
        return lambda zs: np.array([self(z)[idx] for z in np.atleast_1d(zs)])


def K_full(sc: Scenario, single_pass: bool = False) -> DephasingResult:
    """Dephasing exponent from the full double integral over ``(omega, k)``.

    Parameters
    ----------
    sc : Scenario
    single_pass : bool
        Integrate ``I_p + I_e`` in one outer quadrature instead of two; the
        split values are then not available and ``K_e`` is reported as NaN.

    Notes
    -----
    The shape functions are taken as zero outside ``z <= 6, y <= 5``.
    For ``d`` much larger than ``L`` the factor ``exp(-2 k d)`` makes the
    cut irrelevant; at ``d`` of order ``L`` or below the result refers to
    this integration window.
    """
    plane = _PlaneIntegrand(sc)
    w = _weight(sc)
    pref = _prefactor(sc.beam) * KERNEL_WEIGHT / math.pi
    if single_pass:
        fn = lambda z: w(z) * (plane.vec(0)(z) + plane.vec(2)(z))
        en = lambda z: w(z) * (plane.vec(1)(z) + plane.vec(3)(z))
        r = _outer(fn, sc.spec)
        err = r.error + _outer_error(en, r)
        res = _assemble(sc, pref * r.value, 0.0, pref * err, 0.0, "full-single")
        return replace(res, K_p=math.nan, K_e=math.nan)
    parts = []
    for vi, ei in ((0, 1), (2, 3)):
        fv, fe = plane.vec(vi), plane.vec(ei)
        r = _outer(lambda z: w(z) * fv(z), sc.spec)
        parts.append((pref * r.value, pref * (r.error + _outer_error(lambda z: w(z) * fe(z), r))))
    (kp, ep), (ke, ee) = parts
    return _assemble(sc, kp, ke, ep, ee, "full")


def K_dipole(sc: Scenario) -> DephasingResult:
    """Dephasing exponent in the dipole approximation, using ``S(omega)``.

    A conductor at ``d = 0`` has a divergent ``S_e``; the full integral is
    returned instead.
    """
    if isinstance(sc.material, Conductor) and sc.d == 0:
        res = K_full(sc)
        return replace(res, method="full", notes=res.notes + ("dipole form diverges at d = 0",))
    w = _weight(sc)
    tau = sc.beam.tau
    inner = sc.spec.with_rel_tol(0.05 * sc.spec.rel_tol)
    cache: dict[float, tuple] = {}

    def spec_at(z):
        key = float(z)
        if key not in cache:
            omega = 2.0 * z / tau
            k0 = omega / C_LIGHT
            s = spectral_density(sc.material, omega, sc.d, inner)
            cache[key] = (s.S_p / k0, s.S_e / k0, s.err_p / k0, s.err_e / k0)
        return cache[key]

    def part(i):
        return lambda zs: np.array([spec_at(z)[i] for z in np.atleast_1d(zs)])

    pref = _prefactor(sc.beam) / math.pi
    out = []
    for vi, ei in ((0, 2), (1, 3)):
        fv, fe = part(vi), part(ei)
        r = _outer(lambda z: w(z) * fv(z) * dipole_psi2(z), sc.spec)
        err = r.error + _outer_error(lambda z: w(z) * fe(z) * dipole_psi2(z), r)
        out.append((pref * r.value, pref * err))
    (kp, ep), (ke, ee) = out
    return _assemble(sc, kp, ke, ep, ee, "dipole")


def _dipole_with(sc, s_of_z):
    """Dipole integral with a closed-form reduced spectrum ``s(z) = S / k0``."""
    w = _weight(sc)
    r = _outer(lambda z: w(z) * s_of_z(z) * dipole_psi2(z), sc.spec)
    pref = _prefactor(sc.beam) / math.pi
    return pref * r.value, pref * r.error


def _quasistatic_conductor(sc: Scenario):
    """Evanescent part with the non-retarded kernel ``u -> i xi``.

    This is the ``k >> omega / c`` limit of the exact kernel. It covers the
    region between the two borderlines (``h_l = 4 zeta``) and above the
    second one (``h_t = 4 zeta^2 xi``) with a smooth transition. Keeping the
    full ``y`` dependence of the shape functions retains the low-frequency
    magnetic-dipole coupling of the loop, which the dipole form drops.
    """
    rs = radiation_spectrum(sc.beam)
    beta, L, tau = sc.beam.beta, sc.beam.L, sc.beam.tau
    w = _weight(sc)
    inner = sc.spec.with_rel_tol(0.05 * sc.spec.rel_tol)
    decay = 2.0 * sc.d / L

    def at_z(z):
        eps = eps_of(sc.material, 2.0 * z / tau)
        scale = 2.0 * z * beta
        lo = scale
        if lo >= Y_MAX:
            return 0.0

        def f(y):
            xi = y / scale
            v = branch_v(eps, xi)
            _, dt, diff = reflection_deltas(eps, 1j * xi, v, xi * xi)
            env = np.exp(-decay * y)
            psi1 = z * z * rs.q1(z, y)
            psi2 = rs.psi2(z, y)
            return y * env * (-2.0 * dt.real * psi1 - diff.real * psi2)

        pts = [scale * math.sqrt(abs(eps))]
        if decay > 0:
            pts += [x / decay for x in (0.1, 1.0, 10.0)]
        r = integrate_adaptive(f, lo, Y_MAX, inner, [x for x in pts if lo < x < Y_MAX])
        return r.value / scale**2

    r = _outer(lambda zs: w(zs) * np.array([at_z(z) for z in np.atleast_1d(zs)]), sc.spec)
    pref = _prefactor(sc.beam) * KERNEL_WEIGHT / math.pi
    return pref * r.value, pref * r.error


def K_asymptotic(sc: Scenario) -> DephasingResult:
    """Near-field asymptotic estimate of K.

    The propagating part uses the ideal-mirror spectrum in the dipole
    integral. For a dielectric the evanescent part uses the piecewise
    near-field ``S_e`` in the dipole integral. For a conductor it integrates
    the non-retarded kernel against the tabulated shape functions; in the
    windows between ``L``, ``delta_bar`` and ``d_cross`` this reproduces the
    power laws with the coefficients of :func:`b_coefficients`.

    Raises
    ------
    UnsupportedMaterialError
        For vacuum and the ideal mirror.
    """
    m = sc.material
    if not isinstance(m, (Conductor, Dielectric)):
        raise UnsupportedMaterialError("asymptotic forms exist for dielectrics and conductors")
    lam, tau, d = sc.beam.lam, sc.beam.tau, sc.d
    kp, ep = _dipole_with(sc, lambda z: S_ideal_reduced(4.0 * np.asarray(z) * d / lam))

    def s_e(zs):
        out = []
        for z in np.atleast_1d(zs):
            omega = 2.0 * z / tau
            out.append(S_asymptotic(m, omega, d).value / (omega / C_LIGHT))
        return np.array(out)

    if isinstance(m, Conductor):
        ke, ee = _quasistatic_conductor(sc)
    else:
        ke, ee = _dipole_with(sc, s_e)
    window = _window(sc)
    res = _assemble(sc, kp, ke, ep, ee, "asymptotic")
    return replace(res, notes=res.notes + (f"window: {window}",))


def power_law(sc: Scenario) -> tuple[float, str]:
    """Closed-form ``K_e / K0`` of the near-field window containing ``d``.

    Returns ``(ratio, window)``. Windows without a closed form (the ``d < L``
    plateau and the far field) give NaN.
    """
    m, d = sc.material, sc.d
    window = _window(sc)
    lam = sc.beam.lam
    if isinstance(m, Dielectric):
        if window == "in-medium-near":
            return float(m.n), window
        if window == "in-medium-far":
            return _b("c_diel") * lam**2 / (m.n * d * d), window
        return math.nan, window
    if not isinstance(m, Conductor):
        raise UnsupportedMaterialError("power laws exist for dielectrics and conductors")
    db = derived_scalars(sc)["delta_bar"]
    if window == "skin":
        return _b("c_skin") * db**2 * lam / d**3, window
    if window == "between":
        return _b("c_between") * db * lam / d**2, window
    return math.nan, window


def _window(sc: Scenario) -> str:
    m, d = sc.material, sc.d
    if isinstance(m, Dielectric):
        lam_n = sc.beam.lam / m.n
        if d >= crossover_d(sc):
            return "far-field"
        return "in-medium-near" if d < lam_n else "in-medium-far"
    s = derived_scalars(sc)
    if d < sc.beam.L:
        return "plateau"
    if d < s["delta_bar"] and classify_regime(sc).regime == "A":
        return "skin"
    if d < crossover_d(sc):
        return "between"
    return "far-field"
