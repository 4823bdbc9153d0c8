"""Built-in invariant suites and the table of reference estimates.

Both are plain functions returning JSON-ready records; the command line
wraps them as ``validate`` and ``reproduce``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .beams import BeamPair, J_moment, dipole_psi2
from .constants import C_LIGHT
from .dephasing import (
    Scenario,
    K_dipole,
    K_full,
    base_combination,
    classify_regime,
    enhancement,
)
from .kernels import branch_u, branch_v, ew_density, neg_im_g
from .materials import IDEAL, Conductor, Dielectric, Vacuum
from .numerics import QuadratureSpec, integrate_adaptive
from .spectra import S_ideal_closed, S_p_quadrature

__all__ = ["CheckResult", "ReproRow", "VALIDATORS", "run_validate", "reproduce_table"]

COPPER = Conductor(5e17)
SILICON = Conductor.from_si(1.0)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one invariant suite with the numbers it measured."""

    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    tolerance: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def check_branch_cuts() -> CheckResult:
    xi = np.concatenate([np.linspace(0.0, 3.0, 301), np.logspace(-3, 6, 200)])
    epss = [1.0, 2.5, 100.0, 4.0 + 1e3j, 1e-3 + 1e8j, -3.0 + 0.1j]
    worst = min(float(np.min(branch_u(xi).imag)), *(float(np.min(branch_v(e, xi).imag)) for e in epss))
    return CheckResult("branch_cuts", worst >= 0.0, {"min_imag": worst}, "Im u, Im v >= 0")


def check_positive_semidefinite() -> CheckResult:
    worst = math.inf
    omega = 1e9
    k0 = omega / C_LIGHT
    for m in (Vacuum(), IDEAL, Dielectric(10.0), Dielectric(1e3), COPPER, SILICON):
        for d in (0.0, 0.3 / k0, 3.0 / k0):
            for xi in np.concatenate([np.linspace(0.01, 0.99, 25), np.logspace(0.01, 4, 25)]):
                if d == 0 and xi > 1 and isinstance(m, Conductor):
                    continue
                v = neg_im_g(m, omega, xi * k0, d)
                # eigenvalues of the tangential block: (g_l +- g_t) / 2
                scale = max(abs(v.neg_im_gl), abs(v.neg_im_gt), 1e-300)
                lo = min(v.neg_im_gl + v.neg_im_gt, v.neg_im_gl - v.neg_im_gt) / scale
                worst = min(worst, lo)
    return CheckResult("psd", worst >= -1e-10, {"min_scaled_eigenvalue": worst}, ">= -1e-10")


def check_ew_vanishing() -> CheckResult:
    w = np.logspace(-3, 3, 50)
    vac = np.max(np.abs(ew_density(1.0 + 0j, w, 0.5)))
    ideal = np.max(np.abs(ew_density(math.inf, w, 0.5)))
    n = 3.0
    above = np.sqrt(np.linspace(n * n + 1e-6, 1e4, 50) - 1.0)
    diel = np.max(np.abs(ew_density(complex(n * n), above, 0.5)))
    worst = float(max(vac, ideal, diel))
    return CheckResult(
        "ew_vanishing", worst == 0.0,
        {"vacuum": float(vac), "ideal": float(ideal), "lossless_above_n": float(diel)}, "== 0",
    )


def check_psi_closure() -> CheckResult:
    z = np.array([1e-4, 1e-3, 1e-2])
    r = dipole_psi2(z) / z**2
    spread = float(np.max(np.abs(r / r[0] - 1.0)))
    return CheckResult(
        "psi_closure", bool(r[0] > 0 and spread < 1e-3),
        {"ratio_at_1e-4": float(r[0]), "relative_spread": spread}, "spread < 1e-3",
    )


def check_j_moments() -> CheckResult:
    bp = BeamPair(1.0, 1.0, 1e-3)
    j0, jm2 = J_moment(bp, 0.0), J_moment(bp, -2.0)
    e0 = abs(j0 / (1.0 / (8.0 * math.sqrt(2.0))) - 1.0)
    e2 = abs(jm2 / (1.0 / (2.0 * math.sqrt(2.0) * math.pi)) - 1.0)
    return CheckResult(
        "j_moments", max(e0, e2) <= 1e-6,
        {"J_0": j0, "J_-2": jm2, "rel_err_J_0": e0, "rel_err_J_-2": e2}, "rel <= 1e-6",
    )


def check_ideal_spectrum() -> CheckResult:
    omega = 1e10
    k0 = omega / C_LIGHT
    worst = 0.0
    for p in np.logspace(-2, 2, 50):
        d = p / (2.0 * k0)
        q = S_p_quadrature(IDEAL, omega, d).value
        worst = max(worst, abs(q / S_ideal_closed(omega, d) - 1.0))
    return CheckResult("ideal_spectrum", worst <= 1e-6, {"max_rel_err": worst}, "rel <= 1e-6")


def check_oscillatory_quadrature() -> CheckResult:
    worst = 0.0
    for p in (1.0, 10.0, 100.0, 1000.0):
        # xi = sin(phi) turns xi cos(p sqrt(1 - xi^2)) into a smooth cosine
        f = lambda phi: np.sin(phi) * np.cos(phi) * np.cos(p * np.cos(phi))
        got = integrate_adaptive(f, 0.0, 0.5 * math.pi, QuadratureSpec(rel_tol=1e-10)).value
        exact = (math.cos(p) + p * math.sin(p) - 1.0) / p**2
        worst = max(worst, abs(got - exact) / abs(exact))
    return CheckResult("oscillatory_quadrature", worst <= 1e-6, {"max_rel_err": worst}, "rel <= 1e-6")


def check_dipole_vs_full() -> CheckResult:
    bp = BeamPair.from_velocity(10.0, 1e-3, 1e-2)
    worst = 0.0
    for m in (IDEAL, Dielectric(10.0)):
        for d in (0.01 * bp.lam, 0.1 * bp.lam, bp.lam):
            sc = Scenario(m, bp.at_height(d))
            worst = max(worst, abs(K_full(sc).K / K_dipole(sc).K - 1.0))
    return CheckResult("dipole_vs_full", worst <= 0.1, {"max_rel_diff": worst}, "rel <= 0.1")


VALIDATORS = {
    "branch_cuts": check_branch_cuts,
    "psd": check_positive_semidefinite,
    "ew_vanishing": check_ew_vanishing,
    "psi_closure": check_psi_closure,
    "j_moments": check_j_moments,
    "ideal_spectrum": check_ideal_spectrum,
    "oscillatory_quadrature": check_oscillatory_quadrature,
    "dipole_vs_full": check_dipole_vs_full,
}


def run_validate(names=None) -> list[CheckResult]:
    """Run the named suites (all by default) in a fixed order."""
    names = list(VALIDATORS) if names is None else list(names)
    return [VALIDATORS[n]() for n in names]


@dataclass(frozen=True)
class ReproRow:
    """Computed number against a reference order-of-magnitude estimate."""

    quantity: str
    reference_value: float
    computed_value: float
    ratio: float
    passed: bool
    window: float = 3.0

    def to_dict(self) -> dict:
        return asdict(self)


def _row(name, ref, got, window=3.0):
    ratio = got / ref
    return ReproRow(name, ref, got, ratio, 1.0 / window <= ratio <= window, window)


def reproduce_table() -> list[ReproRow]:
    """Reference estimates for the standard parameter set.

    The beam has ``L = 10`` cm at ``T = 300`` K. The fast case flies for
    ``tau = 3 ns`` (``v / c`` about 0.11); the slow cases use ``v / c = 1e-4``.
    """
    close = BeamPair(10.0, 3e-9, 1e-2)
    slow_cu = Scenario(COPPER, BeamPair.from_velocity(10.0, 1e-4, 1e-2))
    slow_si = Scenario(SILICON, BeamPair.from_velocity(10.0, 1e-4, 1e-2))
    cu = classify_regime(slow_cu)
    return [
        _row("K0_base_per_theta", 10.0, base_combination(close, 300.0) / close.theta),
        _row("K0_base_theta_1e-6", 1e-5, base_combination(close, 300.0)),
        _row("gamma_copper", 1e-10, cu.gamma),
        _row("gamma_copper_cube_root", 1e-3, cu.gamma ** (1.0 / 3.0)),
        _row("eta_copper_beta_1e-4", 10.0, enhancement(slow_cu).eta),
        _row("gamma_silicon", 1e-4, classify_regime(slow_si).gamma),
        _row("eta_silicon_beta_1e-4", 1e4, enhancement(slow_si).eta),
    ]
