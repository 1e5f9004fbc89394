"""Critical surface of the multistable response.

Critical points are vertical tangencies of the amplitude-versus-detuning
curve.  Setting the denominator of d(beta_s)/d(detuning) to zero gives a
quadratic in the detuning whose discriminant is a cubic in beta_s^2; the
multistability threshold (beta_crit, delta_crit, p_crit) is the real root of
that cubic, the detuning at which the quadratic degenerates, and the drive
power that places the response there.

Three routes are provided: the exact cubic-discriminant route (any duffing
strength > 0), a closed-form series in the coupling measure kbar valid for
small anharmonicity, and the harmonic-oscillator limit.  The series route is
flagged untrusted once 16 kbar^2 lam exceeds 0.1; in the strongly anharmonic
regimes of interest the exact route is the default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .parameters import CONSTANTS, NormalizedParams
from .steady_state import SteadyStateBranch

#: series-validity threshold for the perturbative route
SERIES_TRUST_LIMIT = 0.1


class CriticalPointError(ValueError):
    """No physical critical point for these parameters."""


class MultiCriticalError(CriticalPointError):
    """Discriminant cubic has several real roots (multi-critical case)."""

    def __init__(self, roots):
        super().__init__(f"multi-critical case: discriminant roots {roots}")
        self.roots = roots


@dataclass(frozen=True)
class CriticalIntermediate:
    """Coefficients of the detuning-quadratic discriminant in u = beta_s^2."""

    r3: float
    r2: float
    r1: float
    r0: float
    delta_cub: float

    def delta_quad(self, u: float) -> float:
        return ((self.r3 * u + self.r2) * u + self.r1) * u + self.r0


@dataclass(frozen=True)
class CriticalValues:
    beta_crit: float
    delta_crit_norm: float   # omega_m units
    delta_crit: float        # rad/s
    p_crit_w: float          # W
    method: str              # exact | perturbative | harmonic
    trusted: bool = True


def descartes_positive_bound(coeffs) -> int:
    """Sign changes of the nonzero coefficients: an upper bound, of the same
    parity, on the number of positive real roots."""
    signs = [1 if c > 0 else -1 for c in np.asarray(coeffs, dtype=float) if c != 0.0]
    if not signs:
        raise ValueError("all-zero polynomial")
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def critical_intermediate(p: NormalizedParams) -> CriticalIntermediate:
    g, lam = p.g, p.lam
    kb2 = p.kappa_bar**2
    w12 = 1.0 + 12.0 * lam
    r3 = 1024.0 * g**2 * lam**2
    r2 = 128.0 * lam * (g**2 * w12 - 18.0 * lam * kb2)
    r1 = 4.0 * w12 * (g**2 * w12 - 24.0 * lam * kb2)
    r0 = -kb2 * w12**2
    pp = r1 / (3.0 * r3) - r2**2 / (9.0 * r3**2)
    qq = r0 / (2.0 * r3) - r1 * r2 / (6.0 * r3**2) + r2**3 / (27.0 * r3**3)
    return CriticalIntermediate(r3=r3, r2=r2, r1=r1, r0=r0, delta_cub=pp**3 + qq**2)


def _delta_at_vertical_tangent(beta: float, p: NormalizedParams) -> float:
    """Detuning at which the tangent is vertical for the given amplitude
    (the degenerate root of the detuning quadratic)."""
    g, lam = p.g, p.lam
    w12 = 1.0 + 12.0 * lam
    num = 128.0 * beta**3 * g * lam + 4.0 * beta * g * w12
    den = 12.0 * (1.0 + 4.0 * beta**2) * lam + 1.0
    return p.delta_p + num / den


def _power_from_amplitude(beta: float, delta_norm: float, p: NormalizedParams) -> float:
    """Input power (W) placing a steady state at (beta, delta): the quintic is
    linear in eps^2, so solve for it directly and convert."""
    g, lam = p.g, p.lam
    w12 = 1.0 + 12.0 * lam
    d0 = delta_norm - p.delta_p
    bracket = (d0 - 2.0 * g * beta) ** 2 + p.kappa_bar**2
    eps2 = (16.0 * lam * beta**3 + w12 * beta) * bracket / g
    return CONSTANTS.hbar * p.omega_L * p.omega_m * eps2 / (2.0 * p.kappa_c)


def critical_values_exact(p: NormalizedParams) -> CriticalValues:
    """Exact critical values via the discriminant cubic (requires lam > 0)."""
    if p.lam <= 0.0:
        raise CriticalPointError("exact route needs lam > 0; use the harmonic route")
    if p.g <= 0.0:
        raise CriticalPointError("coupling g must be positive")
    ci = critical_intermediate(p)
    if ci.delta_cub <= 0.0:
        roots = np.roots([ci.r3, ci.r2, ci.r1, ci.r0])
        real = sorted(float(z.real) for z in roots if abs(z.imag) < 1e-9 * (1 + abs(z.real)))
        raise MultiCriticalError(real)
    pp = ci.r1 / (3.0 * ci.r3) - ci.r2**2 / (9.0 * ci.r3**2)
    qq = ci.r0 / (2.0 * ci.r3) - ci.r1 * ci.r2 / (6.0 * ci.r3**2) + ci.r2**3 / (27.0 * ci.r3**3)
    # real-arithmetic Cardano; cbrt keeps the sign so no complex intermediaries
    c = np.cbrt(-qq + math.sqrt(ci.delta_cub))
    u = -ci.r2 / (3.0 * ci.r3) + c - pp / c
    if u <= 0.0:
        raise CriticalPointError(f"discriminant root beta^2 = {u} is not positive")
    beta = math.sqrt(u)
    delta_norm = _delta_at_vertical_tangent(beta, p)
    p_crit = _power_from_amplitude(beta, delta_norm, p)
    return CriticalValues(beta_crit=beta, delta_crit_norm=delta_norm,
                          delta_crit=delta_norm * p.omega_m, p_crit_w=p_crit,
                          method="exact")


def critical_values_perturbative(p: NormalizedParams) -> CriticalValues:
    """Closed-form series in kbar and lam; flagged untrusted outside its
    validity window (result still returned)."""
    g, lam = p.g, p.lam
    k = p.kbar
    k2 = k * k
    beta = k * math.sqrt(1.0 + 64.0 * k2 * lam + 256.0 * k2 * lam**2 * (16.0 * k2 - 1.0))
    delta_norm = p.delta_p + 4.0 * g * k * (1.0 + 16.0 * k2 * lam
                                            + 192.0 * k2 * lam**2 * (4.0 * k2 - 1.0))
    p_crit = (4.0 * CONSTANTS.hbar * g * k**3 * p.omega_L * p.omega_m / p.kappa_c) \
        * (1.0 + 12.0 * lam * (1.0 + 4.0 * k2) + 3072.0 * k2 * k2 * lam**2)
    trusted = 16.0 * k2 * lam <= SERIES_TRUST_LIMIT
    return CriticalValues(beta_crit=beta, delta_crit_norm=delta_norm,
                          delta_crit=delta_norm * p.omega_m, p_crit_w=p_crit,
                          method="perturbative", trusted=trusted)


def critical_values_harmonic(p: NormalizedParams) -> CriticalValues:
    """Harmonic-oscillator (lam = 0) critical values."""
    if p.g <= 0.0:
        raise CriticalPointError("coupling g must be positive")
    kb = p.kappa_bar
    beta = abs(kb) / (2.0 * p.g)
    delta_norm = p.delta_p + 4.0 * p.g * beta
    p_crit = (CONSTANTS.hbar * p.omega_L * p.omega_m / (p.g * p.kappa_c)) * kb**2 * beta
    return CriticalValues(beta_crit=beta, delta_crit_norm=delta_norm,
                          delta_crit=delta_norm * p.omega_m, p_crit_w=p_crit,
                          method="harmonic")


def critical_values(p: NormalizedParams) -> CriticalValues:
    """Route matching the anharmonicity: exact for lam > 0, else harmonic."""
    return critical_values_exact(p) if p.lam > 0.0 else critical_values_harmonic(p)


@dataclass(frozen=True)
class MultistabilityResult:
    multistable: bool
    margin_beta: float
    margin_delta: float    # omega_m units
    margin_power: float    # W
    critical: CriticalValues


def multistability_test(p: NormalizedParams, branch: SteadyStateBranch,
                        cv: CriticalValues | None = None) -> MultistabilityResult:
    """Strict threshold test: all three margins must be positive."""
    if cv is None:
        cv = critical_values(p)
    mb = branch.beta_s - cv.beta_crit
    md = p.delta - cv.delta_crit_norm
    mp = p.input_power_w - cv.p_crit_w
    return MultistabilityResult(
        multistable=(mb > 0.0 and md > 0.0 and mp > 0.0),
        margin_beta=mb, margin_delta=md, margin_power=mp, critical=cv,
    )
