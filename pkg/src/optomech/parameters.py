"""Physical inputs, unit conversions and derived single-valued parameters.

All downstream physics runs in mechanical-frequency units (every rate divided
by omega_m), which keeps intermediate quantities O(1) instead of mixing 1e-34
and 1e15 magnitudes.  SI values appear only at the I/O boundary:
``SystemParams`` (raw SI inputs) -> ``DerivedParams`` (SI rates) ->
``NormalizedParams`` (omega_m units, plus the SI anchors needed to convert
powers and temperatures back).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

TWO_PI = 2.0 * math.pi


class ParameterError(ValueError):
    """Raised when a physical parameter violates its validity constraints."""


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA/SI-exact constants; fixed, never user-settable."""

    hbar: float = 1.054571817e-34   # J s
    k_B: float = 1.380649e-23       # J/K (exact)
    c: float = 2.99792458e8         # m/s (exact)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class SystemParams:
    """Raw SI description of the cavity + mirror + gain-medium system.

    Exactly one of ``cavity_decay`` (rad/s) or ``finesse`` must be supplied;
    a finesse is converted with kappa_c = pi*c / (2*F*L).
    """

    cavity_length: float                 # L, m
    laser_wavelength: float              # lambda_L, m
    input_power: float                   # P_in, W
    effective_mass: float                # m, kg
    mech_freq: float                     # omega_m, rad/s
    quality_factor: float                # Q_m, dimensionless
    duffing: float = 0.0                 # lambda, rad/s (stiffening, >= 0)
    opa_gain: float = 0.0                # G0, rad/s
    opa_phase: float = 0.0               # theta, rad; stored wrapped to [0, 2pi)
    bare_detuning: float = 0.0           # Delta, rad/s
    bath_temp: float = 0.0               # T, K
    thermal_photons: float = 0.0         # n_ph, dimensionless
    cavity_decay: float | None = None    # kappa_c, rad/s
    finesse: float | None = None         # F, dimensionless

    def __post_init__(self):
        if self.cavity_length <= 0 or self.laser_wavelength <= 0:
            raise ParameterError("cavity length and laser wavelength must be positive")
        if self.effective_mass <= 0 or self.mech_freq <= 0 or self.quality_factor <= 0:
            raise ParameterError("mass, mechanical frequency and quality factor must be positive")
        if self.input_power < 0 or self.opa_gain < 0 or self.bath_temp < 0 or self.thermal_photons < 0:
            raise ParameterError("input power, OPA gain, temperature and photon occupancy must be >= 0")
        if self.duffing < 0:
            raise ParameterError("duffing strength must be >= 0 (stiffening anharmonicity only)")
        if (self.cavity_decay is None) == (self.finesse is None):
            raise ParameterError("supply exactly one of cavity_decay or finesse")
        if self.cavity_decay is not None and self.cavity_decay < 0:
            raise ParameterError("cavity decay must be >= 0")
        if self.finesse is not None and self.finesse <= 0:
            raise ParameterError("finesse must be positive")
        object.__setattr__(self, "opa_phase", self.opa_phase % TWO_PI)

    @property
    def kappa_c(self) -> float:
        """Cavity amplitude decay rate in rad/s, from finesse if needed."""
        if self.cavity_decay is not None:
            return self.cavity_decay
        return math.pi * CONSTANTS.c / (2.0 * self.finesse * self.cavity_length)


@dataclass(frozen=True)
class DerivedParams:
    """SI rates derived from SystemParams; inputs to normalization."""

    g: float          # single-photon coupling, rad/s
    eps: float        # drive amplitude (real, positive), rad/s
    gamma_m: float    # mechanical decay, rad/s
    kappa_c: float    # cavity decay, rad/s
    omega_L: float    # laser frequency, rad/s
    n_th: float       # thermal phonon occupancy of the bath
    kbar: float       # |kappa_c - 2 G0 cos(theta)| / (2 g)


def derive_params(p: SystemParams) -> DerivedParams:
    """Compute the derived SI rates.

    The cavity frequency is approximated by the laser frequency when
    evaluating g (the detunings in play are ~1e7 rad/s against ~1e15).
    """
    omega_L = TWO_PI * CONSTANTS.c / p.laser_wavelength
    kappa_c = p.kappa_c
    x_zpf = math.sqrt(CONSTANTS.hbar / (2.0 * p.effective_mass * p.mech_freq))
    g = (omega_L / p.cavity_length) * x_zpf
    eps = math.sqrt(2.0 * kappa_c * p.input_power / (CONSTANTS.hbar * omega_L))
    gamma_m = p.mech_freq / p.quality_factor
    if p.bath_temp == 0.0:
        n_th = 0.0
    else:
        n_th = 1.0 / math.expm1(CONSTANTS.hbar * p.mech_freq / (CONSTANTS.k_B * p.bath_temp))
    kbar = abs(kappa_c - 2.0 * p.opa_gain * math.cos(p.opa_phase)) / (2.0 * g)
    return DerivedParams(g=g, eps=eps, gamma_m=gamma_m, kappa_c=kappa_c,
                         omega_L=omega_L, n_th=n_th, kbar=kbar)


@dataclass(frozen=True)
class NormalizedParams:
    """All rates in units of omega_m (omega_m itself maps to 1).

    ``omega_m`` and ``omega_L`` keep the SI anchors so powers and
    temperatures can be converted back exactly.
    """

    g: float
    eps: float
    kappa_c: float
    gamma_m: float
    lam: float        # duffing strength / omega_m
    g0: float         # OPA gain / omega_m
    theta: float      # rad
    delta: float      # bare detuning / omega_m
    n_th: float
    n_ph: float
    omega_m: float    # SI anchor, rad/s
    omega_L: float    # SI anchor, rad/s

    # -- frequently used combinations -------------------------------------
    @property
    def kappa_bar(self) -> float:
        """kappa_c - 2 G0 cos(theta), the gain-modified decay."""
        return self.kappa_c - 2.0 * self.g0 * math.cos(self.theta)

    @property
    def delta_p(self) -> float:
        """2 G0 sin(theta), the gain-induced detuning shift."""
        return 2.0 * self.g0 * math.sin(self.theta)

    @property
    def kappa_p(self) -> float:
        """2 G0 cos(theta), the gain-induced decay shift."""
        return 2.0 * self.g0 * math.cos(self.theta)

    @property
    def kbar(self) -> float:
        return abs(self.kappa_bar) / (2.0 * self.g)

    @property
    def input_power_w(self) -> float:
        """Laser power in watts implied by the stored drive amplitude."""
        return CONSTANTS.hbar * self.omega_L * self.omega_m * self.eps**2 / (2.0 * self.kappa_c)

    def rate_si(self, value: float) -> float:
        """Convert a normalized rate back to rad/s."""
        return value * self.omega_m

    def power_to_eps(self, p_in_w: float) -> float:
        """Normalized drive amplitude for a given SI input power."""
        return math.sqrt(2.0 * self.kappa_c * self.omega_m * p_in_w
                         / (CONSTANTS.hbar * self.omega_L)) / self.omega_m

    def with_changes(self, **kw) -> "NormalizedParams":
        return replace(self, **kw)


def normalize(p: SystemParams, d: DerivedParams | None = None) -> NormalizedParams:
    """Map a SystemParams to omega_m-normalized units."""
    if d is None:
        d = derive_params(p)
    w = p.mech_freq
    return NormalizedParams(
        g=d.g / w, eps=d.eps / w, kappa_c=d.kappa_c / w, gamma_m=d.gamma_m / w,
        lam=p.duffing / w, g0=p.opa_gain / w, theta=p.opa_phase,
        delta=p.bare_detuning / w, n_th=d.n_th, n_ph=p.thermal_photons,
        omega_m=w, omega_L=d.omega_L,
    )


def denormalize(n: NormalizedParams) -> dict:
    """SI rates (rad/s) recovered from a NormalizedParams; exact inverse map."""
    w = n.omega_m
    return {
        "g": n.g * w, "eps": n.eps * w, "kappa_c": n.kappa_c * w,
        "gamma_m": n.gamma_m * w, "duffing": n.lam * w, "opa_gain": n.g0 * w,
        "bare_detuning": n.delta * w, "mech_freq": w,
    }
