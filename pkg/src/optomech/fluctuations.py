"""Steady-state second moments of the quadrature fluctuations.

Two independent routes compute the same covariance matrix:

* ``covariance_lyapunov`` solves the algebraic steady-state moment equation
  A V + V A^T + D = 0 for the drift matrix A and diffusion matrix D.
* ``covariance_spectral`` solves the linear system in the frequency domain,
  forms the symmetrized noise spectra of the mechanical quadratures from the
  eight transfer functions, and integrates them by adaptive quadrature.

Their agreement (to 1e-6 relative on every stable point) is the module's
master correctness property: the diffusion matrix is a derived object, and
the spectral route guards that derivation.

All covariances live in the squeezed (transformed) frame where the drift
matrix is defined; physical observables are mapped back with the diagonal
e^{-2r}/e^{+2r} relations for position and momentum.  Vacuum variance is 1/2
throughout (quadratures x = (a + a^dag)/sqrt(2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_continuous_lyapunov

from .parameters import CONSTANTS, NormalizedParams
from .stability import TransformedFrame, build_drift
from .steady_state import LinearizationValidity, SteadyStateBranch

#: half-width multiplier for the spectral quadrature window
SPECTRAL_WINDOW = 50.0


class UnstableSystemError(RuntimeError):
    """No stationary state: the drift matrix is not strictly stable."""


def diffusion_matrix(frame: TransformedFrame, p: NormalizedParams) -> np.ndarray:
    """Symmetrized noise strength in (x, y, q, p) order.

    The optical entries are kappa_c (2 n_ph + 1); the mechanical thermal
    noise acquires e^{+2r}/e^{-2r} weights from the squeezing transform.  The
    symmetrized cross-correlations vanish, so the matrix is diagonal.
    """
    co = 2.0 * p.n_ph + 1.0
    cm = 2.0 * p.n_th + 1.0
    e2r = math.exp(2.0 * frame.r)
    return np.diag([
        p.kappa_c * co,
        p.kappa_c * co,
        p.gamma_m * e2r * cm,
        p.gamma_m / e2r * cm,
    ])


def covariance_lyapunov(a: np.ndarray, d: np.ndarray,
                        residual_tol: float = 1e-10) -> np.ndarray:
    """Unique symmetric solution of A V + V A^T + D = 0 for stable A.

    One refinement pass follows the direct solve; the residual is then
    checked against the backward-error scale ||D|| + ||A|| ||V||, the
    tightest criterion float64 supports for weakly damped (stiff) systems.
    """
    eig = np.linalg.eigvals(a)
    if np.max(eig.real) >= 0.0:
        raise UnstableSystemError(
            f"no stationary state: max Re(eig) = {np.max(eig.real):g}")
    v = solve_continuous_lyapunov(a, -d)
    v = 0.5 * (v + v.T)
    r = a @ v + v @ a.T + d
    dv = solve_continuous_lyapunov(a, -r)
    v = v + 0.5 * (dv + dv.T)
    resid = np.linalg.norm(a @ v + v @ a.T + d)
    scale = np.linalg.norm(d) + np.linalg.norm(a) * np.linalg.norm(v)
    if resid > residual_tol * max(scale, 1e-30):
        raise RuntimeError(f"lyapunov residual {resid:g} exceeds tolerance")
    return v


@dataclass(frozen=True)
class TransferFunctions:
    """Frequency-domain response of the mechanical quadratures to the four
    input noises; all methods accept scalar or array omega."""

    frame: TransformedFrame
    delta_eff: float
    kappa_c: float
    gamma_m: float
    g0: float

    # -- building blocks ---------------------------------------------------
    def d_cav(self, w):
        return self.delta_eff**2 + (self.kappa_c - 1j * w) ** 2 - 4.0 * self.g0**2

    def chi_m_inv(self, w):
        return (self.gamma_m - 1j * w) ** 2 + self.frame.omega_eff**2

    def d(self, w):
        dplus = self.delta_eff + self.frame.delta_p
        return self.d_cav(w) * self.chi_m_inv(w) - self.frame.g_coupling**2 * dplus

    # -- position row -------------------------------------------------------
    def a1(self, w):
        pre = math.sqrt(2.0 * self.kappa_c) * math.exp(self.frame.r) * self.frame.g_coupling
        return pre * (self.kappa_c + self.frame.kappa_p - 1j * w) / self.d(w)

    def a2(self, w):
        pre = math.sqrt(2.0 * self.kappa_c) * math.exp(self.frame.r) * self.frame.g_coupling
        return pre * (self.delta_eff + self.frame.delta_p) / self.d(w)

    def a3(self, w):
        return math.sqrt(2.0 * self.gamma_m) * (self.gamma_m - 1j * w) * self.d_cav(w) / self.d(w)

    def a4(self, w):
        return math.sqrt(2.0 * self.gamma_m) * self.frame.omega_eff * self.d_cav(w) / self.d(w)

    # -- momentum row --------------------------------------------------------
    def b1(self, w):
        return (self.gamma_m - 1j * w) / self.frame.omega_eff * self.a1(w)

    def b2(self, w):
        pre = math.sqrt(2.0 * self.kappa_c) * self.frame.g_coupling_t
        return pre * (self.gamma_m - 1j * w) * (self.delta_eff + self.frame.delta_p) / self.d(w)

    def b3(self, w):
        dplus = self.delta_eff + self.frame.delta_p
        num = self.frame.g_coupling_t**2 * dplus - self.frame.omega_eff * self.d_cav(w)
        return math.sqrt(2.0 * self.gamma_m) * num / self.d(w)

    def b4(self, w):
        return self.a3(w)

    def position_row(self, w):
        return np.array([self.a1(w), self.a2(w), self.a3(w), self.a4(w)])

    def momentum_row(self, w):
        return np.array([self.b1(w), self.b2(w), self.b3(w), self.b4(w)])


def transfer_functions(frame: TransformedFrame, delta_eff: float,
                       p: NormalizedParams) -> TransferFunctions:
    return TransferFunctions(frame=frame, delta_eff=delta_eff,
                             kappa_c=p.kappa_c, gamma_m=p.gamma_m, g0=p.g0)


def _noise_weights(frame: TransformedFrame, p: NormalizedParams):
    co = 2.0 * p.n_ph + 1.0
    cm = 2.0 * p.n_th + 1.0
    e2r = math.exp(2.0 * frame.r)
    return np.array([co, co, cm * e2r, cm / e2r])


def _spectral_setup(frame: TransformedFrame, delta_eff: float, p: NormalizedParams):
    tf = transfer_functions(frame, delta_eff, p)
    a = build_drift(frame, delta_eff, p)
    eig = np.linalg.eigvals(a)
    if np.max(eig.real) >= 0.0:
        raise UnstableSystemError(
            f"no stationary state: max Re(eig) = {np.max(eig.real):g}")
    w_cut = SPECTRAL_WINDOW * max(frame.omega_eff, p.kappa_c,
                                  abs(delta_eff) + abs(frame.delta_p), 1.0)
    freqs = sorted({abs(float(z.imag)) for z in eig if abs(z.imag) > 0.0})
    return tf, w_cut, freqs


def covariance_spectral(frame: TransformedFrame, delta_eff: float,
                        p: NormalizedParams, epsabs: float = 1e-12,
                        epsrel: float = 1e-10, limit: int = 800) -> np.ndarray:
    """Transformed-frame (q, p) covariance block from the noise spectra.

    Integrates the symmetrized spectra over [-W, W] with W set well beyond
    every resonance, then adds the analytic 1/omega^2 tail of the thermal
    contribution (the transfer of the mechanical input noise is the only one
    decaying that slowly).
    """
    tf, w_cut, freqs = _spectral_setup(frame, delta_eff, p)
    weights = _noise_weights(frame, p)

    def s_qq(w):
        row = tf.position_row(w)
        return 0.5 * float(np.dot(weights, np.abs(row) ** 2))

    def s_pp(w):
        row = tf.momentum_row(w)
        return 0.5 * float(np.dot(weights, np.abs(row) ** 2))

    def s_qp(w):
        aq = tf.position_row(w)
        bp = np.conj(tf.momentum_row(w))
        diag = 0.5 * np.dot(weights, aq * bp)
        skew = 0.5j * (aq[0] * bp[1] - aq[1] * bp[0] + aq[2] * bp[3] - aq[3] * bp[2])
        return float(np.real(diag + skew))

    pts = [f for f in freqs if 0.0 < f < w_cut]
    int_qq, _ = quad(s_qq, 0.0, w_cut, points=pts, limit=limit,
                     epsabs=epsabs, epsrel=epsrel)
    int_pp, _ = quad(s_pp, 0.0, w_cut, points=pts, limit=limit,
                     epsabs=epsabs, epsrel=epsrel)
    pts_sym = sorted({-f for f in pts} | set(pts))
    int_qp, _ = quad(s_qp, -w_cut, w_cut, points=pts_sym, limit=limit,
                     epsabs=epsabs, epsrel=epsrel)

    cm = 2.0 * p.n_th + 1.0
    e2r = math.exp(2.0 * frame.r)
    tail_qq = p.gamma_m * e2r * cm / (math.pi * w_cut)
    tail_pp = p.gamma_m / e2r * cm / (math.pi * w_cut)
    v_qq = int_qq / math.pi + tail_qq
    v_pp = int_pp / math.pi + tail_pp
    v_qp = int_qp / (2.0 * math.pi)
    return np.array([[v_qq, v_qp], [v_qp, v_pp]])


def covariance_lyapunov_qp(frame: TransformedFrame, delta_eff: float,
                           p: NormalizedParams) -> np.ndarray:
    """(q, p) block of the Lyapunov-route covariance for the same inputs."""
    a = build_drift(frame, delta_eff, p)
    d = diffusion_matrix(frame, p)
    return covariance_lyapunov(a, d)[2:, 2:]


@dataclass(frozen=True)
class FluctuationReport:
    var_q: float
    var_p: float
    var_q_t: float      # transformed frame
    var_p_t: float
    n_eff: float
    n_eff_t: float
    t_eff_k: float
    d_q_db: float
    d_p_db: float
    eta: float
    method: str
    clamped: bool
    validity: LinearizationValidity | None


def bistability_parameter(frame: TransformedFrame, delta_eff: float,
                          p: NormalizedParams) -> float:
    """Dimensionless distance from the static instability; 1 at weak coupling."""
    dplus = delta_eff + frame.delta_p
    denom = math.exp(4.0 * frame.r) * (delta_eff**2 + p.kappa_c**2 - 4.0 * p.g0**2)
    return 1.0 - frame.g_coupling**2 * dplus / denom


def report(frame: TransformedFrame, delta_eff: float, p: NormalizedParams,
           v_qp: np.ndarray, method: str,
           validity: LinearizationValidity | None = None) -> FluctuationReport:
    """Physical observables from a transformed-frame covariance block."""
    var_q_t = float(v_qp[0, 0])
    var_p_t = float(v_qp[1, 1])
    n_t = 0.5 * (var_q_t + var_p_t - 1.0)
    e2r = math.exp(2.0 * frame.r)
    var_q = (n_t + 0.5) / e2r
    var_p = (n_t + 0.5) * e2r
    n_eff = 0.5 * (var_q + var_p - 1.0)
    clamped = n_eff <= 0.0
    if clamped:
        n_eff = 0.0
        t_eff = 0.0
    else:
        t_eff = CONSTANTS.hbar * p.omega_m / (CONSTANTS.k_B * math.log1p(1.0 / n_eff))
    return FluctuationReport(
        var_q=var_q, var_p=var_p, var_q_t=var_q_t, var_p_t=var_p_t,
        n_eff=n_eff, n_eff_t=n_t, t_eff_k=t_eff,
        d_q_db=-10.0 * math.log10(2.0 * var_q),
        d_p_db=-10.0 * math.log10(2.0 * var_p),
        eta=bistability_parameter(frame, delta_eff, p),
        method=method, clamped=clamped, validity=validity,
    )


def fluctuation_report(branch: SteadyStateBranch, p: NormalizedParams,
                       method: str = "both",
                       cross_check_tol: float = 1e-6) -> FluctuationReport:
    """End-to-end report for a solved branch.

    ``method`` selects lyapunov, spectral, or both (both cross-checks the
    two routes against each other before reporting).
    """
    from .stability import transform_frame

    frame = transform_frame(branch, p)
    if method not in ("lyapunov", "spectral", "both"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("lyapunov", "both"):
        v_l = covariance_lyapunov_qp(frame, branch.delta_eff, p)
    if method in ("spectral", "both"):
        v_s = covariance_spectral(frame, branch.delta_eff, p)
    if method == "both":
        scale = np.abs(np.diag(v_l))
        err = np.max(np.abs(np.diag(v_s) - np.diag(v_l)) / scale)
        if err > cross_check_tol:
            raise RuntimeError(
                f"covariance routes disagree by {err:g} (tol {cross_check_tol:g})")
        v = v_l
    else:
        v = v_l if method == "lyapunov" else v_s
    return report(frame, branch.delta_eff, p, v, method, branch.validity)


@dataclass(frozen=True)
class ApproxVariances:
    var_q: float
    var_p: float
    eta: float
    quality_ok: bool     # mechanical quality factor large
    low_temp_ok: bool    # cavity decay dominates thermal decoherence


def approx_variances(frame: TransformedFrame, delta_eff: float,
                     p: NormalizedParams) -> ApproxVariances:
    """Closed-form variances in the large-Q, low-temperature limit
    (original frame)."""
    dplus = delta_eff + frame.delta_p
    kt = p.kappa_c + frame.kappa_p
    eta = bistability_parameter(frame, delta_eff, p)
    e2r = math.exp(2.0 * frame.r)
    e4r = e2r * e2r
    var_q = 1.0 / (4.0 * dplus) + (dplus**2 + kt**2) / (4.0 * eta * dplus * e4r)
    var_p = 0.5 * e2r + ((dplus - e2r) ** 2 + kt**2) / (4.0 * dplus)
    return ApproxVariances(
        var_q=var_q, var_p=var_p, eta=eta,
        quality_ok=p.gamma_m <= 1e-3,
        low_temp_ok=p.kappa_c > 20.0 * p.gamma_m * p.n_th,
    )


def neff_series(r: float, kappa_eff: float) -> float:
    """Phonon-number series at the optimal detuning, to the printed orders."""
    x2 = kappa_eff**2
    root = math.sqrt(1.0 + x2)
    even = 1.0 + 4.0 * r**2 + (16.0 / 3.0) * r**4
    odd = r + (8.0 / 3.0) * r**3 + (32.0 / 15.0) * r**5
    return -0.5 + 0.5 * root * even - x2 / root * odd


def neff_series_and_optimum(kappa_eff: float):
    """(series callable, optimal squeezing parameter, minimum phonon number)
    for a given total effective cavity decay over omega_m."""
    x2 = kappa_eff**2
    r_opt = 0.25 * x2 / (x2 + 1.0)
    n_min = 0.5 * (-1.0 + math.sqrt(1.0 + x2)) \
        - 0.125 * x2**2 / (1.0 + x2) ** 1.5
    return (lambda r: neff_series(r, kappa_eff)), r_opt, n_min
