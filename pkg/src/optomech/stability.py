"""Linear stability of a steady-state branch.

The quadratic mechanical parametric term generated by the anharmonicity is
removed by a single-mode squeezing transformation with parameter
r = ln(1 + 4*Lambda_enh)/4, after which the fluctuation dynamics is a plain
four-dimensional linear system du = A u dt + noise in the quadrature order
(x, y, q, p).  Stability is decided two ways: directly from the eigenvalues
of A (ground truth) and from the three Routh-Hurwitz combinations s1, s2, s3
of its characteristic polynomial, which tests record against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .parameters import NormalizedParams
from .steady_state import SteadyStateBranch, quintic_coefficients, solve_branches

#: |max Re eigenvalue| below this (omega_m units) counts as marginal
MARGINAL_BAND = 1e-12


class FixedPointError(RuntimeError):
    """Self-consistent detuning constraint did not converge."""


@dataclass(frozen=True)
class TransformedFrame:
    """Squeezed-frame quantities entering the linear fluctuation dynamics."""

    lam_enh: float     # 3 lam (1 + 4 beta_s^2)
    r: float           # squeezing parameter, ln(1 + 4 lam_enh)/4
    omega_eff: float   # e^{2r} (omega_m units)
    g_coupling: float  # 2 g alpha_s
    g_coupling_t: float  # e^{-r} * g_coupling
    delta_p: float     # 2 G0 sin(theta)
    kappa_p: float     # 2 G0 cos(theta)


def transform_frame(branch: SteadyStateBranch, p: NormalizedParams) -> TransformedFrame:
    return frame_from_values(branch.beta_s, branch.alpha_s, p)


def frame_from_values(beta_s: float, alpha_s: float, p: NormalizedParams) -> TransformedFrame:
    lam_enh = 3.0 * p.lam * (1.0 + 4.0 * beta_s**2)
    r = 0.25 * math.log1p(4.0 * lam_enh)
    g_coupling = 2.0 * p.g * alpha_s
    return TransformedFrame(
        lam_enh=lam_enh, r=r, omega_eff=math.exp(2.0 * r),
        g_coupling=g_coupling, g_coupling_t=math.exp(-r) * g_coupling,
        delta_p=p.delta_p, kappa_p=p.kappa_p,
    )


def synthetic_frame(r: float, g_coupling: float, delta_p: float = 0.0,
                    kappa_p: float = 0.0) -> TransformedFrame:
    """Frame with directly imposed squeezing and coupling (no steady state
    behind it); used for exercising the moment machinery on its own."""
    return TransformedFrame(
        lam_enh=0.25 * math.expm1(4.0 * r), r=r, omega_eff=math.exp(2.0 * r),
        g_coupling=g_coupling, g_coupling_t=math.exp(-r) * g_coupling,
        delta_p=delta_p, kappa_p=kappa_p,
    )


def build_drift(frame: TransformedFrame, delta_eff: float, p: NormalizedParams) -> np.ndarray:
    """4x4 drift matrix in (x, y, q, p) order, omega_m units."""
    kc, gm = p.kappa_c, p.gamma_m
    dp, kp = frame.delta_p, frame.kappa_p
    gt, om = frame.g_coupling_t, frame.omega_eff
    return np.array([
        [-(kc - kp), delta_eff + dp, 0.0, 0.0],
        [-(delta_eff - dp), -(kc + kp), gt, 0.0],
        [0.0, 0.0, -gm, om],
        [gt, 0.0, -om, -gm],
    ])


@dataclass(frozen=True)
class StabilityVerdict:
    s1: float
    s2: float
    s3: float
    eigen_stable: bool
    rh_stable: bool
    marginal: bool
    delta_plus: float      # delta_eff + delta_p; the analysis assumes > 0
    max_re: float
    eigenvalues: tuple


def routh_hurwitz_terms(frame: TransformedFrame, delta_eff: float,
                        p: NormalizedParams) -> tuple[float, float, float]:
    """The three sign conditions for a Hurwitz-stable drift matrix.

    s1 and s2 are the second Hurwitz minor (halved) and the constant
    coefficient of the characteristic polynomial; s3 is the third minor
    (quartered), written out in the cavity/mechanical rates.
    """
    kc, gm = p.kappa_c, p.gamma_m
    g0 = p.g0
    om2 = frame.omega_eff**2          # e^{4r} omega_m^2
    gbar2 = frame.g_coupling**2
    dplus = delta_eff + frame.delta_p
    s_opt = delta_eff**2 + kc**2 - 4.0 * g0**2
    s1 = gm * ((2.0 * kc + gm) ** 2 + om2) + kc * s_opt
    s2 = s_opt * (om2 + gm**2) - dplus * gbar2
    s3 = gm * kc * ((s_opt - om2 + gm * (gm + 2.0 * kc)) ** 2
                    + 4.0 * (gm + kc) ** 2 * om2) \
        + (gm + kc) ** 2 * dplus * gbar2
    return s1, s2, s3


def routh_hurwitz(frame: TransformedFrame, delta_eff: float,
                  p: NormalizedParams) -> StabilityVerdict:
    s1, s2, s3 = routh_hurwitz_terms(frame, delta_eff, p)
    a = build_drift(frame, delta_eff, p)
    eig = np.linalg.eigvals(a)
    max_re = float(np.max(eig.real))
    return StabilityVerdict(
        s1=s1, s2=s2, s3=s3,
        eigen_stable=max_re < -MARGINAL_BAND,
        rh_stable=(s1 > 0.0 and s2 > 0.0 and s3 > 0.0),
        marginal=abs(max_re) <= MARGINAL_BAND,
        delta_plus=delta_eff + frame.delta_p,
        max_re=max_re, eigenvalues=tuple(eig),
    )


def evaluate_branch_stability(beta_s: float, alpha_s: float, delta_eff: float,
                              p: NormalizedParams):
    """(stable, marginal, eigenvalues) for a raw steady-state solution."""
    frame = frame_from_values(beta_s, alpha_s, p)
    a = build_drift(frame, delta_eff, p)
    eig = np.linalg.eigvals(a)
    max_re = float(np.max(eig.real))
    return max_re < -MARGINAL_BAND, abs(max_re) <= MARGINAL_BAND, eig


def _cubic_amplitude(p: NormalizedParams, alpha_sq: float) -> float:
    """Real root of 16 lam b^3 + (1 + 12 lam) b = g alpha_sq (unique for lam >= 0)."""
    w12 = 1.0 + 12.0 * p.lam
    rhs = p.g * alpha_sq
    if p.lam == 0.0:
        return rhs / w12
    roots = np.roots([16.0 * p.lam, 0.0, w12, -rhs])
    real = [float(z.real) for z in roots if abs(z.imag) < 1e-10 * (1.0 + abs(z.real))]
    if not real:
        raise FixedPointError("amplitude cubic lost its real root")
    return max(real)


@dataclass(frozen=True)
class OptimalDetuningResult:
    params: NormalizedParams     # input params with delta set to the solution
    branch: SteadyStateBranch
    frame: TransformedFrame
    residual: float              # |delta_eff - omega_eff| at the solution
    iterations: int


def solve_optimal_detuning(p: NormalizedParams, relax: float = 0.5,
                           max_iter: int = 200, tol: float = 1e-10) -> OptimalDetuningResult:
    """Choose the bare detuning so the branch sits at delta_eff = omega_eff.

    With the effective detuning pinned, the intracavity amplitude is an
    explicit function of beta_s, so the constraint closes into a scalar
    fixed-point problem solved by damped iteration; a bracketing root solve
    on beta_s is the fallback.
    """
    kb2 = p.kappa_bar**2
    dp = p.delta_p

    def next_beta(beta: float) -> float:
        fr = frame_from_values(beta, 0.0, p)
        alpha_sq = p.eps**2 / ((fr.omega_eff - dp) ** 2 + kb2)
        return _cubic_amplitude(p, alpha_sq)

    beta = next_beta(0.0)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        new = next_beta(beta)
        if abs(new - beta) <= tol * (1.0 + abs(beta)):
            beta = new
            converged = True
            break
        beta = (1.0 - relax) * beta + relax * new
    if not converged:
        from scipy.optimize import brentq
        hi = max(2.0 * beta, 1.0)
        while next_beta(hi) > hi:
            hi *= 2.0
            if hi > 1e12:
                raise FixedPointError("optimal-detuning constraint has no bracket")
        beta = brentq(lambda b: next_beta(b) - b, 0.0, hi, xtol=tol, rtol=4e-16)

    fr = frame_from_values(beta, 0.0, p)
    delta = fr.omega_eff + 2.0 * p.g * beta
    p_opt = p.with_changes(delta=delta)
    branches = solve_branches(p_opt)
    if not branches:
        raise FixedPointError("no steady-state branch at the optimal detuning")
    branch = min(branches, key=lambda b: abs(b.beta_s - beta))
    frame = transform_frame(branch, p_opt)
    residual = abs(branch.delta_eff - frame.omega_eff)
    if residual > 1e-6 * (1.0 + frame.omega_eff):
        # the quintic re-solve landed on a different branch than the iteration
        raise FixedPointError(f"optimal-detuning residual {residual:g}")
    return OptimalDetuningResult(params=p_opt, branch=branch, frame=frame,
                                 residual=residual, iterations=it)
