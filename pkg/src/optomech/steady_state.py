"""Steady-state branches of the mean-field equations.

The mechanical amplitude beta_s of a steady state satisfies a quintic whose
coefficients follow from eliminating the intracavity amplitude between the
two mean-field fixed-point conditions.  All real positive roots are physical
branches; their linear stability is decided by the drift-matrix machinery in
:mod:`optomech.stability`.  A deterministic mean-field ODE integrator provides
the dynamical cross-check that every attractor is a stable branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .parameters import NormalizedParams

#: |Im(root)| < REAL_ROOT_TOL * (1 + |Re(root)|) counts as a real root.
REAL_ROOT_TOL = 1e-8
#: band in which a conjugate pair may still be a fold-point double root
NEAR_REAL_BAND = 1e-5
#: branches closer than this (relative) are flagged near-degenerate
NEAR_DEGENERATE_TOL = 1e-6
#: ODE state magnitude treated as divergence
OVERFLOW_GUARD = 1e9


@dataclass(frozen=True)
class LinearizationValidity:
    """Flags for the small-fluctuation treatment around a branch."""

    beta_large: bool
    duffing_small: bool
    ratio_spring: float     # lam*beta_s / Lambda_enh
    ratio_coupling: float   # lam*beta_s / G_coupling
    beta_threshold: float = 40.0
    ratio_threshold: float = 0.1


def linearization_validity(beta_s: float, alpha_s: float, p: NormalizedParams,
                           beta_threshold: float = 40.0,
                           ratio_threshold: float = 0.1) -> LinearizationValidity:
    lam_enh = 3.0 * p.lam * (1.0 + 4.0 * beta_s**2)
    g_coupling = 2.0 * p.g * alpha_s
    num = p.lam * beta_s
    ratio_spring = num / lam_enh if lam_enh > 0 else 0.0
    ratio_coupling = num / g_coupling if g_coupling > 0 else math.inf if num > 0 else 0.0
    return LinearizationValidity(
        beta_large=beta_s >= beta_threshold,
        duffing_small=(ratio_spring < ratio_threshold and ratio_coupling < ratio_threshold),
        ratio_spring=ratio_spring, ratio_coupling=ratio_coupling,
        beta_threshold=beta_threshold, ratio_threshold=ratio_threshold,
    )


@dataclass(frozen=True)
class SteadyStateBranch:
    """One real steady-state solution with its stability verdict."""

    beta_s: float
    alpha_s: float
    delta_eff: float          # Delta - 2 g beta_s, omega_m units
    i_a: float                # alpha_s**2
    stable: bool
    marginal: bool
    eigenvalues: tuple        # 4 complex drift-matrix eigenvalues
    residual: float           # |quintic(beta_s)| / max|coefficient|
    near_degenerate: bool
    validity: LinearizationValidity


def quintic_coefficients(p: NormalizedParams) -> np.ndarray:
    """Coefficients (degree 5 -> 0) of the amplitude polynomial in beta_s.

    With d0 = Delta - 2 G0 sin(theta) and kb = kappa_c - 2 G0 cos(theta):

        64 g^2 L b^5 - 64 g L d0 b^4
        + 4 [g^2 (1 + 12 L) + 4 L (kb^2 + d0^2)] b^3
        - 4 g (1 + 12 L) d0 b^2
        + (1 + 12 L)(d0^2 + kb^2) b - g eps^2

    (omega_m = 1 units; L is the duffing strength).  The leading two
    coefficients vanish identically for L = 0, degrading to the cubic case.
    """
    g, lam, eps = p.g, p.lam, p.eps
    d0 = p.delta - p.delta_p
    kb = p.kappa_bar
    w12 = 1.0 + 12.0 * lam
    return np.array([
        64.0 * g**2 * lam,
        -64.0 * g * lam * d0,
        4.0 * (g**2 * w12 + 4.0 * lam * (kb**2 + d0**2)),
        -4.0 * g * w12 * d0,
        w12 * (d0**2 + kb**2),
        -g * eps**2,
    ])


def _polish_root(coeffs: np.ndarray, x: float, iterations: int = 2) -> float:
    deriv = np.polyder(coeffs)
    for _ in range(iterations):
        fx = np.polyval(coeffs, x)
        dfx = np.polyval(deriv, x)
        if dfx == 0.0:
            break
        step = fx / dfx
        if not np.isfinite(step):
            break
        x = x - step
    return x


def _noise_floor(coeffs: np.ndarray, x: float) -> float:
    """Float evaluation noise of the polynomial at x."""
    return 64.0 * np.finfo(float).eps * float(np.polyval(np.abs(coeffs), abs(x)))


def _real_positive_roots(coeffs: np.ndarray, tol: float) -> list[float]:
    nz = np.flatnonzero(coeffs != 0.0)
    if nz.size == 0:
        raise ValueError("all-zero polynomial has no defined roots")
    trimmed = coeffs[nz[0]:]
    if trimmed.size == 1:
        return []
    roots = np.roots(trimmed)
    out = []
    for z in roots:
        im_scale = 1.0 + abs(z.real)
        if abs(z.imag) < tol * im_scale:
            x = _polish_root(trimmed, float(z.real))
        elif abs(z.imag) < NEAR_REAL_BAND * im_scale:
            # fold-point double roots split into a conjugate pair under
            # coefficient rounding; recover the real root when polishing
            # stays within the splitting scale and lands at the evaluation
            # noise floor (Newton is linear at a double root, hence the
            # extra iterations)
            x = _polish_root(trimmed, float(z.real), iterations=40)
            if abs(x - z.real) > 8.0 * abs(z.imag) + tol * (1.0 + abs(x)):
                continue
            if abs(np.polyval(trimmed, x)) > _noise_floor(trimmed, x):
                continue
        else:
            continue
        if x < -tol:
            continue
        out.append(max(x, 0.0))
    out.sort()
    return out


def solve_branches(p: NormalizedParams, tol_root: float = REAL_ROOT_TOL) -> list[SteadyStateBranch]:
    """All physical steady-state branches, sorted by beta_s ascending.

    Stability is evaluated from the drift-matrix eigenvalues of each branch.
    An empty list is only possible for unphysical inputs (negative effective
    response); with eps = 0 the single branch beta_s = 0 is returned.
    """
    from .stability import evaluate_branch_stability  # deferred: avoids import cycle

    coeffs = quintic_coefficients(p)
    scale = np.max(np.abs(coeffs))
    betas = _real_positive_roots(coeffs, tol_root)

    kb = p.kappa_bar
    dp = p.delta_p
    branches = []
    for i, b in enumerate(betas):
        near = False
        if i > 0 and abs(b - betas[i - 1]) < NEAR_DEGENERATE_TOL * (1.0 + abs(b)):
            near = True
        if i + 1 < len(betas) and abs(betas[i + 1] - b) < NEAR_DEGENERATE_TOL * (1.0 + abs(b)):
            near = True
        delta_eff = p.delta - 2.0 * p.g * b
        denom = (delta_eff - dp) ** 2 + kb**2
        alpha = p.eps / math.sqrt(denom) if denom > 0 else math.inf
        residual = abs(np.polyval(coeffs, b)) / scale if scale > 0 else 0.0
        validity = linearization_validity(b, alpha, p)
        stable, marginal, eigvals = evaluate_branch_stability(b, alpha, delta_eff, p)
        branches.append(SteadyStateBranch(
            beta_s=b, alpha_s=alpha, delta_eff=delta_eff, i_a=alpha**2,
            stable=stable, marginal=marginal, eigenvalues=tuple(eigvals),
            residual=residual, near_degenerate=near, validity=validity,
        ))
    return branches


def branch_drive_phase(branch: SteadyStateBranch, p: NormalizedParams) -> float:
    """Drive phase that makes this branch's intracavity amplitude real positive.

    With parametric gain present, each branch corresponds to its own drive
    phase; without gain the phase is a gauge choice and irrelevant.
    """
    return math.atan2(branch.delta_eff - p.delta_p, p.kappa_bar)


@dataclass
class MeanFieldTrajectory:
    t: np.ndarray
    a: np.ndarray          # complex intracavity amplitude(s)
    b: np.ndarray          # complex mechanical amplitude(s)
    diverged: bool
    converged: bool        # |vector field| at the final state below tolerance


def _mean_field_rhs(p: NormalizedParams, drive_phase: float):
    g, lam, kc, gm, g0, th, delta = p.g, p.lam, p.kappa_c, p.gamma_m, p.g0, p.theta, p.delta
    eps_c = p.eps * np.exp(1j * drive_phase)
    gain = 2.0 * g0 * np.exp(1j * th)

    def rhs(a, b):
        big_b = 2.0 * np.real(b)
        da = -(kc + 1j * delta) * a + 1j * g * a * big_b + gain * np.conj(a) + eps_c
        db = -(gm + 1j) * b - 2j * lam * (big_b**3 + 3.0 * big_b) + 1j * g * np.abs(a) ** 2
        return da, db

    return rhs


def _pack(a, b):
    return np.concatenate([np.real(a), np.imag(a), np.real(b), np.imag(b)])


def _unpack(y, n):
    return y[0:n] + 1j * y[n:2 * n], y[2 * n:3 * n] + 1j * y[3 * n:4 * n]


def integrate_mean_field(p: NormalizedParams, initial, t_end: float,
                         rtol: float = 1e-9, atol: float | None = None,
                         drive_phase: float = 0.0,
                         n_samples: int = 200) -> MeanFieldTrajectory:
    """Integrate the deterministic mean-field equations.

    ``initial`` is either one ``(a0, b0)`` pair of complex amplitudes or a
    pair of equal-length arrays (a batch of seeds integrated as one system).
    Time is in 1/omega_m units.  A state exceeding the overflow guard stops
    the run and is reported as diverged ("no attractor from this seed")
    rather than raising.
    """
    a0 = np.atleast_1d(np.asarray(initial[0], dtype=complex))
    b0 = np.atleast_1d(np.asarray(initial[1], dtype=complex))
    if a0.shape != b0.shape:
        raise ValueError("initial a and b must have identical shapes")
    n = a0.size
    rhs = _mean_field_rhs(p, drive_phase)

    def f(t, y):
        a, b = _unpack(y, n)
        da, db = rhs(a, b)
        return _pack(da, db)

    def overflow(t, y):
        return np.max(np.abs(y)) - OVERFLOW_GUARD
    overflow.terminal = True
    overflow.direction = 1.0

    if atol is None:
        atol = rtol * 1e-2
    t_eval = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(f, (0.0, t_end), _pack(a0, b0), method="DOP853",
                    rtol=rtol, atol=atol, events=overflow, t_eval=t_eval,
                    dense_output=False)
    diverged = bool(sol.t_events[0].size)
    a_t, b_t = _unpack(sol.y, n)
    a_fin, b_fin = a_t[..., -1], b_t[..., -1]
    da, db = rhs(a_fin, b_fin)
    speed = np.sqrt(np.abs(da) ** 2 + np.abs(db) ** 2)
    size = np.sqrt(np.abs(a_fin) ** 2 + np.abs(b_fin) ** 2)
    converged = bool(np.all(speed <= 1e-9 * (1.0 + size))) and not diverged
    return MeanFieldTrajectory(t=sol.t, a=a_t, b=b_t, diverged=diverged, converged=converged)


def match_attractor(a_final: complex, b_final: complex,
                    branches: list[SteadyStateBranch],
                    tol: float = 1e-6) -> int | None:
    """Index of the stable branch matching a converged fixed point, else None.

    The comparison uses Re<b> against beta_s and |<a>| against alpha_s with
    relative scaling: the imaginary part of <b> is slaved to the mechanical
    damping and does not identify the branch.
    """
    beta = float(np.real(b_final))
    amag = float(np.abs(a_final))
    for i, br in enumerate(branches):
        if not br.stable:
            continue
        ok_b = abs(beta - br.beta_s) <= tol * max(1.0, abs(br.beta_s))
        ok_a = abs(amag - br.alpha_s) <= tol * max(1.0, br.alpha_s)
        if ok_b and ok_a:
            return i
    return None
