import math

import numpy as np
import pytest

from optomech import (build_drift, frame_from_values, normalize, routh_hurwitz,
                      routh_hurwitz_terms, solve_branches, solve_optimal_detuning,
                      synthetic_frame, transform_frame)

from _support import bare_params, fig5_system

# Frozen by independent substitution into the printed matrix pattern for the
# 10 MHz family point (delta = omega_m, lam = 2e-9 omega_m, P = 3 mW)
FIG5_BETA = 1608.3306380933222
FIG5_ALPHA = 12282.682550093667
FIG5_DEFF = 0.9628693499928695
FIG5_R = 0.05545083508358645
FIG5_OM = 1.1172850390017977
FIG5_GT = 0.268267741283209


def random_frame_and_params(rng):
    kc = rng.uniform(0.02, 1.5)
    gm = 10 ** rng.uniform(-6, -1.5)
    g0 = rng.uniform(0, 0.9) * kc
    th = rng.uniform(0, 2 * math.pi)
    p = bare_params(kappa_c=kc, gamma_m=gm, g0=g0, theta=th,
                    delta=rng.uniform(-3, 3))
    frame = synthetic_frame(r=rng.uniform(0, 0.5),
                            g_coupling=rng.uniform(0, 1.2),
                            delta_p=p.delta_p, kappa_p=p.kappa_p)
    return frame, p


def test_trace_is_total_decay(rng):
    for _ in range(200):
        frame, p = random_frame_and_params(rng)
        a = build_drift(frame, p.delta, p)
        assert np.trace(a) == pytest.approx(-2.0 * (p.kappa_c + p.gamma_m), rel=1e-12)


def test_bare_cavity_block_is_plain_rotation():
    p = bare_params(g0=0.0)
    frame = synthetic_frame(r=0.1, g_coupling=0.2)
    a = build_drift(frame, 0.7, p)
    assert frame.kappa_p == 0.0 and frame.delta_p == 0.0
    assert a[0, 0] == -p.kappa_c and a[1, 1] == -p.kappa_c
    assert a[0, 1] == 0.7 and a[1, 0] == -0.7


def test_decoupled_blocks_eigenvalues():
    p = bare_params(g0=0.05, theta=0.4, gamma_m=1e-4)
    frame = synthetic_frame(r=0.2, g_coupling=0.0,
                            delta_p=p.delta_p, kappa_p=p.kappa_p)
    deff = 0.9
    a = build_drift(frame, deff, p)
    eig = sorted(np.linalg.eigvals(a), key=lambda z: (z.real, z.imag))
    # mechanical pair -gamma_m +- i Omega
    mech = [z for z in eig if abs(z.real + p.gamma_m) < 1e-12]
    assert len(mech) == 2
    assert sorted(z.imag for z in mech) == pytest.approx(
        [-frame.omega_eff, frame.omega_eff], rel=1e-12)
    # optical pair -kappa_c +- sqrt(4 G0^2 - deff^2)
    disc = 4.0 * p.g0**2 - deff**2
    opt = [z for z in eig if z not in mech]
    root = math.sqrt(abs(disc))
    expect = [-p.kappa_c + 1j * root, -p.kappa_c - 1j * root] if disc < 0 else \
             [-p.kappa_c + root, -p.kappa_c - root]
    assert sorted(z.imag for z in opt) == pytest.approx(
        sorted(z.imag for z in expect), abs=1e-12)
    assert sorted(z.real for z in opt) == pytest.approx(
        sorted(z.real for z in expect), abs=1e-12)


def test_fig5_point_frame_and_drift_regression(fig5_norm):
    branches = solve_branches(fig5_norm)
    assert len(branches) == 1
    b = branches[0]
    assert b.beta_s == pytest.approx(FIG5_BETA, rel=1e-10)
    assert b.alpha_s == pytest.approx(FIG5_ALPHA, rel=1e-10)
    assert b.delta_eff == pytest.approx(FIG5_DEFF, rel=1e-10)
    frame = transform_frame(b, fig5_norm)
    assert frame.r == pytest.approx(FIG5_R, rel=1e-10)
    assert frame.omega_eff == pytest.approx(FIG5_OM, rel=1e-10)
    assert frame.g_coupling_t == pytest.approx(FIG5_GT, rel=1e-10)
    a = build_drift(frame, b.delta_eff, fig5_norm)
    expected = np.array([
        [-0.3, FIG5_DEFF, 0.0, 0.0],
        [-FIG5_DEFF, -0.3, FIG5_GT, 0.0],
        [0.0, 0.0, -1e-6, FIG5_OM],
        [FIG5_GT, 0.0, -FIG5_OM, -1e-6],
    ])
    np.testing.assert_allclose(a, expected, rtol=1e-10, atol=1e-18)


def test_no_anharmonicity_means_no_squeeze_frame():
    p = bare_params(lam=0.0)
    frame = frame_from_values(beta_s=120.0, alpha_s=40.0, p=p)
    assert frame.lam_enh == 0.0
    assert frame.r == 0.0
    assert frame.omega_eff == 1.0
    assert frame.g_coupling_t == frame.g_coupling


def test_squeeze_parameter_inverts_log():
    # 4 lam_enh = e^4 - 1  ->  r = 1
    lam_enh = 0.25 * math.expm1(4.0)
    frame = synthetic_frame(r=1.0, g_coupling=0.0)
    assert frame.lam_enh == pytest.approx(lam_enh, rel=1e-12)
    p = bare_params(lam=lam_enh / 3.0)   # beta_s = 0 gives lam_enh = 3 lam
    f2 = frame_from_values(0.0, 0.0, p)
    assert f2.r == pytest.approx(1.0, rel=1e-12)


def test_squeeze_identity_exact(rng):
    for _ in range(100):
        p = bare_params(lam=10 ** rng.uniform(-9, -3))
        beta = rng.uniform(0, 500)
        f = frame_from_values(beta, 1.0, p)
        assert math.exp(4.0 * f.r) == pytest.approx(1.0 + 4.0 * f.lam_enh, rel=1e-12)


def test_damped_decoupled_system_is_stable():
    p = bare_params(g0=0.0, gamma_m=1e-4)
    frame = synthetic_frame(r=0.0, g_coupling=0.0)
    v = routh_hurwitz(frame, 0.8, p)
    assert v.s1 > 0 and v.s2 > 0 and v.s3 > 0
    assert v.rh_stable and v.eigen_stable and not v.marginal


def test_parametric_oscillation_threshold():
    # with no optomechanical coupling the instability appears exactly where
    # the gain overcomes the loss-detuning circle: 4 G0^2 = deff^2 + kappa^2
    p0 = bare_params(g0=0.0, gamma_m=1e-4)
    deff = 0.4
    threshold = 0.5 * math.sqrt(deff**2 + p0.kappa_c**2)
    flips_rh, flips_eig = [], []
    grid = np.linspace(0.8 * threshold, 1.2 * threshold, 400)
    prev = None
    for g0 in grid:
        p = p0.with_changes(g0=float(g0), theta=0.3)
        frame = synthetic_frame(r=0.0, g_coupling=0.0,
                                delta_p=p.delta_p, kappa_p=p.kappa_p)
        v = routh_hurwitz(frame, deff, p)
        cur = (v.rh_stable, v.eigen_stable)
        assert v.rh_stable == v.eigen_stable
        if prev is not None and cur != prev:
            flips_rh.append(g0)
        prev = cur
    assert len(flips_rh) == 1
    assert flips_rh[0] == pytest.approx(threshold, rel=2e-3)


def test_rh_equals_eigenvalues_on_random_draws(rng):
    checked = 0
    for _ in range(3000):
        frame, p = random_frame_and_params(rng)
        v = routh_hurwitz(frame, p.delta, p)
        if v.marginal:
            continue
        assert v.rh_stable == v.eigen_stable
        checked += 1
        # recorded observation: with delta_eff + delta_p > 0 the third
        # condition never binds (it is positive whenever the sign holds)
        if v.delta_plus > 0:
            assert v.s3 > 0
    assert checked > 2900


def test_negative_delta_plus_can_break_s3(rng):
    # blue-side instability reached through s3 alone
    p = bare_params(g0=0.0, gamma_m=1e-5)
    frame = synthetic_frame(r=0.0, g_coupling=0.4)
    v = routh_hurwitz(frame, -0.9, p)
    assert v.delta_plus < 0
    assert v.s3 < 0
    assert not v.rh_stable and not v.eigen_stable


def test_marginal_band_reported():
    p = bare_params(g0=0.0, gamma_m=1e-16)
    frame = synthetic_frame(r=0.0, g_coupling=0.0)
    v = routh_hurwitz(frame, 0.5, p)
    assert v.marginal


def test_optimal_detuning_fixed_point(fig5_norm):
    for lam in (1e-9, 4e-9, 2e-8):
        p = fig5_norm.with_changes(lam=lam)
        res = solve_optimal_detuning(p)
        assert res.residual < 1e-8 * (1.0 + res.frame.omega_eff)
        assert res.branch.delta_eff == pytest.approx(res.frame.omega_eff, rel=1e-8)
        # the re-solved branch satisfies the amplitude polynomial
        assert res.branch.residual < 1e-9
