import math

import numpy as np
import pytest

from optomech import (CriticalPointError, critical_intermediate,
                      critical_values_exact, critical_values_harmonic,
                      critical_values_perturbative, descartes_positive_bound,
                      multistability_test, normalize, quintic_coefficients,
                      solve_branches)

from _support import bare_params, fig3_system


@pytest.fixture
def fig34_bare():
    """The 2 MHz set without the gain medium (the configuration that
    reproduces the published critical point)."""
    return normalize(fig3_system(opa_gain=0.0, opa_phase=0.0))


# ---------------------------------------------------------------------------
# Descartes bound

def test_descartes_examples():
    assert descartes_positive_bound([1, -1, 1, -1, 1, -1]) == 5
    assert descartes_positive_bound([1, 1, 1, 1, 1, -1]) == 1
    assert descartes_positive_bound([0, 2, 0, -3]) == 1
    with pytest.raises(ValueError):
        descartes_positive_bound([0.0, 0.0])


def test_descartes_bound_against_root_oracle(rng):
    for _ in range(1000):
        coeffs = rng.normal(size=6)
        coeffs[np.abs(coeffs) < 0.05] = 0.0
        if not np.any(coeffs):
            continue
        bound = descartes_positive_bound(coeffs)
        nz = np.flatnonzero(coeffs)
        roots = np.roots(coeffs[nz[0]:]) if len(coeffs[nz[0]:]) > 1 else []
        pos = sum(1 for z in roots
                  if abs(z.imag) < 1e-9 * (1 + abs(z.real)) and z.real > 1e-12)
        assert pos <= bound
        assert (bound - pos) % 2 == 0


# ---------------------------------------------------------------------------
# discriminant structure

def test_r0_is_never_positive(rng):
    for _ in range(300):
        p = bare_params(
            g=10 ** rng.uniform(-5, -2), lam=10 ** rng.uniform(-9, -3),
            kappa_c=rng.uniform(0.05, 1.5), g0=rng.uniform(0, 0.3),
            theta=rng.uniform(0, 2 * math.pi))
        assert critical_intermediate(p).r0 <= 0.0


def test_beta_crit_is_discriminant_root(rng):
    checked = 0
    for _ in range(300):
        p = bare_params(
            g=10 ** rng.uniform(-5, -2), lam=10 ** rng.uniform(-9, -3),
            kappa_c=rng.uniform(0.05, 1.5), g0=rng.uniform(0, 0.3),
            theta=rng.uniform(0, 2 * math.pi))
        ci = critical_intermediate(p)
        if ci.delta_cub <= 0.0:
            continue
        cv = critical_values_exact(p)
        u = cv.beta_crit**2
        scale = max(abs(ci.r3 * u**3), abs(ci.r2 * u**2), abs(ci.r1 * u), abs(ci.r0))
        assert abs(ci.delta_quad(u)) < 1e-8 * scale
        checked += 1
    assert checked > 200


def test_multi_critical_case_reported_with_roots():
    # a negative cubic discriminant is reachable far outside the single-cusp
    # regime; the exact route must refuse with the real roots attached
    from optomech import MultiCriticalError
    p = bare_params(g=1.295791360447805e-05, lam=3.8644399493960495e-06,
                    kappa_c=1.3487605773265263, g0=0.2919120771261596,
                    theta=3.593798930276678)
    ci = critical_intermediate(p)
    assert ci.delta_cub <= 0.0
    with pytest.raises(MultiCriticalError) as exc:
        critical_values_exact(p)
    assert len(exc.value.roots) >= 1


# ---------------------------------------------------------------------------
# reference critical point (bare cavity, 2 MHz family)

def test_reference_delta_crit(fig34_bare):
    cv = critical_values_exact(fig34_bare)
    assert cv.delta_crit_norm == pytest.approx(0.7998, rel=1e-3)
    # tight regression against the frozen independent computation
    assert cv.beta_crit == pytest.approx(1118.2077936597723, rel=1e-10)
    assert cv.delta_crit_norm == pytest.approx(0.7997999223701678, rel=1e-10)


def test_reference_critical_power(fig34_bare):
    cv = critical_values_exact(fig34_bare)
    assert cv.p_crit_w == pytest.approx(8.116e-3, rel=0.01)
    assert cv.p_crit_w == pytest.approx(8.137622686758455e-3, rel=1e-10)


def test_exact_approaches_harmonic_as_lam_vanishes(fig34_bare):
    # leading deviation is linear in lam (coefficient ~ kbar^2): halving lam
    # must halve the relative deviation, extrapolating to the harmonic values
    ch = critical_values_harmonic(fig34_bare.with_changes(lam=0.0))
    lams = [1e-10, 1e-9, 1e-8]
    for attr in ("beta_crit", "delta_crit_norm", "p_crit_w"):
        ref = getattr(ch, attr)
        devs = [abs(getattr(critical_values_exact(fig34_bare.with_changes(lam=l)), attr)
                    - ref) / ref for l in lams]
        assert devs[0] < devs[1] < devs[2] < 1.0
        for d_small, d_big in zip(devs, devs[1:]):
            assert d_big / d_small == pytest.approx(10.0, rel=0.25)


# ---------------------------------------------------------------------------
# perturbative route

def test_perturbative_matches_harmonic_at_lam_zero(fig34_bare):
    for g0, th in ((0.0, 0.0), (0.05, 0.7), (0.02, 4.0)):
        p = fig34_bare.with_changes(lam=0.0, g0=g0, theta=th)
        ch = critical_values_harmonic(p)
        cp = critical_values_perturbative(p)
        assert cp.beta_crit == pytest.approx(ch.beta_crit, rel=1e-12)
        assert cp.delta_crit_norm == pytest.approx(ch.delta_crit_norm, rel=1e-12)
        assert cp.p_crit_w == pytest.approx(ch.p_crit_w, rel=1e-12)
        # zeroth order in closed form
        k = p.kbar
        assert cp.beta_crit == pytest.approx(k, rel=1e-12)
        assert cp.delta_crit_norm == pytest.approx(p.delta_p + 4 * p.g * k, rel=1e-12)


def test_cross_route_agreement_small_lam():
    # kbar = 10, lam = 1e-8: both routes deep inside their validity regions
    p = bare_params(g=5e-3, kappa_c=0.1, lam=1e-8)
    assert p.kbar == pytest.approx(10.0)
    ce = critical_values_exact(p)
    cp = critical_values_perturbative(p)
    assert cp.trusted
    assert ce.beta_crit == pytest.approx(cp.beta_crit, rel=1e-6)
    assert ce.delta_crit_norm == pytest.approx(cp.delta_crit_norm, rel=1e-6)
    assert ce.p_crit_w == pytest.approx(cp.p_crit_w, rel=1e-6)


def test_series_flagged_untrusted_outside_validity(fig34_bare):
    cp = critical_values_perturbative(fig34_bare)   # 16 kbar^2 lam ~ 222
    assert not cp.trusted
    assert math.isfinite(cp.beta_crit)


# ---------------------------------------------------------------------------
# harmonic route

def test_harmonic_bare_cavity_reduction():
    p = bare_params(g=2e-4, kappa_c=0.3, lam=0.0)
    cv = critical_values_harmonic(p)
    assert cv.beta_crit == pytest.approx(p.kappa_c / (2 * p.g), rel=1e-12)
    assert cv.delta_crit_norm == pytest.approx(2 * p.kappa_c, rel=1e-12)


def test_harmonic_gain_cancels_loss():
    # 2 G0 cos(theta) = kappa_c makes the effective decay vanish
    p = bare_params(g=2e-4, kappa_c=0.3, lam=0.0, g0=0.15, theta=0.0)
    cv = critical_values_harmonic(p)
    assert cv.beta_crit == 0.0
    assert cv.p_crit_w == 0.0


def test_harmonic_fig2_numeric_triple():
    # kc = 0.9 omega_m family: straight arithmetic from the closed forms
    p = bare_params(g=6.782485633958983e-5, kappa_c=0.9, lam=0.0)
    cv = critical_values_harmonic(p)
    beta = 0.9 / (2 * 6.782485633958983e-5)
    assert cv.beta_crit == pytest.approx(beta, rel=1e-12)
    assert cv.delta_crit_norm == pytest.approx(1.8, rel=1e-12)


def test_exact_requires_positive_lam(fig34_bare):
    with pytest.raises(CriticalPointError):
        critical_values_exact(fig34_bare.with_changes(lam=0.0))


# ---------------------------------------------------------------------------
# multistability margins

def test_below_threshold_power_is_not_multistable(fig34_bare):
    # 3 mW < 8.1 mW: no multistability anywhere on the response
    p = fig34_bare.with_changes(delta=0.7998)
    for b in solve_branches(p):
        res = multistability_test(p, b)
        assert not res.multistable
        assert res.margin_power < 0.0


def test_boundary_is_strict(fig34_bare):
    cv = critical_values_exact(fig34_bare)
    p = fig34_bare.with_changes(delta=cv.delta_crit_norm,
                                eps=fig34_bare.power_to_eps(cv.p_crit_w))
    branches = solve_branches(p)
    b = min(branches, key=lambda x: abs(x.beta_s - cv.beta_crit))
    res = multistability_test(p, b, cv)
    assert not res.multistable     # margins are ~0, strict inequality fails


def test_multisolution_implies_positive_margins(fig34_bare):
    # the threshold conditions are necessary: wherever three branches
    # coexist, the detuning, power and top-branch amplitude all exceed their
    # critical values (the converse holds only near the cusp)
    cv = critical_values_exact(fig34_bare)
    seen_multi = 0
    for fac in (1.1, 1.3, 1.5, 2.0):
        eps = fig34_bare.power_to_eps(fac * cv.p_crit_w)
        for delta in np.linspace(0.95 * cv.delta_crit_norm, 1.6 * cv.delta_crit_norm, 60):
            p = fig34_bare.with_changes(delta=float(delta), eps=eps)
            branches = solve_branches(p)
            if len(branches) >= 3:
                seen_multi += 1
                top = max(branches, key=lambda b: b.beta_s)
                res = multistability_test(p, top, cv)
                assert res.multistable
                assert res.margin_beta > 0
                assert res.margin_delta > 0
                assert res.margin_power > 0
    assert seen_multi >= 3


def test_vertical_tangent_at_critical_point(fig34_bare):
    cv = critical_values_exact(fig34_bare)
    p0 = fig34_bare.with_changes(eps=fig34_bare.power_to_eps(cv.p_crit_w))

    def nearest_beta(delta):
        branches = solve_branches(p0.with_changes(delta=delta))
        return min((b.beta_s for b in branches),
                   key=lambda x: abs(x - cv.beta_crit))

    h = 1e-6
    slope = (nearest_beta(cv.delta_crit_norm + h)
             - nearest_beta(cv.delta_crit_norm - h)) / (2 * h)
    assert abs(slope) > 1e3


def test_gain_direction_of_critical_power():
    # cos(theta) > 0 with sub-cancellation gain lowers the threshold power
    base = bare_params(g=2.7e-4, kappa_c=0.2, lam=1e-4, theta=math.pi / 8)
    g0s = np.linspace(0.0, 0.4 * base.kappa_c, 6)
    p_down = [critical_values_exact(base.with_changes(g0=float(v))).p_crit_w
              for v in g0s]
    assert all(a > b for a, b in zip(p_down, p_down[1:]))
    # cos(theta) < 0 raises it
    base2 = base.with_changes(theta=math.pi)
    p_up = [critical_values_exact(base2.with_changes(g0=float(v))).p_crit_w
            for v in g0s]
    assert all(a < b for a, b in zip(p_up, p_up[1:]))
