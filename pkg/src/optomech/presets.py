"""Built-in sweep recipes for the standard figure set.

Each preset encodes one published-figure protocol as a list of
(series label, SweepSpec) pairs; where a recipe inherits parameters from an
earlier one the chain is resolved explicitly here, and the resolved values
are frozen in a fixture file audited by the test suite.  Values a legend
would normally carry (series lists, axis windows) that the protocol leaves
open are chosen here and marked "chosen" in the fixture.
"""

from __future__ import annotations

import math
from dataclasses import replace

from .parameters import SystemParams
from .sweep import SweepSpec

TWO_PI = 2.0 * math.pi

# 5 MHz resonator family: millimetre cavity, green drive, finesse-defined decay
_BASE_5MHZ = SystemParams(
    cavity_length=1e-3, laser_wavelength=512e-9, input_power=3e-3,
    effective_mass=5e-12, mech_freq=TWO_PI * 5e6, quality_factor=1e5,
    duffing=0.0, opa_gain=0.0, opa_phase=0.0, bare_detuning=0.0,
    bath_temp=25e-3, finesse=1.67e4,
)

# 2 MHz family: explicit decay 0.2 omega_m, gain medium at 0.3 kappa_c
_W2 = TWO_PI * 2e6
_BASE_2MHZ = replace(
    _BASE_5MHZ, mech_freq=_W2, finesse=None, cavity_decay=0.2 * _W2,
    opa_gain=0.3 * 0.2 * _W2, opa_phase=math.pi / 8.0,
)

# 10 MHz good-cavity family: decay 0.3 omega_m, high Q, infrared drive
_W10 = TWO_PI * 1e7
_BASE_10MHZ = replace(
    _BASE_5MHZ, mech_freq=_W10, quality_factor=1e6, laser_wavelength=1064e-9,
    finesse=None, cavity_decay=0.3 * _W10, opa_gain=0.0, opa_phase=0.0,
)


def _lam_series(base: SystemParams, lams, spec_kw) -> list[tuple[str, SweepSpec]]:
    out = []
    for lam in lams:
        fixed = replace(base, duffing=lam * base.mech_freq)
        label = f"lam={lam:g}"
        out.append((label, SweepSpec(fixed=fixed, series=label, **spec_kw)))
    return out


def _power_series(base: SystemParams, powers_mw, spec_kw) -> list[tuple[str, SweepSpec]]:
    out = []
    for mw in powers_mw:
        fixed = replace(base, input_power=mw * 1e-3)
        label = f"p_in={mw:g}mW"
        out.append((label, SweepSpec(fixed=fixed, series=label, **spec_kw)))
    return out


def _fig2():
    kw = dict(axis="delta", start=0.0, stop=3.0, points=401, outputs=("critical",))
    return _lam_series(_BASE_5MHZ, [0.0, 1e-5, 1e-4], kw)


def _fig3():
    kw = dict(axis="delta", start=0.0, stop=2.5, points=401, outputs=("critical",))
    return _lam_series(_BASE_2MHZ, [0.0, 1e-5, 1e-4], kw)


def _fig4():
    base = replace(_BASE_2MHZ, duffing=1e-4 * _W2, bare_detuning=0.7998 * _W2)
    kw = dict(axis="p_in", start=0.0, stop=20e-3, points=201, outputs=("critical",))
    out = []
    for th in (0.0, math.pi / 8.0, math.pi / 2.0, 5.0 * math.pi / 3.0):
        fixed = replace(base, opa_phase=th)
        label = f"theta={th:g}"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    for frac in (0.0, 0.15, 0.3, 0.45):
        fixed = replace(base, opa_phase=5.0 * math.pi / 3.0, opa_gain=frac * 0.2 * _W2)
        label = f"g0={frac:g}kc"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    return out


def _fig5():
    kw = dict(axis="delta", start=0.05, stop=2.5, points=246, outputs=("fluctuations",))
    return _lam_series(_BASE_10MHZ, [0.0, 1e-9, 2e-9, 4e-9], kw)


def _fig6():
    return _fig5()


def _fig7():
    kw = dict(axis="lam", start=1e-11, stop=1e-7, points=57, scale="log",
              constraint="optimal_detuning", outputs=("fluctuations",))
    return _power_series(_BASE_10MHZ, [3, 5, 8, 12], kw)


def _fig8():
    kw = dict(axis="lam", start=1e-11, stop=3e-6, points=66, scale="log",
              constraint="optimal_detuning", outputs=("fluctuations",))
    return _power_series(_BASE_10MHZ, [3, 5, 8, 12], kw)


def _fig9():
    kw = dict(axis="lam", start=1e-11, stop=1e-7, points=57, scale="log",
              constraint="optimal_detuning", outputs=("fluctuations",))
    out = []
    for th in (0.0, math.pi / 2.0, math.pi, 1.3 * math.pi):
        fixed = replace(_BASE_10MHZ, opa_gain=0.3 * 0.3 * _W10, opa_phase=th)
        label = f"theta={th:g}"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    out.append(("g0=0", SweepSpec(fixed=_BASE_10MHZ, series="g0=0", **kw)))
    return out


def _fig10():
    kw = dict(axis="delta", start=0.05, stop=2.5, points=201, outputs=("fluctuations",))
    combos = [(0.0, 0.0, "g0=0"), (0.3, math.pi, "g0=0.3kc,theta=pi"),
              (0.3, 1.3 * math.pi, "g0=0.3kc,theta=1.3pi"),
              (0.6, 0.71 * math.pi, "g0=0.6kc,theta=0.71pi")]
    out = []
    for lam, panel in ((0.0, "a"), (4e-9, "b")):
        for frac, th, tag in combos:
            fixed = replace(_BASE_10MHZ, duffing=lam * _W10,
                            opa_gain=frac * 0.3 * _W10, opa_phase=th)
            label = f"{panel}:{tag}"
            out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    return out


def _fig11():
    kw = dict(axis="lam", start=1e-10, stop=1e-6, points=57, scale="log",
              constraint="optimal_detuning", outputs=("fluctuations",))
    out = []
    for th in (0.0, math.pi / 2.0, math.pi, 3.0 * math.pi / 2.0):
        fixed = replace(_BASE_10MHZ, opa_gain=0.3 * _W10, opa_phase=th)
        label = f"a:theta={th:g}"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    out.append(("a:g0=0", SweepSpec(fixed=_BASE_10MHZ, series="a:g0=0", **kw)))
    for frac in (0.0, 0.7, 1.2, 1.6, 2.8):
        fixed = replace(_BASE_10MHZ, opa_gain=frac * 0.3 * _W10, opa_phase=0.0)
        label = f"b:g0={frac:g}kc"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    return out


def _fig12():
    kw = dict(axis="delta", start=0.5, stop=6.0, points=221,
              outputs=("fluctuations",), restrict_beta_large=True)
    out = []
    for frac in (0.0, 0.3, 0.6):
        fixed = replace(_BASE_10MHZ, duffing=1e-4 * _W10,
                        opa_gain=frac * 0.3 * _W10, opa_phase=math.pi / 2.0)
        label = f"g0={frac:g}kc"
        out.append((label, SweepSpec(fixed=fixed, series=label, **kw)))
    return out


_PRESETS = {
    "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5, "fig6": _fig6,
    "fig7": _fig7, "fig8": _fig8, "fig9": _fig9, "fig10": _fig10,
    "fig11": _fig11, "fig12": _fig12,
}

PRESET_NAMES = tuple(sorted(_PRESETS, key=lambda s: int(s[3:])))

#: base parameter sets exposed for the CLI's --base option
BASES = {"fig2": _BASE_5MHZ, "fig3": _BASE_2MHZ, "fig5": _BASE_10MHZ}


def figure_preset(name: str) -> list[tuple[str, SweepSpec]]:
    """Series list for a named figure recipe."""
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown figure preset {name!r}; known: {PRESET_NAMES}") from None
    return builder()


def preset_fingerprint(name: str) -> list[dict]:
    """Flat, JSON-stable description of a preset (audited against the frozen
    fixture in the test suite)."""
    out = []
    for label, spec in figure_preset(name):
        f = spec.fixed
        out.append({
            "series": label, "axis": spec.axis, "start": spec.start,
            "stop": spec.stop, "points": spec.points, "scale": spec.scale,
            "constraint": spec.constraint, "outputs": list(spec.outputs),
            "restrict_beta_large": spec.restrict_beta_large,
            "cavity_length_m": f.cavity_length,
            "laser_wavelength_m": f.laser_wavelength,
            "input_power_w": f.input_power,
            "effective_mass_kg": f.effective_mass,
            "mech_freq_hz": f.mech_freq / TWO_PI,
            "quality_factor": f.quality_factor,
            "duffing_over_omegam": f.duffing / f.mech_freq,
            "opa_gain_over_omegam": f.opa_gain / f.mech_freq,
            "opa_phase_rad": f.opa_phase,
            "bare_detuning_over_omegam": f.bare_detuning / f.mech_freq,
            "bath_temp_k": f.bath_temp,
            "kappa_over_omegam": f.kappa_c / f.mech_freq,
        })
    return out
