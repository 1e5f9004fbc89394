"""Parameter-sweep orchestration and CSV/JSON emission.

A sweep varies one parameter over a grid with everything else fixed, solves
every steady-state branch at each point, attaches stability, critical-margin
and (optionally) fluctuation observables, and emits one row per
(axis value, branch).  Branch identities are matched between adjacent grid
points by nearest amplitude so hysteresis curves can be traced through the
output.

Output is deterministic: rows are sorted by axis value before emission and
floats are written with shortest round-trip repr, so identical specs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import permutations

import numpy as np

from .criticality import CriticalPointError, critical_values, multistability_test
from .fluctuations import UnstableSystemError, fluctuation_report
from .parameters import NormalizedParams, ParameterError, SystemParams, normalize
from .stability import FixedPointError, routh_hurwitz, solve_optimal_detuning, transform_frame
from .steady_state import solve_branches

AXES = ("delta", "p_in", "lam", "g0", "theta")
OUTPUT_GROUPS = ("critical", "fluctuations")

#: fixed column order of every sweep row
COLUMNS = [
    "series", "axis", "axis_value", "branch_id", "branch_index", "n_branches",
    "beta_s", "alpha_s", "i_a", "delta_eff", "stable", "marginal",
    "near_degenerate", "eig_max_re", "s1", "s2", "s3",
    "beta_crit", "delta_crit_norm", "p_crit_w",
    "margin_beta", "margin_delta", "margin_power_w", "multistable",
    "selected", "r", "lam_enh", "omega_eff", "g_coupling",
    "var_q", "var_p", "var_q_t", "var_p_t", "n_eff", "n_eff_t", "t_eff_k",
    "d_q_db", "d_p_db", "eta", "beta_large", "duffing_small", "status",
]


@dataclass(frozen=True)
class SweepSpec:
    axis: str                       # one of AXES
    start: float                    # delta/lam/g0 in omega_m units, p_in in W
    stop: float
    points: int
    fixed: SystemParams
    scale: str = "linear"           # linear | log
    constraint: str = "none"        # none | optimal_detuning
    outputs: tuple = OUTPUT_GROUPS  # column groups beyond the branch basics
    branch_select: int | None = None   # index override for the reported branch
    restrict_beta_large: bool = False  # drop rows whose selected branch has beta_s < 40
    series: str = ""
    method: str = "lyapunov"        # covariance route used in sweep rows

    def __post_init__(self):
        if self.axis not in AXES:
            raise ParameterError(f"unknown sweep axis {self.axis!r}; use one of {AXES}")
        if self.points < 2 and not (self.points == 1 and self.start == self.stop):
            raise ParameterError("a sweep needs at least 2 points")
        if self.scale not in ("linear", "log"):
            raise ParameterError("scale must be linear or log")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ParameterError("log scale needs a positive range")
        if self.constraint not in ("none", "optimal_detuning"):
            raise ParameterError(f"unknown constraint {self.constraint!r}")
        if self.constraint == "optimal_detuning" and self.axis == "delta":
            raise ParameterError("cannot sweep delta while constraining the detuning")
        for group in self.outputs:
            if group not in OUTPUT_GROUPS:
                raise ParameterError(f"unknown output group {group!r}")

    def axis_values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.start])
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def apply_axis(sp: SystemParams, axis: str, value: float) -> SystemParams:
    w = sp.mech_freq
    if axis == "delta":
        return replace(sp, bare_detuning=value * w)
    if axis == "p_in":
        return replace(sp, input_power=value)
    if axis == "lam":
        return replace(sp, duffing=value * w)
    if axis == "g0":
        return replace(sp, opa_gain=value * w)
    if axis == "theta":
        return replace(sp, opa_phase=value)
    raise ParameterError(f"unknown axis {axis!r}")


def _nan_fill(row: dict) -> dict:
    for c in COLUMNS:
        row.setdefault(c, math.nan)
    return row


def _compute_point(args) -> list[dict]:
    spec, value = args
    notes = []
    base = {"series": spec.series, "axis": spec.axis, "axis_value": float(value)}
    try:
        sp = apply_axis(spec.fixed, spec.axis, float(value))
        p = normalize(sp)
    except ParameterError as exc:
        return [_nan_fill({**base, "branch_index": 0, "status": f"invalid: {exc}"})]

    if spec.constraint == "optimal_detuning":
        try:
            opt = solve_optimal_detuning(p)
            p = opt.params
        except (FixedPointError, ValueError) as exc:
            return [_nan_fill({**base, "branch_index": 0,
                               "status": f"fixed-point failed: {exc}"})]

    branches = solve_branches(p)
    if not branches:
        return [_nan_fill({**base, "branch_index": 0, "status": "no steady state"})]

    cv = None
    if "critical" in spec.outputs:
        try:
            cv = critical_values(p)
        except CriticalPointError as exc:
            notes.append(f"critical: {exc}")

    stable_idx = [i for i, b in enumerate(branches) if b.stable]
    if spec.branch_select is not None:
        selected = spec.branch_select if 0 <= spec.branch_select < len(branches) else None
        if selected is None:
            notes.append("branch override out of range")
    elif stable_idx:
        selected = max(stable_idx, key=lambda i: branches[i].i_a)
    else:
        selected = None
        notes.append("no stable branch")

    rows = []
    for i, b in enumerate(branches):
        frame = transform_frame(b, p)
        verdict = routh_hurwitz(frame, b.delta_eff, p)
        row = {
            **base, "branch_index": i, "n_branches": len(branches),
            "beta_s": b.beta_s, "alpha_s": b.alpha_s, "i_a": b.i_a,
            "delta_eff": b.delta_eff, "stable": b.stable, "marginal": b.marginal,
            "near_degenerate": b.near_degenerate, "eig_max_re": verdict.max_re,
            "s1": verdict.s1, "s2": verdict.s2, "s3": verdict.s3,
            "selected": i == selected, "r": frame.r, "lam_enh": frame.lam_enh,
            "omega_eff": frame.omega_eff, "g_coupling": frame.g_coupling,
            "beta_large": b.validity.beta_large, "duffing_small": b.validity.duffing_small,
        }
        if cv is not None:
            mt = multistability_test(p, b, cv)
            row.update({
                "beta_crit": cv.beta_crit, "delta_crit_norm": cv.delta_crit_norm,
                "p_crit_w": cv.p_crit_w, "margin_beta": mt.margin_beta,
                "margin_delta": mt.margin_delta, "margin_power_w": mt.margin_power,
                "multistable": mt.multistable,
            })
        if "fluctuations" in spec.outputs and i == selected:
            try:
                rep = fluctuation_report(b, p, method=spec.method)
                row.update({
                    "var_q": rep.var_q, "var_p": rep.var_p,
                    "var_q_t": rep.var_q_t, "var_p_t": rep.var_p_t,
                    "n_eff": rep.n_eff, "n_eff_t": rep.n_eff_t,
                    "t_eff_k": rep.t_eff_k, "d_q_db": rep.d_q_db,
                    "d_p_db": rep.d_p_db, "eta": rep.eta,
                })
            except (UnstableSystemError, RuntimeError) as exc:
                notes.append(f"fluctuations: {exc}")
        row["status"] = "ok" if not notes else "; ".join(notes)
        rows.append(_nan_fill(row))
    return rows


def _assign_branch_ids(rows_per_point: list[list[dict]]) -> None:
    """Persistent branch ids via nearest-amplitude matching between points."""
    next_id = 0
    prev = []  # (beta, id)
    for rows in rows_per_point:
        betas = [r["beta_s"] for r in rows]
        ids: list[int | None] = [None] * len(rows)
        if prev and all(math.isfinite(b) for b in betas):
            k = len(betas)
            best, best_cost = None, math.inf
            cand = list(range(len(prev)))
            if len(cand) >= k:
                for perm in permutations(cand, k):
                    cost = sum(abs(betas[i] - prev[j][0]) for i, j in enumerate(perm))
                    if cost < best_cost:
                        best, best_cost = perm, cost
                if best is not None:
                    ids = [prev[j][1] for j in best]
            else:
                for perm in permutations(range(k), len(cand)):
                    cost = sum(abs(betas[i] - prev[j][0]) for j, i in enumerate(perm))
                    if cost < best_cost:
                        best, best_cost = perm, cost
                if best is not None:
                    for j, i in enumerate(best):
                        ids[i] = prev[j][1]
        for i, r in enumerate(rows):
            if ids[i] is None:
                ids[i] = next_id
                next_id += 1
            r["branch_id"] = ids[i]
        next_id = max(next_id, max(ids) + 1 if ids else 0)
        prev = [(b, i) for b, i in zip(betas, ids) if math.isfinite(b)]


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[dict]:
    """Deterministic list of rows, sorted by axis value then branch."""
    values = spec.axis_values()
    jobs = [(spec, v) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(_compute_point, jobs, chunksize=4))
    else:
        per_point = [_compute_point(j) for j in jobs]
    _assign_branch_ids(per_point)
    rows = [r for rows in per_point for r in rows]
    if spec.restrict_beta_large:
        rows = [r for r in rows
                if not (r["selected"] is True and math.isfinite(r["beta_s"])
                        and r["beta_s"] < 40.0)]
    return rows


# ---------------------------------------------------------------------------
# emission

def _format_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "NaN"
        return repr(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(rows: list[dict], fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in rows:
        writer.writerow([_format_cell(r.get(c, math.nan)) for c in COLUMNS])


def _json_cell(v):
    if isinstance(v, float) and math.isnan(v):
        return None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def write_json(rows: list[dict], fh) -> None:
    data = [{c: _json_cell(r.get(c, math.nan)) for c in COLUMNS} for r in rows]
    json.dump(data, fh, indent=1)
    fh.write("\n")


# ---------------------------------------------------------------------------
# config parsing (shared by the CLI and tests)

CONFIG_FIELDS = (
    "cavity_length", "laser_wavelength", "input_power", "effective_mass",
    "mech_freq", "quality_factor", "duffing", "opa_gain", "opa_phase",
    "bare_detuning", "bath_temp", "thermal_photons", "cavity_decay", "finesse",
)

#: convenience overrides in mechanical-frequency units
NORMALIZED_KEYS = {
    "delta_over_omegam": "bare_detuning",
    "detuning_over_omegam": "bare_detuning",
    "kappa_over_omegam": "cavity_decay",
    "lambda_over_omegam": "duffing",
    "g0_over_omegam": "opa_gain",
}


def params_from_config(cfg: dict) -> SystemParams:
    """SystemParams from a JSON-style dict of SI fields plus normalized
    convenience keys (resolved against the configured mech_freq)."""
    si = {k: float(v) for k, v in cfg.items() if k in CONFIG_FIELDS}
    unknown = [k for k in cfg if k not in CONFIG_FIELDS
               and k not in NORMALIZED_KEYS and k not in ("g0_over_kappa", "power_mw")]
    if unknown:
        raise ParameterError(f"unknown config keys: {unknown}")
    if "mech_freq" not in si:
        raise ParameterError("config must set mech_freq (rad/s)")
    w = si["mech_freq"]
    for key, field_name in NORMALIZED_KEYS.items():
        if key in cfg:
            si[field_name] = float(cfg[key]) * w
    if "power_mw" in cfg:
        si["input_power"] = float(cfg["power_mw"]) * 1e-3
    if "g0_over_kappa" in cfg:
        if "cavity_decay" not in si:
            raise ParameterError("g0_over_kappa needs an explicit cavity_decay")
        si["opa_gain"] = float(cfg["g0_over_kappa"]) * si["cavity_decay"]
    if "cavity_decay" in si and "finesse" in si:
        raise ParameterError("supply exactly one of cavity_decay or finesse")
    return SystemParams(**si)
