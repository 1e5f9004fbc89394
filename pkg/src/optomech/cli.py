"""Command-line interface.

    optomech steady-state [--config cfg.json] [--set key=value]...
    optomech critical     [--g0-grid a:b:n --theta-grid a:b:n]
    optomech stability
    optomech fluctuations [--method lyapunov|spectral|both] [--branch K]
                          [--optimal-detuning]
    optomech sweep --axis delta --range 0:3:301 [--log]
                   [--constraint optimal_detuning] [--workers N]
    optomech figure NAME  (fig2 ... fig12)

Parameters come from a JSON config whose keys mirror the SI fields of
SystemParams; ``--base figN`` starts from a built-in parameter family and
``--set`` overrides individual keys (SI fields or the *_over_omegam
conveniences).  Exit codes: 0 success, 2 invalid configuration, 3 every sweep
point failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, replace

from .criticality import (CriticalPointError, critical_values_exact,
                          critical_values_harmonic, critical_values_perturbative)
from .fluctuations import UnstableSystemError, fluctuation_report
from .parameters import ParameterError, normalize
from .presets import BASES, PRESET_NAMES, figure_preset
from .stability import FixedPointError, routh_hurwitz, solve_optimal_detuning, transform_frame
from .steady_state import solve_branches
from .sweep import (CONFIG_FIELDS, NORMALIZED_KEYS, SweepSpec, params_from_config,
                    run_sweep, write_csv, write_json)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ALL_FAILED = 3


def _load_params(args) -> "SystemParams":
    cfg = {}
    base = BASES[args.base]
    for k, v in asdict(base).items():
        if v is not None:
            cfg[k] = v
    if args.config:
        with open(args.config) as fh:
            user = json.load(fh)
        if any(k in user for k in ("cavity_decay", "finesse", "kappa_over_omegam")):
            cfg.pop("cavity_decay", None)
            cfg.pop("finesse", None)
        cfg.update(user)
    for item in args.set or []:
        if "=" not in item:
            raise ParameterError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        if key in ("cavity_decay", "finesse", "kappa_over_omegam"):
            cfg.pop("cavity_decay", None)
            cfg.pop("finesse", None)
        cfg[key] = float(val)
    return params_from_config(cfg)


def _open_out(args):
    return open(args.out, "w", newline="") if args.out else sys.stdout


def _emit_rows(rows, args) -> None:
    fh = _open_out(args)
    try:
        if args.format == "json":
            write_json(rows, fh)
        else:
            write_csv(rows, fh)
    finally:
        if fh is not sys.stdout:
            fh.close()


def _print_table(header, rows, args) -> None:
    fh = _open_out(args)
    try:
        widths = [max(len(str(h)), *(len(c) for c in col)) if rows else len(str(h))
                  for h, col in zip(header, zip(*rows))] if rows else [len(h) for h in header]
        fh.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
        for r in rows:
            fh.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_steady_state(args) -> int:
    sp = _load_params(args)
    p = normalize(sp)
    branches = solve_branches(p)
    if args.format in ("csv", "json"):
        rows = [{"series": "", "axis": "delta", "axis_value": p.delta,
                 "branch_index": i, "beta_s": b.beta_s, "alpha_s": b.alpha_s,
                 "i_a": b.i_a, "delta_eff": b.delta_eff, "stable": b.stable,
                 "status": "ok"} for i, b in enumerate(branches)]
        _emit_rows(rows, args)
        return EXIT_OK
    table = [[f"{b.beta_s:.6g}", f"{b.i_a:.6g}", f"{b.delta_eff:.6g}",
              "yes" if b.stable else "no"] for b in branches]
    _print_table(["beta_s", "I_a", "delta_eff/omega_m", "stable"], table, args)
    return EXIT_OK


def _critical_rows(p):
    rows = []
    for fn, name in ((critical_values_exact, "exact"),
                     (critical_values_perturbative, "perturbative"),
                     (critical_values_harmonic, "harmonic")):
        try:
            cv = fn(p)
            rows.append([name, f"{cv.beta_crit:.6g}", f"{cv.delta_crit_norm:.6g}",
                         f"{cv.p_crit_w * 1e3:.6g}", "yes" if cv.trusted else "no"])
        except CriticalPointError as exc:
            rows.append([name, "-", "-", "-", f"n/a ({exc})"])
    return rows


def cmd_critical(args) -> int:
    sp = _load_params(args)
    p = normalize(sp)
    if args.g0_grid or args.theta_grid:
        g0s = _parse_grid(args.g0_grid or "0:0:1")
        thetas = _parse_grid(args.theta_grid or "0:0:1")
        out = []
        for g0 in g0s:
            for th in thetas:
                pp = p.with_changes(g0=g0, theta=th)
                try:
                    cv = critical_values_exact(pp) if pp.lam > 0 else critical_values_harmonic(pp)
                    out.append({"series": "", "axis": "g0", "axis_value": g0,
                                "theta": th, "beta_crit": cv.beta_crit,
                                "delta_crit_norm": cv.delta_crit_norm,
                                "p_crit_w": cv.p_crit_w, "status": "ok"})
                except CriticalPointError as exc:
                    out.append({"series": "", "axis": "g0", "axis_value": g0,
                                "theta": th, "beta_crit": math.nan,
                                "delta_crit_norm": math.nan, "p_crit_w": math.nan,
                                "status": str(exc)})
        fh = _open_out(args)
        try:
            cols = ["axis_value", "theta", "beta_crit", "delta_crit_norm",
                    "p_crit_w", "status"]
            if args.format == "json":
                json.dump(out, fh, indent=1, default=float)
                fh.write("\n")
            else:
                import csv as _csv
                w = _csv.writer(fh, lineterminator="\n")
                w.writerow(cols)
                for r in out:
                    w.writerow([r[c] for c in cols])
        finally:
            if fh is not sys.stdout:
                fh.close()
        return EXIT_OK
    _print_table(["method", "beta_crit", "delta_crit/omega_m", "P_crit_mW", "trusted"],
                 _critical_rows(p), args)
    return EXIT_OK


def cmd_stability(args) -> int:
    sp = _load_params(args)
    p = normalize(sp)
    branches = solve_branches(p)
    table = []
    for b in branches:
        frame = transform_frame(b, p)
        v = routh_hurwitz(frame, b.delta_eff, p)
        eigs = ", ".join(f"{z.real:+.4g}{z.imag:+.4g}j" for z in v.eigenvalues)
        table.append([f"{b.beta_s:.6g}", f"{v.s1:.4g}", f"{v.s2:.4g}", f"{v.s3:.4g}",
                      "yes" if v.rh_stable else "no",
                      "yes" if v.eigen_stable else "no", eigs])
    _print_table(["beta_s", "s1", "s2", "s3", "rh_stable", "eigen_stable",
                  "eigenvalues"], table, args)
    return EXIT_OK


def cmd_fluctuations(args) -> int:
    sp = _load_params(args)
    p = normalize(sp)
    if args.optimal_detuning:
        try:
            opt = solve_optimal_detuning(p)
        except FixedPointError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ALL_FAILED
        p, branch = opt.params, opt.branch
    else:
        branches = solve_branches(p)
        stable = [b for b in branches if b.stable]
        if args.branch is not None:
            if not 0 <= args.branch < len(branches):
                print(f"error: branch index {args.branch} out of range "
                      f"({len(branches)} branches)", file=sys.stderr)
                return EXIT_CONFIG
            branch = branches[args.branch]
        elif stable:
            branch = max(stable, key=lambda b: b.i_a)
        else:
            print("error: no stable branch at these parameters", file=sys.stderr)
            return EXIT_ALL_FAILED
    try:
        rep = fluctuation_report(branch, p, method=args.method)
    except (UnstableSystemError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ALL_FAILED
    fh = _open_out(args)
    try:
        if args.format == "json":
            data = {k: getattr(rep, k) for k in
                    ("var_q", "var_p", "var_q_t", "var_p_t", "n_eff", "n_eff_t",
                     "t_eff_k", "d_q_db", "d_p_db", "eta", "method", "clamped")}
            data["beta_s"] = branch.beta_s
            json.dump(data, fh, indent=1)
            fh.write("\n")
        else:
            fh.write(f"branch beta_s = {branch.beta_s:.6g}  (delta_eff = "
                     f"{branch.delta_eff:.6g} omega_m)\n")
            for k in ("var_q", "var_p", "var_q_t", "var_p_t", "n_eff", "n_eff_t",
                      "eta"):
                fh.write(f"{k:10s} = {getattr(rep, k):.9g}\n")
            fh.write(f"{'t_eff':10s} = {rep.t_eff_k:.6g} K\n")
            fh.write(f"{'d_q':10s} = {rep.d_q_db:.4f} dB\n")
            fh.write(f"{'d_p':10s} = {rep.d_p_db:.4f} dB\n")
            fh.write(f"method = {rep.method}; clamped = {rep.clamped}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _parse_grid(text: str):
    try:
        start, stop, n = text.split(":")
        start, stop, n = float(start), float(stop), int(n)
    except ValueError:
        raise ParameterError(f"grid must be start:stop:points, got {text!r}") from None
    if n == 1:
        return [start]
    return [start + (stop - start) * i / (n - 1) for i in range(n)]


def cmd_sweep(args) -> int:
    sp = _load_params(args)
    vals = _parse_grid(args.range)
    spec = SweepSpec(axis=args.axis, start=vals[0], stop=vals[-1], points=len(vals),
                     fixed=sp, scale="log" if args.log else "linear",
                     constraint=args.constraint,
                     outputs=("critical", "fluctuations") if args.with_fluctuations
                     else ("critical",))
    rows = run_sweep(spec, workers=args.workers)
    _emit_rows(rows, args)
    ok = any(r["status"] == "ok" for r in rows)
    return EXIT_OK if ok else EXIT_ALL_FAILED


def cmd_figure(args) -> int:
    try:
        series = figure_preset(args.name)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = []
    for _, spec in series:
        rows.extend(run_sweep(spec, workers=args.workers))
    _emit_rows(rows, args)
    ok = any(r["status"] == "ok" for r in rows)
    return EXIT_OK if ok else EXIT_ALL_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="optomech", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp_):
        sp_.add_argument("--config", help="JSON file of SI parameters")
        sp_.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a parameter (repeatable)")
        sp_.add_argument("--base", default="fig3", choices=sorted(BASES),
                         help="built-in parameter family to start from")
        sp_.add_argument("--format", default="text", choices=("text", "csv", "json"))
        sp_.add_argument("--out", help="write output to this path")

    s = sub.add_parser("steady-state", help="steady-state branch table")
    common(s)
    s.set_defaults(fn=cmd_steady_state)

    s = sub.add_parser("critical", help="critical values by all three routes")
    common(s)
    s.add_argument("--g0-grid", metavar="A:B:N", help="export a surface over g0 (omega_m units)")
    s.add_argument("--theta-grid", metavar="A:B:N", help="export a surface over theta (rad)")
    s.set_defaults(fn=cmd_critical)

    s = sub.add_parser("stability", help="Routh-Hurwitz terms and eigenvalues per branch")
    common(s)
    s.set_defaults(fn=cmd_stability)

    s = sub.add_parser("fluctuations", help="covariance-derived observables")
    common(s)
    s.add_argument("--method", default="both", choices=("lyapunov", "spectral", "both"))
    s.add_argument("--branch", type=int, help="branch index override")
    s.add_argument("--optimal-detuning", action="store_true",
                   help="re-solve the detuning so delta_eff matches the shifted "
                        "mechanical frequency")
    s.set_defaults(fn=cmd_fluctuations)

    s = sub.add_parser("sweep", help="sweep one parameter, emit CSV/JSON rows")
    common(s)
    s.add_argument("--axis", required=True,
                   choices=("delta", "p_in", "lam", "g0", "theta"))
    s.add_argument("--range", required=True, metavar="START:STOP:POINTS")
    s.add_argument("--log", action="store_true")
    s.add_argument("--constraint", default="none",
                   choices=("none", "optimal_detuning"))
    s.add_argument("--with-fluctuations", action="store_true")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("figure", help="run a built-in figure recipe")
    s.add_argument("name", choices=PRESET_NAMES)
    s.add_argument("--format", default="csv", choices=("csv", "json"))
    s.add_argument("--out", help="write output to this path")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(fn=cmd_figure)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        # ParameterError and malformed --set values both land here
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
