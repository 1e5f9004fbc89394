"""Figure recipes: which CSV columns each panel draws and how.

Two panel kinds exist.  Branch panels redraw the steady-state response with
one segment per (series, branch id), dashing the unstable stretches.
Observable panels plot a column of the selected branch against the sweep
axis, one line per series, with optional horizontal reference lines (the
3 dB squeezing limit on the squeezing figures).
"""

from __future__ import annotations

from dataclasses import dataclass, field

DB_3 = 3.0102999566398120   # 10 log10(2), the standard squeezing limit


@dataclass(frozen=True)
class Panel:
    y_column: str
    ylabel: str
    kind: str = "observable"          # observable | branches
    yscale: str = "linear"
    reference_lines: tuple = ()       # horizontal y values


@dataclass(frozen=True)
class PlotRecipe:
    name: str
    panels: tuple
    x_column: str = "axis_value"
    xlabel: str = "detuning / omega_m"
    xscale: str = "linear"
    group_column: str = "series"


def _branch_diagram(name, xlabel="detuning / omega_m", xscale="linear"):
    return PlotRecipe(
        name=name, xlabel=xlabel, xscale=xscale,
        panels=(
            Panel(y_column="beta_s", ylabel="mechanical amplitude", kind="branches"),
            Panel(y_column="i_a", ylabel="intracavity intensity", kind="branches"),
        ))


RECIPES = {
    "fig2": _branch_diagram("fig2"),
    "fig3": _branch_diagram("fig3"),
    "fig4": PlotRecipe(
        name="fig4", xlabel="input power (W)",
        panels=(Panel(y_column="beta_s", ylabel="mechanical amplitude",
                      kind="branches"),)),
    "fig5": PlotRecipe(
        name="fig5",
        panels=(Panel(y_column="var_q", ylabel="position variance"),
                Panel(y_column="var_p", ylabel="momentum variance"))),
    "fig6": PlotRecipe(
        name="fig6",
        panels=(Panel(y_column="t_eff_k", ylabel="effective temperature (K)",
                      yscale="log"),)),
    "fig7": PlotRecipe(
        name="fig7", xlabel="duffing strength / omega_m", xscale="log",
        panels=(Panel(y_column="t_eff_k", ylabel="effective temperature (K)",
                      yscale="log"),)),
    "fig8": PlotRecipe(
        name="fig8", xlabel="duffing strength / omega_m", xscale="log",
        panels=(Panel(y_column="d_q_db", ylabel="position squeezing (dB)",
                      reference_lines=(DB_3,)),)),
    "fig9": PlotRecipe(
        name="fig9", xlabel="duffing strength / omega_m", xscale="log",
        panels=(Panel(y_column="t_eff_k", ylabel="effective temperature (K)",
                      yscale="log"),)),
    "fig10": PlotRecipe(
        name="fig10",
        panels=(Panel(y_column="t_eff_k", ylabel="effective temperature (K)",
                      yscale="log"),)),
    "fig11": PlotRecipe(
        name="fig11", xlabel="duffing strength / omega_m", xscale="log",
        panels=(Panel(y_column="d_q_db", ylabel="position squeezing (dB)",
                      reference_lines=(DB_3,)),)),
    "fig12": PlotRecipe(
        name="fig12",
        panels=(Panel(y_column="d_q_db", ylabel="position squeezing (dB)",
                      reference_lines=(DB_3,)),)),
}


def get_recipe(name: str) -> PlotRecipe:
    try:
        return RECIPES[name]
    except KeyError:
        raise KeyError(f"unknown recipe {name!r}; known: {sorted(RECIPES)}") from None
