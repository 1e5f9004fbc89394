"""Render a recipe from a sweep CSV to a deterministic image file."""

from __future__ import annotations

import csv
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .recipes import PlotRecipe  # noqa: E402

FIGSIZE = (6.0, 4.0)   # per panel row
DPI = 150


class MissingColumnError(KeyError):
    pass


def _parse(value: str):
    if value == "true":
        return True
    if value == "false":
        return False
    try:
        return float(value)
    except ValueError:
        return value


def load_rows(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty CSV, nothing to plot")
        rows = [{k: _parse(v) for k, v in row.items()} for row in reader]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def _require(rows: list[dict], columns) -> None:
    have = set(rows[0])
    missing = [c for c in columns if c not in have]
    if missing:
        raise MissingColumnError(
            f"missing columns {missing}; available: {sorted(have)}")


def _finite(pairs):
    return [(x, y) for x, y in pairs
            if isinstance(x, float) and isinstance(y, float)
            and math.isfinite(x) and math.isfinite(y)]


def _draw_branches(ax, rows, recipe, panel):
    groups = {}
    for r in rows:
        key = (r[recipe.group_column], r["branch_id"])
        groups.setdefault(key, []).append(r)
    series_colors = {}
    for (series, _), members in sorted(groups.items(), key=lambda kv: str(kv[0])):
        if series not in series_colors:
            series_colors[series] = f"C{len(series_colors) % 10}"
        color = series_colors[series]
        members.sort(key=lambda r: r[recipe.x_column])
        # split the branch into stable / unstable stretches
        segment, seg_stable = [], None
        segments = []
        for r in members:
            stable = r["stable"] is True
            if seg_stable is None or stable == seg_stable:
                segment.append(r)
            else:
                segments.append((seg_stable, segment))
                segment = [segment[-1], r]   # keep the curve visually joined
            seg_stable = stable
        if segment:
            segments.append((seg_stable, segment))
        labeled = False
        for stable, seg in segments:
            pts = _finite((r[recipe.x_column], r[panel.y_column]) for r in seg)
            if not pts:
                continue
            xs, ys = zip(*pts)
            ax.plot(xs, ys, color=color, linestyle="-" if stable else "--",
                    linewidth=1.2,
                    label=str(series) if not labeled else None)
            labeled = True


def _draw_observable(ax, rows, recipe, panel):
    groups = {}
    for r in rows:
        if r.get("selected") is not True or r.get("status") != "ok":
            continue
        groups.setdefault(r[recipe.group_column], []).append(r)
    for i, (series, members) in enumerate(sorted(groups.items(), key=lambda kv: str(kv[0]))):
        members.sort(key=lambda r: r[recipe.x_column])
        pts = _finite((r[recipe.x_column], r[panel.y_column]) for r in members)
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.plot(xs, ys, color=f"C{i % 10}", linewidth=1.4, label=str(series))


def build_figure(recipe: PlotRecipe, rows: list[dict]):
    needed = [recipe.x_column, recipe.group_column, "stable", "branch_id",
              "selected", "status"] + [p.y_column for p in recipe.panels]
    _require(rows, needed)
    n = len(recipe.panels)
    fig, axes = plt.subplots(n, 1, figsize=(FIGSIZE[0], FIGSIZE[1] * n),
                             squeeze=False)
    for panel, ax in zip(recipe.panels, axes[:, 0]):
        if panel.kind == "branches":
            _draw_branches(ax, rows, recipe, panel)
        else:
            _draw_observable(ax, rows, recipe, panel)
        for y_ref in panel.reference_lines:
            ax.axhline(y_ref, color="0.3", linestyle=":", linewidth=1.0)
        ax.set_xlabel(recipe.xlabel)
        ax.set_ylabel(panel.ylabel)
        ax.set_xscale(recipe.xscale)
        try:
            ax.set_yscale(panel.yscale)
        except ValueError:
            pass
        if ax.get_legend_handles_labels()[1]:
            ax.legend(fontsize=7, loc="best")
        ax.set_title(recipe.name, fontsize=9)
    fig.tight_layout()
    return fig


def render(recipe: PlotRecipe, csv_path: str, out_path: str) -> str:
    """Render one recipe; returns the output path.  Deterministic: identical
    inputs give byte-identical files."""
    rows = load_rows(csv_path)
    fig = build_figure(recipe, rows)
    try:
        fig.savefig(out_path, dpi=DPI, metadata={"Software": None})
    finally:
        plt.close(fig)
    return out_path
