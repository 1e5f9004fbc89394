import hashlib
import subprocess
import sys
from pathlib import Path

import pytest

from plotkit import (MissingColumnError, RECIPES, build_figure, get_recipe,
                     load_rows, render)

PRESETS = tuple(sorted(RECIPES, key=lambda s: int(s[3:])))
SCRIPT = Path(__file__).resolve().parents[1] / "plot_figure.py"


@pytest.fixture(scope="session")
def preset_csvs(tmp_path_factory):
    """All figure-recipe CSVs, produced through the primary CLI."""
    out = tmp_path_factory.mktemp("csv")
    for name in PRESETS:
        path = out / f"{name}.csv"
        subprocess.run(["optomech", "figure", name, "--out", str(path),
                        "--workers", "4"], check=True)
    return out


def sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_all_presets_render_without_error(preset_csvs, tmp_path):
    for name in PRESETS:
        out = tmp_path / f"{name}.png"
        render(get_recipe(name), str(preset_csvs / f"{name}.csv"), str(out))
        assert out.exists() and out.stat().st_size > 5000


def test_rendering_is_deterministic(preset_csvs, tmp_path):
    for name in ("fig3", "fig8"):
        a, b = tmp_path / "a.png", tmp_path / "b.png"
        render(get_recipe(name), str(preset_csvs / f"{name}.csv"), str(a))
        render(get_recipe(name), str(preset_csvs / f"{name}.csv"), str(b))
        assert sha(a) == sha(b)


def test_branch_diagram_has_dashed_unstable_segments(preset_csvs):
    rows = load_rows(str(preset_csvs / "fig3.csv"))
    fig = build_figure(get_recipe("fig3"), rows)
    try:
        assert len(fig.axes) == 2                      # two-panel layout
        for ax in fig.axes:
            assert len(ax.lines) >= 3                  # every panel populated
        styles = {ln.get_linestyle() for ax in fig.axes for ln in ax.lines}
        assert "-" in styles and "--" in styles
    finally:
        import matplotlib.pyplot as plt
        plt.close(fig)


def test_every_panel_draws_data(preset_csvs):
    import matplotlib.pyplot as plt
    for name in PRESETS:
        fig = build_figure(get_recipe(name),
                           load_rows(str(preset_csvs / f"{name}.csv")))
        try:
            for ax in fig.axes:
                data_lines = [ln for ln in ax.lines
                              if len(set(ln.get_ydata())) > 1]
                assert data_lines, f"{name}: empty panel"
        finally:
            plt.close(fig)


def test_squeezing_plots_carry_3db_reference(preset_csvs):
    import matplotlib.pyplot as plt
    for name in ("fig8", "fig11", "fig12"):
        recipe = get_recipe(name)
        assert any(p.reference_lines for p in recipe.panels)
        fig = build_figure(recipe, load_rows(str(preset_csvs / f"{name}.csv")))
        try:
            ys = [ln.get_ydata()[0] for ax in fig.axes for ln in ax.lines
                  if len(set(ln.get_ydata())) == 1]
            assert any(abs(y - 3.0103) < 1e-3 for y in ys)
        finally:
            plt.close(fig)


def test_empty_csv_is_rejected_without_output(tmp_path):
    src = tmp_path / "empty.csv"
    src.write_text("")
    out = tmp_path / "out.png"
    with pytest.raises(ValueError):
        render(get_recipe("fig3"), str(src), str(out))
    assert not out.exists()


def test_header_only_csv_is_rejected(tmp_path):
    src = tmp_path / "hdr.csv"
    src.write_text("series,axis,axis_value\n")
    with pytest.raises(ValueError):
        load_rows(str(src))


def test_missing_column_error_lists_available(tmp_path):
    src = tmp_path / "short.csv"
    src.write_text("series,axis_value,stable\nx,1.0,true\n")
    with pytest.raises(MissingColumnError) as exc:
        build_figure(get_recipe("fig3"), load_rows(str(src)))
    msg = str(exc.value)
    assert "beta_s" in msg and "available" in msg and "axis_value" in msg


def test_unknown_recipe_rejected():
    with pytest.raises(KeyError):
        get_recipe("fig99")


def test_cli_script_end_to_end(preset_csvs, tmp_path):
    out = tmp_path / "fig7.png"
    proc = subprocess.run(
        [sys.executable, str(SCRIPT), "--recipe", "fig7",
         "--in", str(preset_csvs / "fig7.csv"), "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.exists()


def test_cli_script_reports_bad_input(tmp_path):
    bad = tmp_path / "missing.csv"
    proc = subprocess.run(
        [sys.executable, str(SCRIPT), "--recipe", "fig7",
         "--in", str(bad), "--out", str(tmp_path / "x.png")],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "error:" in proc.stderr
