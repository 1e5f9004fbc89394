"""Batch rendering of sweep CSV files into the standard figure set.

This package never computes physics: every plotted number is read from a
CSV column produced by the ``optomech`` CLI.
"""

from .recipes import RECIPES, Panel, PlotRecipe, get_recipe
from .render import MissingColumnError, build_figure, load_rows, render

__all__ = ["RECIPES", "Panel", "PlotRecipe", "get_recipe", "MissingColumnError",
           "build_figure", "load_rows", "render"]
