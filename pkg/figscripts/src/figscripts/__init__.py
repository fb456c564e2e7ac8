"""Batch figure scripts over solver CSV/VTK outputs.

These scripts only read the documented file contracts (probe CSV with a
``t,<name>.<field>`` header or generic column CSV; legacy-ASCII VTK) and
never import the solver, so the solver package stays testable and
shippable on its own.
"""

from figscripts.specs import FigureSpec, load_spec
from figscripts.plots import plot_contour, plot_profile, plot_series, render

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "load_spec",
    "plot_contour",
    "plot_profile",
    "plot_series",
    "render",
]
