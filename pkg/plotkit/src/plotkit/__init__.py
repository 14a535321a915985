"""Figure renderer for swarm-simulation metrics and sweep-summary CSVs."""

from .render import render
from .specs import PlotSpec, SpecError, build_plot_spec, load_plot_spec

__version__ = "0.1.0"

__all__ = ["PlotSpec", "SpecError", "build_plot_spec", "load_plot_spec",
           "render", "__version__"]
