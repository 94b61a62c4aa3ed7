"""Figure rendering for exported chase trajectories and region polygons."""

from .render import EXPECTED_COLUMNS, PlotSpec, SchemaError, load_region, load_trajectory, render

__version__ = "0.1.0"
