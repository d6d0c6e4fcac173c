"""Figure regeneration for simulator CSV output."""

from .plotting import (KINDS, PlotError, PlotJob, SWEEP_HEADER,
                       TRAJECTORY_HEADER, detect_schema, load_columns, plot)

__version__ = "0.1.0"

__all__ = ["PlotJob", "PlotError", "plot", "detect_schema", "load_columns",
           "KINDS", "TRAJECTORY_HEADER", "SWEEP_HEADER"]
