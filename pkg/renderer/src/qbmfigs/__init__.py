"""Read-only figure rendering over the simulator's CSV outputs."""

from .figures import FigureSpec, SchemaError, render

__version__ = "0.1.0"
