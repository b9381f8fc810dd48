"""frictionplots: figure rendering for frictionlab experiment reports."""

from .render import FIGURE_KINDS, STYLE_VERSION, FigureSpec, SchemaError, render

__version__ = "0.1.0"
