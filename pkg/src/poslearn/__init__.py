"""poslearn: a workbench for learning countable structures from positive data."""

__version__ = "0.1.0"
