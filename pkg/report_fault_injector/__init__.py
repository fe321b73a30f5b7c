"""Bug-report-driven fault injection toolkit for the MiniJ language."""

__version__ = "0.1.0"
