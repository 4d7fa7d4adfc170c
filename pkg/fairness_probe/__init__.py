"""Init for fairness_probe."""

__version__ = '0.1.0'
