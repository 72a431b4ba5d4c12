"""minibmc: a bounded model checker for a C subset."""

__version__ = "0.1.0"
