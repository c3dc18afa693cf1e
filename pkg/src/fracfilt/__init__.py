"""Learned quarter-pel motion-compensation interpolation filters.

Trains a small bias-free linear CNN per (fractional position, QP), collapses
it into a single 13x13 filter, and evaluates the collapsed filters against
the standard separable codec filters in a block-based switchable
motion-compensation harness.
"""

from .kernels import BACKEND

__all__ = ["BACKEND"]
__version__ = "0.1.0"
