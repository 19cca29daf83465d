"""Workbench for the call-by-value lambda calculus with shift and reset."""

import sys

from .syntax import parse, pretty

__all__ = ["parse", "pretty"]
__version__ = "0.1.0"

# terms built during long evaluations can nest deeply
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)
