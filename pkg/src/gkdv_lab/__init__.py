"""Numerical laboratory for u_t + u_xxx + (u^4)_x = 0 on the half line."""

__version__ = "0.1.0"
