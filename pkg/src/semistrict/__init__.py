"""Semistrictification of finite cat^n-groups."""
__version__ = "0.1.0"
