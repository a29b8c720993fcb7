"""Totally geodesic submanifolds and n-Grassmannian structures of linear connections."""

from ._jetgeo import *  # noqa: F401,F403
from ._jetgeo import __all__ as _native_all

__all__ = list(_native_all)
