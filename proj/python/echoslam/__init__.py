"""Ultrasonic-array slam: simulation, scan upsampling, odometry, mapping."""

from echoslam._core import *  # noqa: F401,F403
from echoslam._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
