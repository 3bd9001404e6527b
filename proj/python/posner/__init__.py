"""Python interface to the Posner-molecule quantum information simulator."""

from _posner import *  # noqa: F401,F403
from _posner import __doc__  # noqa: F401
