"""Code-model probing, representational similarity and layer-freezing lab."""

from ._codescope import *  # noqa: F401,F403
from ._codescope import __doc__  # noqa: F401
