"""Local sampling SVM and the CGLQ baseline, backed by a C++ SMO solver."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
