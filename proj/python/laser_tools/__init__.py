"""Python bindings for the laser_tools scan merger and scan virtualizer."""

try:
    from ._laser_tools import *  # noqa: F401,F403
    from ._laser_tools import __doc__  # noqa: F401
except ImportError:
    # In-tree use: the extension sits in the build directory, not next to this file.
    from _laser_tools import *  # noqa: F401,F403
    from _laser_tools import __doc__  # noqa: F401
