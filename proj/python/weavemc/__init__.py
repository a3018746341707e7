"""Weave-Metropolis samplers, benchmark targets and diagnostics."""

try:
    from ._weavemc import *  # noqa: F401,F403  (installed package layout)
    from ._weavemc import __version__  # noqa: F401
except ImportError:  # build-tree layout with the extension next to this file
    from _weavemc import *  # noqa: F401,F403
    from _weavemc import __version__  # noqa: F401
