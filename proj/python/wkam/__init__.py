"""Weak-KAM workbench: discounted Hamilton-Jacobi equations on the flat torus."""

try:
    from ._wkam import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _wkam import *  # noqa: F401,F403  (in-tree build, .so on PYTHONPATH)
