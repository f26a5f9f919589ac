"""Polytopes with prescribed integral Gauss curvature."""

try:
    from ._gausskraft import *  # noqa: F401,F403
    from ._gausskraft import GausskraftError, Instance
except ImportError:  # in-tree build: module sits next to the package
    from _gausskraft import *  # noqa: F401,F403
    from _gausskraft import GausskraftError, Instance

__all__ = [
    "GausskraftError",
    "Instance",
    "check_admissibility",
    "discretize",
    "evaluate",
    "export_obj",
    "lp_oracle",
    "solve",
]
