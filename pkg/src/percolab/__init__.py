"""Bond percolation on boxes of Z^d: maximum diameters of finite clusters."""
__version__ = "0.1.0"

from .lattice import BoxSpec, EdgeId  # noqa: E402
from .percolation import EdgeSampler, RestrictedConfig  # noqa: E402
from .cluster import ClusterForest, SimFrame, build  # noqa: E402

__all__ = ["BoxSpec", "EdgeId", "EdgeSampler", "RestrictedConfig", "ClusterForest", "SimFrame",
           "build", "__version__"]
