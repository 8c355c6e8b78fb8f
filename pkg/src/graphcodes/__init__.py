"""Graph families with structured pairwise symmetric differences.

Submodules: graphcore (bitset graphs), factorize (perfect 1-factorizations),
bincode (binary codes), treecode (leaf-constrained tree families),
dualconstruct (blockers and dual bounds), oracle (exact tiny-n values),
gridcode (torus grids) and cli.
"""

from .errors import (
    GraphCodeError,
    InfeasibleError,
    NotFoundError,
    ResourceError,
    UsageError,
    VerificationError,
)
from .graphcore import LabeledGraph, PatternGraph

__version__ = "0.1.0"

__all__ = [
    "GraphCodeError",
    "InfeasibleError",
    "LabeledGraph",
    "NotFoundError",
    "PatternGraph",
    "ResourceError",
    "UsageError",
    "VerificationError",
]
