"""Top-level package for the Jacobi operator laboratory."""

from jacobilab._version import (
    __author__,
    __copyright__,
    __email__,
    __license__,
    __title__,
    __version__,
)
from jacobilab.lab import JacobiLab
from jacobilab.tensors import AlgebraicCurvatureTensor, load_tensor

__all__: list[str] = [
    "__author__",
    "__copyright__",
    "__email__",
    "__license__",
    "__title__",
    "__version__",
    "AlgebraicCurvatureTensor",
    "JacobiLab",
    "load_tensor",
]
