"""egflab: exact-arithmetic workbench for Hadamard products of exponential
generating functions, their diagram expansions, triangular substitution
matrices with logarithms and rational powers, the vector fields generating
them, and statistics of random unipotent matrices.
"""

from ._backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
