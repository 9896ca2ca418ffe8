"""Exact shuffle-algebra computations for K-theoretic Hall algebras of quivers."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DivergentLimit,
    IllFormedInput,
    NotInShuffleAlgebra,
    ParseError,
    QuiverShuffleError,
    ResourceCap,
    SingularMatrix,
    SlopeError,
)
from .exactalg import RatFun, parse_coefficient  # noqa: F401
from .quiver import Edge, Quiver  # noqa: F401
from .shuffle import ShuffleElement, generator, slope_basis, wheel_check  # noqa: F401
