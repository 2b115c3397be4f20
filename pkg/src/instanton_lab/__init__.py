"""Exact computations with mathematical instanton bundles on P^3.

Monads over prime fields and the rationals, jumping lines, the Tjurin net of
quadrics at a point with its theta-characteristic data, and the intersection
numbers of line congruences.
"""

from .algebra import GF, QQ
from .errors import (
    ConsistencyError,
    DegenerateError,
    FieldMismatchError,
    InhomogeneousError,
    InstantonLabError,
    UndecidableError,
    ValidationError,
)
from .monad import (
    InstantonMonad,
    find_symplectic,
    global_h0,
    jumping_order,
    multijump_scan,
    restricted_h0,
    special_thooft_monad,
    validate_monad,
)
from .net import (
    beta_system,
    distinguished_pair,
    hypernet_from_monad,
    net_at_point,
    net_stability,
    singularity_diagnostics,
    splitting_obstruction,
    theta_section_spaces,
)

__all__ = [
    "GF",
    "QQ",
    "ConsistencyError",
    "DegenerateError",
    "FieldMismatchError",
    "InhomogeneousError",
    "InstantonLabError",
    "UndecidableError",
    "ValidationError",
    "InstantonMonad",
    "find_symplectic",
    "global_h0",
    "jumping_order",
    "multijump_scan",
    "restricted_h0",
    "special_thooft_monad",
    "validate_monad",
    "beta_system",
    "distinguished_pair",
    "hypernet_from_monad",
    "net_at_point",
    "net_stability",
    "singularity_diagnostics",
    "splitting_obstruction",
    "theta_section_spaces",
]
