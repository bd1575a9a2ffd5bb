"""Divisor theory on metric graphs and tropical realizations of their
finite automorphism groups, in exact rational arithmetic."""

from .automorphism import (
    Automorphism,
    CanonicalModel,
    FiniteGroup,
    GroupError,
    InfiniteGroupError,
    act_on_point,
    canonical_model,
    compute_aut,
    finite_subgroup_of_circle,
    subgroup_generated,
)
from .divisor import Divisor, apply_automorphism, canonical_divisor, degree, is_effective, is_invariant
from .graph import (
    CellDecomposition,
    Model,
    ModelError,
    Point,
    Refinement,
    Subgraph,
    boundary_outdegree,
    complement_closure_subgraphs,
    components,
    genus,
    subdivide,
    valency,
)
from .lattice import Lattice
from .linear_system import (
    EmptyLinearSystemError,
    GeneratingSet,
    GranularityWarning,
    HyperellipticError,
    LinearSystem,
    NotInvariantError,
    is_hyperelliptic,
)
from .rational import BottomFunctionError, RationalFunction, compose, div, evaluate, scalar_shift, trop_sum
from .realization import (
    NonInjectiveError,
    RationalMap,
    Realization,
    RealizationError,
    build_A_sigma,
    build_perm_matrix,
    dehomogenize,
    evaluate_map,
    index_permutation,
    is_injective,
    realize,
    realize_canonical,
    verify_commutation,
)
from .tropical import (
    NEG_INF,
    ProjPoint,
    TropMatrix,
    invert,
    is_generalized_permutation,
    is_permutation_matrix,
    is_regular,
    mat_mul,
    pgl_equal,
    proj_equal,
    trop_add,
    trop_mul,
)

__version__ = "0.1.0"
