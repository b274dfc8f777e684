"""Certified lower bounds for colorings of R^n with no monochromatic unit
equilateral triangle, built from diagonal tensor certificates on fixed-weight
Hamming slices."""

from .bounds import (
    AsymptoticResult,
    BoundRow,
    BoundTable,
    asymptotic_constant,
    binomial,
    count_low_weight,
    finite_lower_bound,
    gf_bound,
    growth_trend,
    max_binomial_term,
    optimal_t,
    rank_ceiling,
)
from .errors import DiagonalityError, ResourceLimitError
from .expansion import (
    MonomialMap,
    MultilinearMonomial,
    SliceDecomposition,
    build_slice_decomposition,
    expand_H,
    slice_count,
    verify_decomposition,
    verify_expansion,
)
from .hamming import (
    CoordinateProfile,
    SlicePoint,
    coordinate_profile,
    enumerate_slice,
    half_squared_distance,
    is_equilateral,
    squared_distance,
)
from .oracle import (
    OracleResult,
    TriangleHypergraph,
    enumerate_triangles,
    greedy_triangle_free,
    max_triangle_free,
    verify_triangle_free,
)
from .suites import hamming_identity_suite, run_verify, tensor_identity_suite
from .tensors import (
    DiagonalCertificate,
    TriangleParams,
    eval_F,
    eval_G,
    eval_H,
    is_prime,
    smallest_odd_prime_above,
    verify_diagonal_on,
)

__version__ = "0.1.0"
