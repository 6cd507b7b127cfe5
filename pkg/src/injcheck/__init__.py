"""Exact injectivity analysis for classes of maps via classes of matrices.

The central question: given a matrix class (positively scaled exponent
matrices, sign patterns, sign sets, entrywise intervals, or products of
those, optionally behind a fixed left matrix) and a linear subspace S, does
some member kill a nonzero vector of S? Map families whose difference
quotients sweep exactly such a class - generalized monomial maps, componentwise
monotonic maps, maps with Jacobians in an interval box - are injective on
every coset of S precisely when the answer is no.

Everything outside the randomized falsifier and the final lift to colliding
points runs in exact rational arithmetic, and both answers come with
certificates that verify_certificate rechecks.
"""

from .classes import (
    Augmented,
    Interval,
    IntervalBox,
    IntervalEntry,
    MatrixClass,
    Member,
    Product,
    Scaled,
    SignPattern,
    SignSetMatrix,
    SignSets,
    UnsupportedClassError,
    augment_with_kernel_rep,
    class_contains,
    d_of_signsets,
    enumerate_patterns,
    format_interval_box_text,
    format_signsets_text,
    parse_interval_box_text,
    parse_signsets_text,
    signsets_of_box,
    symbolic_product,
    symbolic_view,
)
from .crn import (
    KineticsMode,
    Network,
    NetworkTextError,
    Reaction,
    build_problem,
    parse_network,
    serialize_network,
)
from .detroute import DetAnalysis, DetSign, det_sign_analysis, symbolic_determinant
from .injectivity import (
    Problem,
    PositivityCertificate,
    Route,
    SingularWitness,
    Status,
    Verdict,
    build_witness,
    check_injectivity,
    lift_monomial_witness,
    verify_certificate,
)
from .limits import CapExceeded, Caps, DEFAULT_CAPS
from .linalg import (
    MatrixTextError,
    RationalMatrix,
    Subspace,
    determinant,
    format_matrix_text,
    kernel_basis,
    parse_matrix_text,
    rank,
)
from .oracle import OracleConfig, falsify, sample_class, sample_member
from .signroute import (
    SignRouteHit,
    SignRouteResult,
    concordant_pair,
    kernel_sign_vectors,
    pair_sign_feasible,
    realize_sign_in_subspace,
    sign_route,
    subspace_sign_vectors,
)
from .signs import (
    ALL_SIGN_SETS,
    SignVector,
    all_sign_vectors,
    format_sign_set,
    parse_sign_set,
    sigma,
    sign_leq,
    sign_orthogonal,
    signset_row_orthogonal,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
