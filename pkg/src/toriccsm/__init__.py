"""Exact Chern-Schwartz-MacPherson classes on smooth complete toric varieties.

The package computes CSM classes of torus-invariant constructible functions
from log-tangent Chern class local data, entirely in arbitrary-precision
integer arithmetic, and mechanically verifies the structural identities the
construction rests on: gluing over orbit decompositions, the blow-up
formula, covariance and naturality of the push-forward calculus, and the
fibration scaling along product projections.
"""

from .chow import (
    CycleClass,
    RelationBasis,
    classes_equal,
    degree,
    fundamental_class,
    multiply_divisor,
    multiply_divisor_polynomial,
    pushforward_cycle,
    relation_basis,
)
from .constructible import (
    ConstructibleFunction,
    euler_characteristic,
    indicator_of_orbit_closure,
    pushforward_function,
)
from .corpus import Corpus, bundled_corpus, hirzebruch, point_fan, projective_space
from .csm import (
    BlowupEdge,
    GoodClosure,
    ProChowElement,
    csm_class,
    local_data,
    prochow_assign_local_data,
    two_node_diagram,
    verify_blowup_formula,
    verify_covariance,
    verify_fibration,
    verify_gluing,
    verify_inclusion_exclusion,
    verify_naturality,
    verify_prochow_compatibility,
)
from .errors import ParseError, ValidationError
from .fans import (
    Cone,
    Fan,
    FanReport,
    ToricMorphism,
    boundary_divisor_cones,
    check_compatibility,
    compose,
    make_fan,
    orbit_dimension,
    product_fan,
    smallest_containing_cone,
    star_quotient_fan,
    star_subdivision,
    validate,
)
from .lattice import (
    LatticeMatrix,
    LatticeVector,
    SmithDecomposition,
    cokernel_index,
    kernel_basis,
    saturation,
    smith_normal_form,
    solve_integer,
)
from .suites import run_suite

__version__ = "0.1.0"
