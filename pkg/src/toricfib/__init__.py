"""Exact toolkit for toric fibrations over the affine line: fans and
models, log discrepancies and fiber multiplicities, the negativity
certificate, surface intersection numbers, and tower bookkeeping."""

from .exactmath import (
    InvariantViolation,
    LatticeVector,
    Rat,
    RationalVector,
    parallelepiped_points,
    primitive,
    solve_in_basis,
)
from .fan import Cone, Fan, multiplicity, smallest_containing_cone, standard_fibration_fan, star_subdivide
from .divisors import (
    Subdivision,
    SupportFunction,
    ToricDivisor,
    canonical_divisor,
    character_divisor,
    fiber_divisor,
    fiber_multiplicity,
    horizontal_sum,
    is_epsilon_lc,
    log_discrepancy,
    pullback,
    ray_divisor,
    rel_lin_equiv,
    support_function,
    toric_mld,
    zero_divisor,
)
from .models import (
    DecompositionData,
    FibrationModel,
    log_canonical_class_split,
    model_V,
    model_W_U,
    model_Y,
    verify_extraction_identities,
)
from .criterion import (
    CertificateReport,
    ExplicitBounds,
    ScanSummary,
    certify,
    epsilon_prime,
    scan,
    verify_explicit_bounds,
)
from .towers import (
    GermData,
    NodeStep,
    ProductStep,
    TowerSpec,
    projective_model_discrepancy,
    pullback_tower,
    torus_dimension,
    validate,
)
from .surface import ChainModels, ChainReport, SurfaceModel, example_models, example_verify, intersect

__version__ = "0.1.0"
