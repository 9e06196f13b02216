"""Farey triangle dynamics laboratory.

A library for the BCZ map on the Farey triangle: exact orbit arithmetic,
the unimodular-lattice correspondence and primitive-point enumeration, the
shrunken-section renormalization conjugacy, exact strip combinatorics, and
a seeded Monte Carlo engine that verifies the quantitative statistics of
the section dynamics (claim integrals, return-slope bands, plus-one return
frequencies, and weak-mixing diagnostics).
"""

from .errors import (
    BczLabError,
    ConfigError,
    CoprimalityError,
    CriterionMismatch,
    DomainError,
    IterationCeiling,
    OrderError,
    SearchCeilingExceeded,
    SlopeCoincidence,
    UsageError,
)
from .lattice import (
    BoxSpec,
    LatticeBasis,
    PrimitivePoint,
    box_count,
    enumerate_primitive,
    normalize_section,
    nth_slope,
    primitive_point,
)
from .polygon import RegionPolygon
from .renorm import (
    ReturnRecord,
    SectionConfig,
    displacement,
    omega_b_contains,
    phi,
    phi_inverse,
    plus_one_event,
    return_index,
    return_map_b,
)
from .sampling import ExperimentSpec, Region, RunReport, sample_region
from .statistics import (
    ClaimKind,
    ObservableId,
    birkhoff_slope_rate,
    claim_integral,
    coprime_density,
    correlation_cesaro,
    g0_fraction,
    invariance_histogram_test,
    plus_one_fraction,
    weyl_scan,
)
from .strips import (
    StripSpec,
    a_mn_region,
    admissible_pair_count,
    neccond_holds,
    q_set_size,
    strip_contains,
    strip_intersection_measure,
)
from .triangle import (
    ExactRatio,
    OmegaPoint,
    OrbitRecord,
    bcz_orbit,
    bcz_step,
    branch_matrix,
    contains_omega,
    farey_section_orbit,
    kappa,
)

__version__ = "0.1.0"
