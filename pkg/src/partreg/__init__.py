"""Exact decision procedures, certificates and finite colouring oracles for
kernel/image partition regularity of rational matrices."""

from .columns import (
    CapExceeded,
    ColumnsConditionCertificate,
    DEFAULT_PARTITION_CAP,
    FirstEntriesMatrix,
    OrderedPartition,
    PartitionCapExceeded,
    check_partition,
    decide_columns_condition,
    enumerate_ordered_partitions,
    first_entries_from_certificate,
    is_first_entries_sufficient,
    verify_certificate,
)
from .decisions import (
    Decision,
    IntegerScalarReport,
    NO,
    UNDECIDED,
    YES,
    doubly_ipr,
    doubly_ipr_template,
    doubly_kpr,
    integer_b_analysis,
    is_ipr,
    is_ipr_template,
    is_kpr,
    multiply_kpr,
    multiply_kpr_template,
    zero_column_subset_exists,
)
from .feasibility import (
    AffineSystem,
    FIXED_ONE,
    FarkasWitness,
    LinearEquality,
    PositiveSolution,
    ScalarSet,
    ScalingTemplate,
    build_system,
    enumerate_feasible_scalars,
    feasible_positive,
    scalar_union_over_partitions,
    solve_positive,
    verify_farkas,
)
from .linalg import (
    Q,
    QMatrix,
    QVector,
    nullspace_basis,
    rational,
    residual_functionals,
    rref,
    span_membership,
)
from .oracle import (
    Colouring,
    SolutionWitness,
    WitnessColouring,
    dilation_check,
    enumerate_bounded_solutions,
    find_monochromatic_solution,
    gamma_colour,
    leading_exponent,
    search_witness_colouring,
    verify_all_colourings,
)

__version__ = "0.1.0"
