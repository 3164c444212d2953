"""Selection of finite-support densities by L1 error.

Given a finite family of candidate densities on a common finite support and
an empirical distribution, the selectors in this package pick a candidate
whose L1 distance to the unknown truth is within a constant factor of the
best achievable, while charging every empirical inner product and term
evaluation to an exact cost ledger.
"""

from .core import (
    Candidate,
    CapacityError,
    DegeneratePairError,
    EmpiricalDistribution,
    EmptyFamilyError,
    Family,
    InvalidPairError,
    Ledger,
    NormalizationError,
    Outcome,
    PreprocessedFamily,
    Support,
    SupportMismatchError,
    TestFunction,
    compare,
    empirical_deviation,
    empirical_deviation_restricted,
    inner_product,
    l1_distance,
    preprocess,
    scheffe_set,
    scheffe_win,
    test_function,
)
from .generators import (
    EPS_GRID,
    Instance,
    lower_bound_pair,
    lower_bound_tournament,
    random_instance,
    sample_empirical,
    swap_pair,
    vc_gap_family,
)
from .io import (
    FileFormatError,
    read_empirical,
    read_family,
    read_mass_vector,
    write_empirical,
    write_family,
    write_mass_vector,
)
from .oracle import (
    BoundCheck,
    SetSystem,
    best_in_family,
    check_bound,
    check_elimination_invariant,
    check_quadruple,
    check_win_equivalence,
    vc_dimension,
    vc_dimension_by_traces,
    yatracos_class,
    yatracos_restricted,
)
from .selectors import (
    CheckResult,
    LossWeightValue,
    SelectionReport,
    TraceEvent,
    efficient_min_loss_weight,
    loss_weight,
    min_distance,
    min_loss_weight,
    modified_min_distance,
    randomized_two,
    relaxed_selection_check,
    scheffe_tournament,
)

__version__ = "0.1.0"

__all__ = [
    "BoundCheck",
    "Candidate",
    "CapacityError",
    "CheckResult",
    "DegeneratePairError",
    "EPS_GRID",
    "EmpiricalDistribution",
    "EmptyFamilyError",
    "Family",
    "FileFormatError",
    "Instance",
    "InvalidPairError",
    "Ledger",
    "LossWeightValue",
    "NormalizationError",
    "Outcome",
    "PreprocessedFamily",
    "SelectionReport",
    "SetSystem",
    "Support",
    "SupportMismatchError",
    "TestFunction",
    "TraceEvent",
    "best_in_family",
    "check_bound",
    "check_elimination_invariant",
    "check_quadruple",
    "check_win_equivalence",
    "compare",
    "efficient_min_loss_weight",
    "empirical_deviation",
    "empirical_deviation_restricted",
    "inner_product",
    "l1_distance",
    "loss_weight",
    "lower_bound_pair",
    "lower_bound_tournament",
    "min_distance",
    "min_loss_weight",
    "modified_min_distance",
    "preprocess",
    "random_instance",
    "randomized_two",
    "read_empirical",
    "read_family",
    "read_mass_vector",
    "relaxed_selection_check",
    "sample_empirical",
    "scheffe_set",
    "scheffe_tournament",
    "scheffe_win",
    "swap_pair",
    "test_function",
    "vc_dimension",
    "vc_dimension_by_traces",
    "vc_gap_family",
    "write_empirical",
    "write_family",
    "write_mass_vector",
    "yatracos_class",
    "yatracos_restricted",
]
