"""Gonosomal evolution operators on S^{2,2}: simulation, analysis and verification."""
from .core import (
    Arith,
    DegenerateSex,
    DomainViolation,
    ExactIterationCapExceeded,
    GonosomalError,
    MixedArithmetic,
    NegativeComponent,
    OperatorOverflow,
    PopulationState,
    RawState4,
    ReducedState,
    SumOutOfTolerance,
    ZeroDenominator,
    fixed_point,
    parse_state,
    validate_population,
)
from .operators import (
    CrossTable,
    GonosomalOperator,
    Mode,
    apply_F,
    apply_general,
    apply_unnormalized,
    apply_W,
    hemophilia_cross_table,
    hemophilia_operator,
    reconstruct_next,
    reduce,
)

__version__ = "0.1.0"
