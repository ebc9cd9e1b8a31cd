"""Symbolic mechanics for Lagrangians of any finite order on a base with
even and odd coordinates, plus Grassmann-valued numerical integration.

The central objects are exact polynomial expressions in jet coordinates
(``SuperExpr``), graded differential forms on higher tangent charts
(``GradedForm``), and the derived data of a Lagrangian: momentum and
symplectic forms, energy, field equations, dynamics, and the two-way
correspondence between symmetries and conserved charges.
"""

from .algebra import (
    AlgebraError,
    GeneratorSymbol,
    MixedParity,
    Parity,
    ParityMismatch,
    SuperExpr,
    UndeclaredGenerator,
    ZeroExpression,
    has_parity,
    left_partial,
    normalize,
    parity_of,
    parity_product,
    substitute,
)
from .jets import (
    Chart,
    DomainMismatch,
    JetError,
    OrderExceeded,
    Projection,
    VectorFieldAlong,
    coordinate_field,
    iterated_total_derivative,
    lift_vector_field,
    lifted_function,
    liouville_field,
    pullback,
    total_derivative,
    total_derivative_field,
    vertical_endomorphism,
    vertical_lift_field,
    vertical_lift_function,
)
from .forms import (
    CheckForm,
    FormError,
    GradedForm,
    NotSemibasic,
    cartan_operator,
    differential_of_function,
    exterior_d,
    interior,
    pair,
    semibasic_check,
    transpose_vertical,
)
from .forms import total_derivative as form_total_derivative
from .lagrangian import (
    CartanData,
    Dynamics,
    LagrangianError,
    NoWitness,
    NoetherCertificate,
    NotProjectable,
    NotRegular,
    NotSymmetry,
    Regularity,
    RegularityReport,
    SingularSystem,
    SuperLagrangian,
    cartan_data,
    cartan_one_form,
    cartan_two_form,
    certify_symmetry,
    check_constant_of_motion,
    check_symmetry,
    conservation_witness,
    energy,
    euler_lagrange_form,
    is_sode,
    noether_charge,
    noether_inverse,
    regularity,
    solve_dynamics,
    variational_derivative,
)
from .numeric import (
    ConstraintViolation,
    GrassmannValue,
    IntegrationError,
    MissingValue,
    NumericError,
    NumericState,
    ParityViolation,
    Trajectory,
    conservation_report,
    evaluate,
    integrate,
)
from .problems import (
    IndexOutOfRange,
    ProblemError,
    ProblemFile,
    ProblemSyntaxError,
    SimulationSpec,
    UnknownCoordinate,
    format_problem,
    parse_expression,
    parse_problem,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraError",
    "CartanData",
    "Chart",
    "CheckForm",
    "ConstraintViolation",
    "DomainMismatch",
    "Dynamics",
    "FormError",
    "GeneratorSymbol",
    "GradedForm",
    "GrassmannValue",
    "IndexOutOfRange",
    "IntegrationError",
    "JetError",
    "LagrangianError",
    "MissingValue",
    "MixedParity",
    "NoWitness",
    "NoetherCertificate",
    "NotProjectable",
    "NotRegular",
    "NotSemibasic",
    "NotSymmetry",
    "NumericError",
    "NumericState",
    "OrderExceeded",
    "Parity",
    "ParityMismatch",
    "ParityViolation",
    "ProblemError",
    "ProblemFile",
    "ProblemSyntaxError",
    "Projection",
    "Regularity",
    "RegularityReport",
    "SimulationSpec",
    "SingularSystem",
    "SuperExpr",
    "SuperLagrangian",
    "Trajectory",
    "UndeclaredGenerator",
    "UnknownCoordinate",
    "VectorFieldAlong",
    "ZeroExpression",
    "cartan_data",
    "cartan_one_form",
    "cartan_operator",
    "cartan_two_form",
    "certify_symmetry",
    "check_constant_of_motion",
    "check_symmetry",
    "conservation_report",
    "conservation_witness",
    "coordinate_field",
    "differential_of_function",
    "energy",
    "euler_lagrange_form",
    "evaluate",
    "exterior_d",
    "form_total_derivative",
    "format_problem",
    "has_parity",
    "integrate",
    "interior",
    "is_sode",
    "iterated_total_derivative",
    "left_partial",
    "lift_vector_field",
    "lifted_function",
    "liouville_field",
    "noether_charge",
    "noether_inverse",
    "normalize",
    "pair",
    "parity_of",
    "parity_product",
    "parse_expression",
    "parse_problem",
    "pullback",
    "regularity",
    "semibasic_check",
    "solve_dynamics",
    "substitute",
    "total_derivative",
    "total_derivative_field",
    "transpose_vertical",
    "variational_derivative",
    "vertical_endomorphism",
    "vertical_lift_field",
    "vertical_lift_function",
]
