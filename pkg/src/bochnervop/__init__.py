"""Exact construction and verification of polynomial families ``P_n = exp(q(B)) x^n``."""

from .diffop import DiffOp, ad_exp, ad_series, apply, commutator, compose, exp_apply
from .errors import (
    BandwidthZero,
    Cancelled,
    DegreeNotLowered,
    GuardExceeded,
    InvalidQError,
    MissingParameterError,
    RelationViolation,
    SigmaMismatch,
    SpecError,
    TableOutOfRange,
    UndeclaredParameterError,
    VopError,
)
from .families import Family, FamilySpec, build_family, generate_table
from .ring import NPoly, QPoly, Scalar, XPoly, eval_params, rat, scalar_arith
from .shiftop import PolyTable, ShiftOp, apply_to_sequence, apply_to_table, shift_compose
from .verify import (
    CheckResult,
    FunctionalTable,
    RecurrenceTable,
    Report,
    build_functionals,
    check_eigenfunction,
    check_lowering,
    check_sigma_closed_form,
    compare_recurrence,
    extract_recurrence,
    full_report,
    maroni_check,
)

__all__ = [
    "BandwidthZero",
    "Cancelled",
    "CheckResult",
    "DegreeNotLowered",
    "DiffOp",
    "Family",
    "FamilySpec",
    "FunctionalTable",
    "GuardExceeded",
    "InvalidQError",
    "MissingParameterError",
    "NPoly",
    "PolyTable",
    "QPoly",
    "RecurrenceTable",
    "RelationViolation",
    "Report",
    "Scalar",
    "ShiftOp",
    "SigmaMismatch",
    "SpecError",
    "TableOutOfRange",
    "UndeclaredParameterError",
    "VopError",
    "XPoly",
    "ad_exp",
    "ad_series",
    "apply",
    "apply_to_sequence",
    "apply_to_table",
    "build_family",
    "build_functionals",
    "check_eigenfunction",
    "check_lowering",
    "check_sigma_closed_form",
    "commutator",
    "compare_recurrence",
    "compose",
    "eval_params",
    "exp_apply",
    "extract_recurrence",
    "full_report",
    "generate_table",
    "maroni_check",
    "rat",
    "scalar_arith",
    "shift_compose",
]

__version__ = "0.1.0"
