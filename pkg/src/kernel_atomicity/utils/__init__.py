"""Utility classes for the kernel atomicity toolkit."""

from kernel_atomicity.utils.errors import (
    ActionError,
    AtomicityError,
    CapExceeded,
    ConfigurationError,
    DimensionMismatch,
    EnumerationCapExceeded,
    FieldDivisionByZero,
    FieldMismatch,
    GroupError,
    HomomorphismError,
    IndexOutOfRange,
    InvariantViolation,
    LinearAlgebraError,
    NotABijection,
    NotAGroup,
    NotAHomomorphism,
    NotAnAction,
    NotAPermutation,
    NotAPrime,
    NotASolutionSet,
    NotASubgroup,
    NotNormal,
    OrderCapExceeded,
    PointOutOfRange,
    ReportFormatError,
    SampledAxiomsRejected,
    SpecError,
    SpecParseError,
    UnknownCatalogEntry,
    ValidationCapExceeded,
    WitnessCheckFailed,
    WrongBackend,
)

__all__ = [
    "ActionError",
    "AtomicityError",
    "CapExceeded",
    "ConfigurationError",
    "DimensionMismatch",
    "EnumerationCapExceeded",
    "FieldDivisionByZero",
    "FieldMismatch",
    "GroupError",
    "HomomorphismError",
    "IndexOutOfRange",
    "InvariantViolation",
    "LinearAlgebraError",
    "NotABijection",
    "NotAGroup",
    "NotAHomomorphism",
    "NotAnAction",
    "NotAPermutation",
    "NotAPrime",
    "NotASolutionSet",
    "NotASubgroup",
    "NotNormal",
    "OrderCapExceeded",
    "PointOutOfRange",
    "ReportFormatError",
    "SampledAxiomsRejected",
    "SpecError",
    "SpecParseError",
    "UnknownCatalogEntry",
    "ValidationCapExceeded",
    "WitnessCheckFailed",
    "WrongBackend",
]
