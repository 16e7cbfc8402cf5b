"""Custom exceptions for the kernel atomicity toolkit."""

from typing import Any, Dict, Optional, Sequence


class AtomicityError(Exception):
    """Base exception for all kernel-atomicity errors.

    Every error carries a ``witness`` mapping with the concrete data that
    demonstrates the failure (a violating pair, triple, vector or field path).
    """

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.witness: Dict[str, Any] = dict(witness or {})


class ConfigurationError(AtomicityError):
    """Error in the configuration."""
    pass


class InvariantViolation(AtomicityError):
    """A library self-check failed; indicates a bug, not bad input."""
    pass


# Spec files

class SpecError(AtomicityError):
    """Base class for spec-file problems."""
    pass


class SpecParseError(SpecError):
    """A spec file could not be parsed against its declared kind."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        field: Optional[str] = None,
        line: Optional[int] = None,
    ):
        witness: Dict[str, Any] = {}
        if field is not None:
            witness["field"] = field
        if line is not None:
            witness["line"] = line
        super().__init__(message, witness)
        self.path = path
        self.field = field
        self.line = line

    def __str__(self) -> str:
        parts = []
        if self.path:
            parts.append(self.path)
        if self.line is not None:
            parts.append(f"line {self.line}")
        if self.field:
            parts.append(f"field '{self.field}'")
        parts.append(self.message)
        return ": ".join(parts)


# Caps

class CapExceeded(AtomicityError):
    """A configured size cap would be exceeded."""

    def __init__(self, message: str, size: int, cap: int):
        super().__init__(message, {"size": size, "cap": cap})
        self.size = size
        self.cap = cap


class OrderCapExceeded(CapExceeded):
    """Group enumeration grew past the configured order cap."""
    pass


class ValidationCapExceeded(CapExceeded):
    """Exhaustive validation would exceed the configured work cap."""
    pass


class EnumerationCapExceeded(CapExceeded):
    """Brute-force enumeration would exceed the configured candidate cap."""
    pass


# Groups

class GroupError(AtomicityError):
    """Base class for group-construction errors."""
    pass


class NotAGroup(GroupError):
    """A Cayley table violates a group axiom."""

    def __init__(self, axiom: str, witness: Sequence[int], detail: str = ""):
        message = f"table violates {axiom} at {tuple(witness)}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message, {"axiom": axiom, "elements": list(witness)})
        self.axiom = axiom
        self.elements = tuple(witness)


class NotAPermutation(GroupError):
    """A generator is not a bijection of 0..degree-1."""

    def __init__(self, generator: int, image: int):
        super().__init__(
            f"generator {generator} is not a permutation (image {image} repeated or out of range)",
            {"generator": generator, "image": image},
        )
        self.generator = generator
        self.image = image


class IndexOutOfRange(GroupError):
    """An element index lies outside 0..order-1."""

    def __init__(self, index: int, order: int):
        super().__init__(f"element index {index} out of range for order {order}", {"index": index, "order": order})


class NotASubgroup(GroupError):
    """A member set is not closed (or lacks the identity) in its parent group."""

    def __init__(self, reason: str, elements: Sequence[int]):
        super().__init__(
            f"not a subgroup: {reason} at {tuple(elements)}",
            {"reason": reason, "elements": list(elements)},
        )
        self.reason = reason
        self.elements = tuple(elements)


class UnknownCatalogEntry(GroupError):
    """The catalog has no group with this name, or the parameter is invalid for it."""
    pass


class WrongBackend(GroupError):
    """The operation needs a different group backend."""
    pass


class SampledAxiomsRejected(GroupError):
    """A theorem check was requested on a group whose associativity was only sampled."""
    pass


# Homomorphisms

class HomomorphismError(AtomicityError):
    """Base class for homomorphism errors."""
    pass


class NotAHomomorphism(HomomorphismError):
    """The map breaks pi(xy) = pi(x)pi(y) at the given pair."""

    def __init__(self, x: int, y: int, detail: str = ""):
        message = f"map is not a homomorphism at x={x}, y={y}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message, {"x": x, "y": y})
        self.x = x
        self.y = y


class NotNormal(HomomorphismError):
    """The subgroup is not normal; ``g`` conjugates it to a different set."""

    def __init__(self, g: int):
        super().__init__(f"subgroup is not normal: g={g} gives gKg^-1 != K", {"g": g})
        self.g = g


class WitnessCheckFailed(HomomorphismError):
    """The first-isomorphism witness does not preserve the operation at (a, b)."""

    def __init__(self, a: int, b: int, detail: str = "", prop: str = "bijective"):
        message = f"isomorphism witness is not {prop} at a={a}, b={b}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message, {"a": a, "b": b})
        self.a = a
        self.b = b
        self.prop = prop


# Actions

class ActionError(AtomicityError):
    """Base class for group-action errors."""
    pass


class NotABijection(ActionError):
    """Row ``g`` of an action table is not a bijection of X."""

    def __init__(self, g: int):
        super().__init__(f"action row {g} is not a bijection", {"g": g})
        self.g = g


class NotAnAction(ActionError):
    """The action law (gh)x = g(hx) fails at the given triple."""

    def __init__(self, g: int, h: int, x: int):
        super().__init__(f"action law fails at g={g}, h={h}, x={x}", {"g": g, "h": h, "x": x})
        self.g = g
        self.h = h
        self.x = x


class PointOutOfRange(ActionError):
    """A point index lies outside 0..set_size-1."""

    def __init__(self, point: int, set_size: int):
        super().__init__(f"point {point} out of range for set size {set_size}", {"point": point, "set_size": set_size})


# Linear algebra

class LinearAlgebraError(AtomicityError):
    """Base class for exact linear-algebra errors."""
    pass


class NotAPrime(LinearAlgebraError):
    """GF(p) was requested for a composite or non-positive modulus."""

    def __init__(self, p: int):
        super().__init__(f"{p} is not prime", {"p": p})
        self.p = p


class FieldDivisionByZero(LinearAlgebraError):
    """Division by the zero element of a field."""
    pass


class DimensionMismatch(LinearAlgebraError):
    """Operand shapes do not fit together."""
    pass


class FieldMismatch(LinearAlgebraError):
    """Operands live over different fields."""
    pass


class NotASolutionSet(LinearAlgebraError):
    """A solution family failed verification against its system."""
    pass


# Reports

class ReportFormatError(AtomicityError):
    """A report or structured report document is malformed."""
    pass
