"""Exact scalar fields: the rationals and prime fields GF(p).

Rationals are ``fractions.Fraction`` values (always reduced, positive
denominator); GF(p) elements are plain ints in 0..p-1.
"""

import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Union

from kernel_atomicity.utils.errors import FieldDivisionByZero, LinearAlgebraError, NotAPrime

Scalar = Union[Fraction, int]

_SCALAR_TEXT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def is_prime(n: int) -> bool:
    """Trial division."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def parse_fraction(value: Any) -> Fraction:
    """Read an integer or a ``"num/den"`` / ``"num"`` string exactly; floats are refused."""
    if isinstance(value, bool):
        raise LinearAlgebraError(f"{value!r} is not an exact scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        match = _SCALAR_TEXT.match(value)
        if match:
            num, den = int(match.group(1)), int(match.group(2) or 1)
            if den == 0:
                raise FieldDivisionByZero(f"zero denominator in {value!r}", {"value": value})
            return Fraction(num, den)
    raise LinearAlgebraError(f"{value!r} is not an exact scalar (use an integer or 'num/den')", {"value": repr(value)})


class Field(ABC):
    """Arithmetic of one exact field."""

    tag: str

    @abstractmethod
    def convert(self, value: Any) -> Scalar:
        """Bring an integer, fraction or ``"num/den"`` string into the field."""

    @property
    @abstractmethod
    def zero(self) -> Scalar: ...

    @property
    @abstractmethod
    def one(self) -> Scalar: ...

    @abstractmethod
    def add(self, a: Scalar, b: Scalar) -> Scalar: ...

    @abstractmethod
    def mul(self, a: Scalar, b: Scalar) -> Scalar: ...

    @abstractmethod
    def neg(self, a: Scalar) -> Scalar: ...

    @abstractmethod
    def inv(self, a: Scalar) -> Scalar: ...

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return self.add(a, self.neg(b))

    def div(self, a: Scalar, b: Scalar) -> Scalar:
        return self.mul(a, self.inv(b))

    def is_zero(self, a: Scalar) -> bool:
        return a == self.zero

    def format(self, a: Scalar) -> str:
        return str(a)


@dataclass(frozen=True)
class RationalField(Field):
    tag: str = "Q"

    def convert(self, value: Any) -> Fraction:
        return parse_fraction(value)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a: Fraction, b: Fraction) -> Fraction:
        return a + b

    def mul(self, a: Fraction, b: Fraction) -> Fraction:
        return a * b

    def neg(self, a: Fraction) -> Fraction:
        return -a

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise FieldDivisionByZero("division by zero in Q")
        return 1 / a

    def __str__(self) -> str:
        return "Q"


@dataclass(frozen=True)
class PrimeField(Field):
    p: int
    tag: str = "GF"

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int) or not is_prime(self.p):
            raise NotAPrime(self.p)

    def convert(self, value: Any) -> int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value % self.p
        q = parse_fraction(value)
        if q.denominator % self.p == 0:
            raise FieldDivisionByZero(f"denominator of {value!r} vanishes mod {self.p}", {"value": str(value)})
        return (q.numerator * pow(q.denominator, -1, self.p)) % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise FieldDivisionByZero(f"division by zero in GF({self.p})")
        return pow(a, -1, self.p)

    def __str__(self) -> str:
        return f"GF({self.p})"


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)
