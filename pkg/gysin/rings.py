"""
Coefficient rings: the integers, the rationals, and prime fields.

All three are Euclidean, so the elimination routines in exactlin are written
once against the small interface below. Elements are plain Python ``int``
(ℤ and ℤ/p, the latter reduced into [0, p)) or ``fractions.Fraction`` (ℚ).
"""
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np
from sympy import isprime

from gysin.errors import BadParams

Scalar = Union[int, Fraction]


class RingKind(Enum):
    """Supported coefficient rings"""
    INTEGERS = "Z"
    RATIONALS = "Q"
    PRIME_FIELD = "Zp"


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Extended Euclid on integers: returns (x, y, g) with x*a + y*b == g >= 0."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


@dataclass(frozen=True)
class Ring:
    kind: RingKind
    p: Optional[int] = None  # characteristic, PRIME_FIELD only

    def __post_init__(self):
        if self.kind is RingKind.PRIME_FIELD:
            if not isinstance(self.p, int) or isinstance(self.p, bool) or not isprime(self.p):
                raise BadParams(f"prime field needs a prime modulus, got {self.p!r}")
        elif self.p is not None:
            raise BadParams(f"{self.kind.value} takes no modulus")

    # ------------------------
    # Constructors and naming
    # ------------------------
    @classmethod
    def integers(cls) -> "Ring":
        return cls(RingKind.INTEGERS)

    @classmethod
    def rationals(cls) -> "Ring":
        return cls(RingKind.RATIONALS)

    @classmethod
    def prime_field(cls, p: int) -> "Ring":
        return cls(RingKind.PRIME_FIELD, p)

    @classmethod
    def parse(cls, text: str) -> "Ring":
        """Accepts "Z", "Q", "Zp:5", "Z/5" or "F5"."""
        token = text.strip()
        if token in ("Z", "ZZ"):
            return cls.integers()
        if token in ("Q", "QQ"):
            return cls.rationals()
        for prefix in ("Zp:", "Z/", "F"):
            if token.startswith(prefix) and token[len(prefix):].isdigit():
                return cls.prime_field(int(token[len(prefix):]))
        raise BadParams(f"unknown ring {text!r}")

    @property
    def label(self) -> str:
        if self.kind is RingKind.PRIME_FIELD:
            return f"Z/{self.p}"
        return self.kind.value

    @property
    def is_field(self) -> bool:
        return self.kind is not RingKind.INTEGERS

    def __str__(self) -> str:
        return self.label

    # ------------------------
    # Scalars
    # ------------------------
    def coerce(self, value) -> Scalar:
        if isinstance(value, bool):
            raise BadParams("booleans are not ring elements")
        if self.kind is RingKind.RATIONALS:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                if self.kind is RingKind.PRIME_FIELD:
                    return value.numerator * pow(value.denominator, -1, self.p) % self.p
                raise BadParams(f"{value} is not an integer")
            value = value.numerator
        value = int(value)
        if self.kind is RingKind.PRIME_FIELD:
            return value % self.p
        return value

    def reduce(self, value: Scalar) -> Scalar:
        if self.kind is RingKind.PRIME_FIELD:
            return value % self.p
        return value

    def reduce_array(self, arr: np.ndarray) -> np.ndarray:
        if self.kind is RingKind.PRIME_FIELD and arr.size:
            return arr % self.p
        return arr

    def is_unit(self, a: Scalar) -> bool:
        if self.is_field:
            return a != 0
        return a in (1, -1)

    def inverse(self, a: Scalar) -> Scalar:
        if self.kind is RingKind.PRIME_FIELD:
            return pow(int(a), -1, self.p)
        if self.kind is RingKind.RATIONALS:
            return 1 / Fraction(a)
        if a in (1, -1):
            return a
        raise BadParams(f"{a} is not a unit in Z")

    def divides(self, a: Scalar, b: Scalar) -> bool:
        """True when a | b."""
        if a == 0:
            return b == 0
        if self.is_field:
            return True
        return b % a == 0

    def exact_quotient(self, b: Scalar, a: Scalar) -> Scalar:
        """b / a, assuming a | b."""
        if self.kind is RingKind.INTEGERS:
            return b // a
        return self.reduce(b * self.inverse(a))

    def floor_quotient(self, b: Scalar, a: Scalar) -> Scalar:
        """Euclidean quotient q with b - q*a canonical (in [0, |a|) over Z, zero over a field)."""
        if self.kind is RingKind.INTEGERS:
            return b // a if a > 0 else -(b // -a)
        return self.exact_quotient(b, a)

    def canonical_unit(self, a: Scalar) -> Scalar:
        """Unit u such that u*a is the canonical associate (positive, or 1 over a field)."""
        if a == 0:
            return 1
        if self.is_field:
            return self.inverse(a)
        return 1 if a > 0 else -1

    def gcdex(self, a: Scalar, b: Scalar) -> Tuple[Scalar, Scalar, Scalar]:
        """(s, t, g) with s*a + t*b == g, g the canonical gcd."""
        if self.kind is RingKind.INTEGERS:
            return xgcd(a, b)
        zero, one = self.coerce(0), self.coerce(1)
        if a != 0:
            return self.inverse(a), zero, one
        if b != 0:
            return zero, self.inverse(b), one
        return one, zero, zero

    def size(self, a: Scalar) -> int:
        """Euclidean size used to pick pivots."""
        if self.is_field:
            return 0 if a == 0 else 1
        return abs(a)

    def residue(self, value: Scalar, modulus: Scalar) -> Scalar:
        """Canonical representative of value modulo an invariant factor (0 means no reduction)."""
        if modulus == 0 or self.is_field:
            return value
        return value % modulus


ZZ = Ring.integers()
QQ = Ring.rationals()
