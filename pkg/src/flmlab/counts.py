"""Exact vertex/facet counts.

Dyadic Hanner constructions produce counts like ``2**(2**30)`` whose binary
expansion would not fit in memory. :class:`ExactCount` stores a
non-negative integer as ``odd * 2**exp`` so that the products and
self-sums that dominate those recursions stay cheap, while every value
remains an exact integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import total_ordering

LN2 = math.log(2.0)

# int(ExactCount) refuses to build integers wider than this.
MAX_MATERIALIZED_BITS = 1 << 24


@total_ordering
class ExactCount:
    __slots__ = ("odd", "exp")

    def __init__(self, value: int = 0, exp: int = 0):
        value = int(value)
        if value < 0 or exp < 0:
            raise ValueError("counts are non-negative")
        if value == 0:
            self.odd, self.exp = 0, 0
            return
        tz = (value & -value).bit_length() - 1
        self.odd = value >> tz
        self.exp = exp + tz

    @classmethod
    def of(cls, value: "int | ExactCount") -> "ExactCount":
        return value if isinstance(value, ExactCount) else cls(value)

    @classmethod
    def pow2(cls, exp: int) -> "ExactCount":
        return cls(1, exp)

    def __mul__(self, other):
        other = ExactCount.of(other)
        if self.odd == 0 or other.odd == 0:
            return ExactCount(0)
        return ExactCount(self.odd * other.odd, self.exp + other.exp)

    __rmul__ = __mul__

    def __add__(self, other):
        other = ExactCount.of(other)
        if other.odd == 0:
            return self
        if self.odd == 0:
            return other
        if self.odd == other.odd and self.exp == other.exp:
            return ExactCount(self.odd, self.exp + 1)
        lo = min(self.exp, other.exp)
        total = (self.odd << (self.exp - lo)) + (other.odd << (other.exp - lo))
        return ExactCount(total, lo)

    __radd__ = __add__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        return ExactCount(self.odd**k, self.exp * k) if self.odd else ExactCount(0 if k else 1)

    def bit_length(self) -> int:
        return self.odd.bit_length() + self.exp if self.odd else 0

    def __int__(self) -> int:
        if self.bit_length() > MAX_MATERIALIZED_BITS:
            raise OverflowError(f"count has {self.bit_length()} bits; use log() instead")
        return self.odd << self.exp

    __index__ = __int__

    def log(self) -> float:
        """Natural logarithm, exact up to double rounding."""
        if self.odd == 0:
            return -math.inf
        return math.log(self.odd) + self.exp * LN2

    def log2(self) -> float:
        if self.odd == 0:
            return -math.inf
        return math.log2(self.odd) + self.exp

    def __eq__(self, other):
        if isinstance(other, (int, ExactCount)):
            other = ExactCount.of(other)
            return self.odd == other.odd and self.exp == other.exp
        return NotImplemented

    def __lt__(self, other):
        other = ExactCount.of(other)
        if self.bit_length() != other.bit_length():
            return self.bit_length() < other.bit_length()
        lo = min(self.exp, other.exp)
        return (self.odd << (self.exp - lo)) < (other.odd << (other.exp - lo))

    def __hash__(self):
        if self.bit_length() <= 64:
            return hash(int(self))
        return hash((self.odd, self.exp))

    def __repr__(self):
        if self.bit_length() <= 128:
            return f"ExactCount({int(self)})"
        return f"ExactCount({self.odd}*2**{self.exp})"

    def __str__(self):
        if self.bit_length() <= 256:
            return str(int(self))
        return f"{self.odd}*2^{self.exp}" if self.odd != 1 else f"2^{self.exp}"


@dataclass(frozen=True)
class FCount:
    num_vertices: ExactCount
    num_facets: ExactCount
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "num_vertices", ExactCount.of(self.num_vertices))
        object.__setattr__(self, "num_facets", ExactCount.of(self.num_facets))

    @property
    def log_v(self) -> float:
        return self.num_vertices.log()

    @property
    def log_f(self) -> float:
        return self.num_facets.log()

    def swapped(self) -> "FCount":
        return FCount(self.num_facets, self.num_vertices, self.dim)

    def as_tuple(self) -> tuple[int, int]:
        return int(self.num_vertices), int(self.num_facets)
