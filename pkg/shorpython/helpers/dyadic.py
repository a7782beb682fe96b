"""Exact angles of the form 2*pi*num/2**pow2.

Every rotation in the construction is a dyadic fraction of a full turn, so angles are kept
as (numerator, power of two) pairs and only turned into floats when a gate is applied.
"""
import math
from fractions import Fraction
from typing import Tuple


def canonical(num: int, pow2: int) -> Tuple[int, int]:
    """Reduces num/2**pow2 turns modulo one full turn to lowest terms.

    Returns: (num, pow2) with 0 <= num < 2**pow2 and num odd, or (0, 0) for a zero angle.
    """
    if pow2 < 0:
        raise ValueError("pow2 must be non-negative")
    turns = Fraction(num, 1 << pow2) % 1
    return turns.numerator, turns.denominator.bit_length() - 1


def negate(num: int, pow2: int) -> Tuple[int, int]:
    return canonical(-num, pow2)


def to_radians(num: int, pow2: int) -> float:
    return 2 * math.pi * num / (1 << pow2)
