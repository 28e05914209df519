"""Exact fractional parts of integer multiples of real constants.

A constant ``α`` is stored as the integer ``round(α·2^K)`` with ``K = 128``,
so ``{m·α}`` for an integer ``m`` is read off from ``m·A mod 2^K`` with an
error of about ``|m|·2^{-128}``.  Double precision would lose ``log2|m|``
bits instead, which matters for iterates like ``⌊p^{3/2}⌋`` that reach 10^9.

Products of integers with coordinates of points go through
:func:`int_times`, which keeps ``{m·x}`` accurate for large ``m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..hardy.expr import Const
from ..hardy.parser import parse_constant

K = 128
_MOD = 1 << K
_SHIFT = K - 53
_DPS = 50


@dataclass(frozen=True)
class FixedReal:
    """A real number ``x`` as ``full = round(x·2^K)`` (signed) plus metadata.

    ``fixed`` is ``full mod 2^K``, the representation of ``{x}``; ``exact`` is
    the rational value when known.
    """

    full: int
    value: float
    exact: Fraction | None = None
    label: str = ""

    @property
    def fixed(self) -> int:
        return self.full % _MOD

    @property
    def mp(self) -> mpmath.mpf:
        with mpmath.workdps(_DPS):
            if self.exact is not None:
                return mpmath.mpf(self.exact.numerator) / self.exact.denominator
            return mpmath.mpf(self.full) / _MOD

    @classmethod
    def of(cls, x) -> "FixedReal":
        """Accepts a :class:`FixedReal`, :class:`Const`, text, int, Fraction or float."""
        if isinstance(x, FixedReal):
            return x
        if isinstance(x, str):
            x = parse_constant(x)
        if isinstance(x, Const):
            if x.exact is not None:
                return cls._from_fraction(Fraction(x.exact), x.label or str(x.exact))
            return cls._from_mp(x.value, x.label)
        if isinstance(x, (int, Fraction)):
            return cls._from_fraction(Fraction(x), str(x))
        if isinstance(x, mpmath.mpf):
            return cls._from_mp(x, mpmath.nstr(x, 17))
        # A float is taken at face value: the dyadic rational it stores.
        return cls._from_fraction(Fraction(float(x)), repr(float(x)))

    @classmethod
    def _from_fraction(cls, q: Fraction, label: str) -> "FixedReal":
        return cls(round(q * _MOD), float(q), q, label)

    @classmethod
    def _from_mp(cls, v, label: str) -> "FixedReal":
        with mpmath.workdps(_DPS):
            v = mpmath.mpf(v)
            return cls(int(mpmath.nint(v * _MOD)), float(v), None, label)

    def __mul__(self, other: "FixedReal") -> "FixedReal":
        if self.exact is not None and other.exact is not None:
            return FixedReal._from_fraction(self.exact * other.exact, f"{self.label}*{other.label}")
        with mpmath.workdps(_DPS):
            return FixedReal._from_mp(self.mp * other.mp, f"{self.label}*{other.label}")

    def frac_mul(self, m) -> np.ndarray:
        """``{m·self}`` for an integer array ``m``."""
        return frac_of_fixed(fixed_mul(m, self.fixed))

    def floor_mul(self, m: int) -> int:
        """``⌊m·self⌋`` (exact for rational values, else to ``2^{-K}`` resolution)."""
        if self.exact is not None:
            return math.floor(m * self.exact)
        return (int(m) * self.full) >> K


def fixed_mul(m, fixed: int) -> list[int]:
    """``m_i·fixed mod 2^K`` as Python ints."""
    return [(int(mi) * fixed) % _MOD for mi in np.asarray(m).ravel()]


def fixed_add(*terms: list[int]) -> list[int]:
    return [sum(vals) % _MOD for vals in zip(*terms)]


def frac_of_fixed(values: list[int]) -> np.ndarray:
    """Convert ``K``-bit fixed-point residues to doubles in ``[0, 1)``."""
    out = np.fromiter((v >> _SHIFT for v in values), dtype=np.float64, count=len(values))
    return out * 2.0**-53


def snap32(x: np.ndarray) -> np.ndarray:
    """Round points of ``[0, 1)`` to multiples of ``2^{-32}``."""
    return np.mod(np.round(np.asarray(x, dtype=np.float64) * 2.0**32), 2.0**32) * 2.0**-32


def int_times(m: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``{m_i·x_j}`` for integers ``m`` (shape ``(n,)``) and reals ``x`` in ``[0, 1)`` (shape ``(P,)``).

    ``x`` is split as ``hi + lo`` with ``hi`` a multiple of ``2^{-32}``; the
    product ``m·hi mod 1`` is exact in wrapping ``uint64`` arithmetic and
    ``m·lo`` is small, so the result is accurate to a few ulps for any ``m``.
    Returns shape ``(n, P)``.
    """
    x = np.asarray(x, dtype=np.float64)
    hi_int = np.floor(x * 2.0**32)
    lo = x - hi_int * 2.0**-32
    m = np.asarray(m, dtype=np.int64)
    mm = (m.astype(np.uint64) & np.uint64(0xFFFFFFFF))[:, None]
    with np.errstate(over="ignore"):
        prod = (mm * hi_int.astype(np.uint64)[None, :]) & np.uint64(0xFFFFFFFF)
    return np.mod(prod.astype(np.float64) * 2.0**-32 + m.astype(np.float64)[:, None] * lo[None, :], 1.0)
