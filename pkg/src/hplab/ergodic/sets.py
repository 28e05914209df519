"""Finite unions of arcs on the circle and products of them on tori.

Measures of intersections of translates are exact up to floating point
rounding of the endpoints, so recurrence averages can be compared with
``μ(A)^{k+1}`` without quadrature error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import UnsupportedSet


def _normalize(arcs) -> tuple:
    pieces = []
    for a, b in arcs:
        a, b = float(a), float(b)
        if b < a:
            raise UnsupportedSet(f"arc [{a}, {b}) has negative length")
        if b - a >= 1.0:
            return ((0.0, 1.0),)
        a0 = a % 1.0
        b0 = a0 + (b - a)
        if b0 <= 1.0:
            pieces.append((a0, b0))
        else:
            pieces.append((a0, 1.0))
            pieces.append((0.0, b0 - 1.0))
    pieces.sort()
    merged: list[list[float]] = []
    for a, b in pieces:
        if b <= a:
            continue
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class ArcSet:
    """A finite union of half-open arcs ``[a, b)`` of ``T = [0, 1)``."""

    arcs: tuple

    @classmethod
    def of(cls, arcs) -> "ArcSet":
        try:
            arcs = [tuple(arcs)] if np.isscalar(arcs[0]) else [tuple(a) for a in arcs]
        except (TypeError, IndexError) as exc:
            raise UnsupportedSet(f"not a finite union of arcs: {arcs!r}") from exc
        if any(len(a) != 2 for a in arcs):
            raise UnsupportedSet(f"not a finite union of arcs: {arcs!r}")
        return cls(_normalize(arcs))

    @property
    def measure(self) -> float:
        return float(sum(b - a for a, b in self.arcs))

    def translate(self, s: float) -> "ArcSet":
        """``A + s``."""
        return ArcSet(_normalize([(a + s, b + s) for a, b in self.arcs]))

    def intersect(self, other: "ArcSet") -> "ArcSet":
        out = []
        i = j = 0
        A, B = self.arcs, other.arcs
        while i < len(A) and j < len(B):
            lo, hi = max(A[i][0], B[j][0]), min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return ArcSet(tuple(out))

    def contains(self, x) -> np.ndarray:
        x = np.mod(np.asarray(x, dtype=np.float64), 1.0)
        inside = np.zeros(x.shape, dtype=bool)
        for a, b in self.arcs:
            inside |= (x >= a) & (x < b)
        return inside


@dataclass(frozen=True)
class BoxSet:
    """A product ``A_1 × ⋯ × A_d`` of arc unions, one per coordinate of ``T^d``."""

    factors: tuple

    @classmethod
    def of(cls, factors: Sequence) -> "BoxSet":
        return cls(tuple(f if isinstance(f, ArcSet) else ArcSet.of(f) for f in factors))

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def measure(self) -> float:
        return float(np.prod([f.measure for f in self.factors]))


def as_set(A, dim: int):
    """Coerce ``A`` to an :class:`ArcSet` (``dim = 1``) or :class:`BoxSet`."""
    if isinstance(A, BoxSet):
        if A.dim != dim:
            raise UnsupportedSet(f"box of dimension {A.dim} on a {dim}-torus")
        return A
    if isinstance(A, ArcSet):
        if dim != 1:
            return BoxSet((A,) + tuple(ArcSet(((0.0, 1.0),)) for _ in range(dim - 1)))
        return A
    if dim == 1:
        return ArcSet.of(A)
    raise UnsupportedSet("sets on higher-dimensional tori must be products of arc unions")


def intersection_measure(A, shifts: np.ndarray) -> float:
    """``μ(A ∩ (A − s_1) ∩ ⋯ ∩ (A − s_k))`` for shift vectors ``s_i`` (rows of ``shifts``)."""
    shifts = np.atleast_2d(np.asarray(shifts, dtype=np.float64))
    if isinstance(A, ArcSet):
        cur = A
        for s in shifts[:, 0]:
            cur = cur.intersect(A.translate(-s))
            if not cur.arcs:
                return 0.0
        return cur.measure
    total = 1.0
    for c, F in enumerate(A.factors):
        total *= intersection_measure(F, shifts[:, c : c + 1])
        if total == 0.0:
            return 0.0
    return total
