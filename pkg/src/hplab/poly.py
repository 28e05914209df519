"""Real polynomials with per-coefficient rationality markers.

Polynomial phases ``e(p(n))`` only depend on ``p(n) mod 1``.  For integer
``n`` the Horner recursion can be reduced modulo 1 after every step, which
keeps the working values in ``[0, 1)`` and avoids the catastrophic loss of
digits that evaluating ``p(n)`` directly would cause for large ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

RATIONAL = "rational"
IRRATIONAL = "irrational"


@dataclass(frozen=True)
class RealPoly:
    """``p(t) = Σ_j coeffs[j]·t^j`` (ascending order).

    Attributes:
        coeffs: real coefficients.
        markers: optional rationality marker per coefficient
            (``"rational"``, ``"irrational"`` or ``None`` when unknown).
        exact: optional exact rational value per coefficient, used when a
            coefficient is known to be rational.
    """

    coeffs: tuple
    markers: Optional[tuple] = None
    exact: Optional[tuple] = None

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float], markers: Optional[Sequence] = None) -> "RealPoly":
        coeffs = tuple(float(c) for c in coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0.0:
            coeffs = coeffs[:-1]
            if markers is not None:
                markers = tuple(markers)[: len(coeffs)]
        return cls(coeffs, None if markers is None else tuple(markers)[: len(coeffs)])

    @classmethod
    def zero(cls) -> "RealPoly":
        return cls((0.0,), (RATIONAL,), (Fraction(0),))

    @property
    def degree(self) -> int:
        for j in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[j] != 0.0:
                return j
        return 0

    def is_constant(self) -> bool:
        return self.degree == 0

    def marker(self, j: int):
        if self.markers is None:
            return None
        return self.markers[j] if j < len(self.markers) else RATIONAL

    def has_irrational_nonconstant(self) -> bool:
        return any(
            self.coeffs[j] != 0.0 and self.marker(j) == IRRATIONAL
            for j in range(1, len(self.coeffs))
        )

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        acc = np.zeros_like(t)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def frac(self, n) -> np.ndarray:
        """``p(n) mod 1`` for integer ``n`` via Horner reduced modulo 1.

        Valid because ``(x + m)·n ≡ x·n (mod 1)`` for integers ``m`` and ``n``;
        the absolute error per step is about ``|n|`` ulps.
        """
        n = np.asarray(n, dtype=np.float64)
        acc = np.zeros(n.shape)
        for c in reversed(self.coeffs):
            acc = np.mod(acc * n + (c % 1.0), 1.0)
        return acc

    def derivative(self) -> "RealPoly":
        if len(self.coeffs) == 1:
            return RealPoly.zero()
        coeffs = tuple(j * self.coeffs[j] for j in range(1, len(self.coeffs)))
        markers = None if self.markers is None else self.markers[1:]
        return RealPoly(coeffs, markers)
