"""Short-interval Taylor models ``a(N+h) ≈ Σ_{j<=k} a^{(j)}(N)/j! · h^j``."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from ..errors import InvalidArgument
from ..floors import FloorValues, resolve_floors
from .expr import HardyExpr, as_expr

DPS = 40


@dataclass(frozen=True)
class TaylorModel:
    """Degree-``k`` Taylor polynomial of ``expr`` at ``N`` on ``[N, N+L]``.

    ``theta`` is the remainder bound ``|a^{(k+1)}(N)|/(k+1)! · L^{k+1}``, which
    dominates the true error whenever ``|a^{(k+1)}|`` decreases on the window.
    """

    expr: HardyExpr
    N: int
    L: int
    k: int
    coefficients: tuple
    theta: mpmath.mpf

    @property
    def coefficients_float(self) -> tuple:
        return tuple(float(c) for c in self.coefficients)

    @property
    def theta_float(self) -> float:
        return float(self.theta)

    def value(self, h) -> mpmath.mpf:
        """``p_N(h)`` in high precision."""
        with mpmath.workdps(DPS):
            h = mpmath.mpf(int(h)) if float(h).is_integer() else mpmath.mpf(h)
            acc = mpmath.mpf(0)
            for c in reversed(self.coefficients):
                acc = acc * h + c
            return acc

    def error(self, h) -> float:
        """``|a(N+h) − p_N(h)|`` in high precision."""
        with mpmath.workdps(DPS):
            return float(abs(self.expr.mp(self.N + int(h), DPS) - self.value(h)))

    def floors(self, h: np.ndarray) -> FloorValues:
        """Floors of ``p_N(h)`` at integer ``h``.

        The integer part of ``c_0`` is split off so the double precision pass
        only handles a moderate-size remainder.
        """
        h = np.asarray(h)
        with mpmath.workdps(DPS):
            c0 = self.coefficients[0]
            base = int(mpmath.floor(c0))
            rest = [float(c0 - base)] + [float(c) for c in self.coefficients[1:]]
        hf = h.astype(np.float64)
        acc = np.zeros(hf.shape)
        for c in reversed(rest):
            acc = acc * hf + c
        out = resolve_floors(acc, lambda i: self.value(int(h[i])) - base, DPS)
        return FloorValues(out.floor + base, out.frac, out.ambiguous)


def taylor_model(e, N: int, L: int, k: int) -> TaylorModel:
    """Build the Taylor model of ``e`` at ``N`` of degree ``k`` for windows of length ``L``.

    Raises:
        InvalidArgument: if ``k < 0`` or ``L < 0``.
    """
    if k < 0 or L < 0:
        raise InvalidArgument(f"need k >= 0 and L >= 0, got k={k}, L={L}")
    e = as_expr(e)
    with mpmath.workdps(DPS):
        coeffs = tuple(e.derivative(j).mp(N, DPS) / mpmath.factorial(j) for j in range(k + 1))
        theta = abs(e.derivative(k + 1).mp(N, DPS)) / mpmath.factorial(k + 1) * mpmath.mpf(L) ** (k + 1)
    return TaylorModel(e, int(N), int(L), int(k), coeffs, theta)
