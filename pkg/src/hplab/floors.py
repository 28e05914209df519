"""Reliable floors and fractional parts of real-valued sequences.

Values are computed in double precision first.  Those lying within a few
ulps of an integer are recomputed with mpmath; after that, values that are
within :data:`GUARD` of an integer without being an exact integer are
flagged *ambiguous*, and callers exclude them from counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .errors import InternalError

GUARD = 1e-12
_EXACT = mpmath.mpf(10) ** -30


@dataclass(frozen=True)
class FloorValues:
    """Floors, fractional parts and ambiguity flags of a sequence."""

    floor: np.ndarray
    frac: np.ndarray
    ambiguous: np.ndarray

    @property
    def ambiguous_count(self) -> int:
        return int(self.ambiguous.sum())


def resolve_floors(
    approx: np.ndarray, exact: Callable[[int], mpmath.mpf], dps: int = 40, band: float | None = None
) -> FloorValues:
    """Floors of a sequence given double approximations and a precise evaluator.

    Args:
        approx: double precision values.
        exact: ``i -> value_i`` in mpmath, called only near integers.
        dps: working precision for the refinement.
        band: refinement band; default ``64 ulp(|v|) + 1e-9``.
    """
    approx = np.asarray(approx, dtype=np.float64)
    if not np.all(np.isfinite(approx)):
        raise InternalError("non-finite value where a floor was requested")
    if np.max(np.abs(approx), initial=0.0) > 2.0**62:
        raise InternalError("floor value exceeds the int64 range")
    fl = np.floor(approx)
    frac = approx - fl
    width = 64 * np.spacing(np.abs(approx)) + 1e-9 if band is None else np.full(approx.shape, band)
    near = (frac < width) | (1.0 - frac < width)
    ambiguous = np.zeros(approx.shape, dtype=bool)
    fl = fl.astype(np.int64)
    if near.any():
        with mpmath.workdps(dps):
            for i in np.flatnonzero(near):
                v = exact(int(i))
                f = mpmath.floor(v)
                r = v - f
                fl[i] = int(f)
                frac[i] = float(r)
                if 1 - r <= _EXACT:
                    # Exact integer approached from below by rounding noise.
                    fl[i] = int(f) + 1
                    frac[i] = 0.0
                elif r > _EXACT and (r < GUARD or 1 - r < GUARD):
                    ambiguous[i] = True
    return FloorValues(fl, frac, ambiguous)


def floor_expr(e, x: np.ndarray, dps: int = 40) -> FloorValues:
    """Floors of ``e(x_i)`` for a Hardy expression at integer points ``x``."""
    x = np.asarray(x)
    approx = e(x.astype(np.float64))
    return resolve_floors(approx, lambda i: e.mp(int(x[i]), dps), dps)
