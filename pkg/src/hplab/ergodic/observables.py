"""Observables on tori and on the Heisenberg fundamental domain.

Trigonometric polynomials carry their Fourier data, which lets torus
averages be computed exactly.  Anything else is an :class:`Observable`
wrapping a vectorized function of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import InvalidArgument


@dataclass(frozen=True)
class Observable:
    """A bounded function on ``[0,1)^d`` given by ``func(points) -> values``.

    ``points`` has shape ``(..., d)``.  ``sup`` bounds ``|f|``.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    sup: float = 1.0
    name: str = "f"

    def __call__(self, points) -> np.ndarray:
        return np.asarray(self.func(np.asarray(points, dtype=np.float64)), dtype=np.complex128)


@dataclass(frozen=True, init=False)
class TrigPoly(Observable):
    """``f(x) = Σ_t c_t e(k_t·x)`` with integer frequency vectors ``k_t``."""

    freqs: np.ndarray = None
    coeffs: np.ndarray = None

    def __init__(self, freqs, coeffs, name: str = "trig"):
        freqs = np.atleast_2d(np.asarray(freqs, dtype=np.int64))
        coeffs = np.asarray(coeffs, dtype=np.complex128).ravel()
        if freqs.shape[0] != coeffs.size:
            raise InvalidArgument("one coefficient per frequency vector is required")
        keep = coeffs != 0
        if not keep.any():
            freqs, coeffs = freqs[:1] * 0, np.zeros(1, dtype=np.complex128)
        else:
            freqs, coeffs = freqs[keep], coeffs[keep]
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "dim", int(freqs.shape[1]))
        object.__setattr__(self, "sup", float(np.abs(coeffs).sum()))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "func", self._eval)

    def _eval(self, points: np.ndarray) -> np.ndarray:
        phase = points @ self.freqs.T.astype(np.float64)
        return np.exp(2j * np.pi * phase) @ self.coeffs

    @property
    def mean(self) -> complex:
        """Coefficient of the zero frequency (the Haar integral on the full torus)."""
        zero = np.all(self.freqs == 0, axis=1)
        return complex(self.coeffs[zero].sum())

    def __hash__(self):
        return hash((self.name, self.freqs.tobytes(), self.coeffs.tobytes()))

    def __eq__(self, other):
        return (
            isinstance(other, TrigPoly)
            and np.array_equal(self.freqs, other.freqs)
            and np.array_equal(self.coeffs, other.coeffs)
        )


def character(*k: int) -> TrigPoly:
    """``e(k·x)``."""
    return TrigPoly([list(k)], [1.0], name=f"e({','.join(map(str, k))})")


def constant(c: complex = 1.0, dim: int = 1) -> TrigPoly:
    return TrigPoly([[0] * dim], [c], name=f"const({c})")


def smoothed_arc(a: float, b: float, K: int = 16, dim: int = 1, axis: int = 0) -> TrigPoly:
    """Fejér-smoothed indicator of the arc ``[a, b)`` (length ``b − a <= 1``).

    The coefficients are ``1̂_{[a,b)}(k)·(1 − |k|/(K+1))`` for ``|k| <= K``; the
    result is real, takes values in ``[0, 1]`` and has mean ``b − a``.
    """
    if not 0.0 <= b - a <= 1.0:
        raise InvalidArgument(f"arc [{a}, {b}) has invalid length")
    ks = np.arange(-K, K + 1)
    c = np.empty(ks.size, dtype=np.complex128)
    nz = ks != 0
    kk = ks[nz]
    c[nz] = (np.exp(-2j * np.pi * kk * a) - np.exp(-2j * np.pi * kk * b)) / (2j * np.pi * kk)
    c[~nz] = b - a
    c *= 1.0 - np.abs(ks) / (K + 1)
    freqs = np.zeros((ks.size, dim), dtype=np.int64)
    freqs[:, axis] = ks
    return TrigPoly(freqs, c, name=f"arc[{a},{b})~K{K}")


def coordinate_character(k1: int, k2: int, k3: int) -> TrigPoly:
    """``e(k1 x1 + k2 x2 + k3 x3)`` in Mal'cev coordinates of the fundamental domain."""
    return TrigPoly([[k1, k2, k3]], [1.0], name=f"e({k1}x1+{k2}x2+{k3}x3)")


def product_bound(observables) -> float:
    return float(np.prod([f.sup for f in observables]))


def as_observable(f, dim: int) -> Observable:
    if isinstance(f, Observable):
        if f.dim != dim:
            raise InvalidArgument(f"observable {f.name} has dimension {f.dim}, system has {dim}")
        return f
    if isinstance(f, (int, float, complex)):
        return constant(f, dim)
    if callable(f):
        return Observable(f, dim, 1.0, getattr(f, "__name__", "f"))
    raise InvalidArgument(f"cannot use {f!r} as an observable")


