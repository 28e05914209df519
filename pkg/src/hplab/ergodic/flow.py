"""The flow extension ``Y = X × [0,1)^{kℓ}`` that turns floors into flows.

For commuting maps ``T_1, …, T_k`` of ``X`` define on ``Y`` the commuting
flows ``S_{i,j,s}(x, a) = (T_i^{⌊s + a_{ij}⌋} x, a')`` where ``a'`` equals
``a`` except ``a'_{ij} = {s + a_{ij}}``.  At ``a = 0`` the time-``p_{ij}(n)``
maps reproduce ``∏_j T_i^{⌊p_{ij}(n)⌋}``.

Points of ``X`` are tracked as integer exponent vectors over a base point, so
every identity is checked in exact rational arithmetic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import InvalidArgument, InvalidSystem
from ..poly import RealPoly
from .systems import ErgodicSystem, TorusRotation


@dataclass(frozen=True)
class FlowPoint:
    """``(T_1^{e_1}⋯T_k^{e_k} x_0, a)`` with ``a`` a ``k × ℓ`` table of Fractions in ``[0, 1)``."""

    exponents: tuple
    a: tuple


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class FlowExtension:
    base: ErgodicSystem
    k: int
    ell: int
    polys: tuple = ()

    def origin(self) -> FlowPoint:
        return FlowPoint((0,) * self.k, tuple((Fraction(0),) * self.ell for _ in range(self.k)))

    def act(self, i: int, j: int, s, point: FlowPoint) -> FlowPoint:
        """``S_{i,j,s}`` applied to ``point`` (``s`` is converted to a Fraction)."""
        s = Fraction(s)
        a_ij = point.a[i][j]
        jump = math.floor(s + a_ij)
        exps = list(point.exponents)
        exps[i] += jump
        rows = [list(r) for r in point.a]
        rows[i][j] = _frac(s + a_ij)
        return FlowPoint(tuple(exps), tuple(tuple(r) for r in rows))

    def act_all(self, times: Sequence[Sequence], point: FlowPoint) -> FlowPoint:
        """``∏_{i,j} S_{i,j,times[i][j]}`` applied to ``point``."""
        for i in range(self.k):
            for j in range(self.ell):
                point = self.act(i, j, times[i][j], point)
        return point

    def base_formula(self, times: Sequence[Sequence]) -> tuple:
        """Exponents of ``∏_i T_i^{Σ_j ⌊times[i][j]⌋}``."""
        return tuple(sum(math.floor(Fraction(t)) for t in row) for row in times)

    def realize(self, point: FlowPoint, x0=None) -> np.ndarray:
        """The point of ``X`` with the given exponents, when ``X`` is a torus."""
        if not isinstance(self.base, TorusRotation):
            raise InvalidSystem("realize needs a torus base system")
        x0 = np.zeros(self.base.dim) if x0 is None else np.asarray(x0, dtype=np.float64)
        counts = [np.array([e], dtype=np.int64) for e in point.exponents]
        return self.base.points(counts, x0[None, :])[0, 0]

    def times_at(self, n: int) -> list[list[Fraction]]:
        """``p_{ij}(n)`` as exact Fractions (float coefficients read as dyadic rationals)."""
        if not self.polys:
            raise InvalidArgument("this extension carries no polynomial family")
        return [[_poly_exact(p, n) for p in row] for row in self.polys]


def _poly_exact(p: RealPoly, n: int) -> Fraction:
    total = Fraction(0)
    for j, c in enumerate(p.coeffs):
        ex = p.exact[j] if p.exact is not None and j < len(p.exact) and p.exact[j] is not None else Fraction(c)
        total += Fraction(ex) * n**j
    return total


@dataclass(frozen=True)
class LiftCheck:
    trials: int
    failures: int
    examples: tuple

    @property
    def ok(self) -> bool:
        return self.failures == 0


def _random_fraction(rng: random.Random, lo: int, hi: int) -> Fraction:
    den = rng.randint(1, 10**6)
    return Fraction(rng.randint(lo * den, hi * den), den)


def identity_check(ext: FlowExtension, trials: int = 1000, seed: int = 0) -> LiftCheck:
    """Randomized exact checks of the lift.

    Each trial draws rational times and checks three identities:
    ``S_t S_s = S_{s+t}`` on a random point, ``S_s`` against the closed form
    ``(T^{⌊s+a⌋}x, {s+a})``, and ``∏ S_{i,j,t_{ij}}(x, 0)`` against the base
    floor-iterate formula ``∏_i T_i^{Σ_j ⌊t_{ij}⌋}``.
    """
    rng = random.Random(seed)
    failures = []
    for trial in range(trials):
        i, j = rng.randrange(ext.k), rng.randrange(ext.ell)
        exps = tuple(rng.randint(-50, 50) for _ in range(ext.k))
        a = tuple(tuple(_frac(_random_fraction(rng, 0, 1)) for _ in range(ext.ell)) for _ in range(ext.k))
        pt = FlowPoint(exps, a)
        s, t = _random_fraction(rng, -100, 100), _random_fraction(rng, -100, 100)
        lhs = ext.act(i, j, t, ext.act(i, j, s, pt))
        rhs = ext.act(i, j, s + t, pt)
        single = ext.act(i, j, s, pt)
        jump = math.floor(s + a[i][j])
        closed_ok = single.exponents[i] == exps[i] + jump and single.a[i][j] == _frac(s + a[i][j])
        times = [[_random_fraction(rng, -10**6, 10**6) for _ in range(ext.ell)] for _ in range(ext.k)]
        prod = ext.act_all(times, ext.origin())
        base_ok = prod.exponents == ext.base_formula(times)
        if lhs != rhs or not closed_ok or not base_ok:
            failures.append((trial, s, t))
    return LiftCheck(trials, len(failures), tuple(failures[:5]))


def lift_to_flow(base: ErgodicSystem, k: int, ell: int, polys: Sequence[Sequence[RealPoly]] = ()) -> FlowExtension:
    """Build the extension for ``k`` maps and ``ℓ`` functions per map.

    Raises:
        InvalidSystem: if ``base`` is not a torus rotation with ``k`` maps.
    """
    if not isinstance(base, TorusRotation):
        raise InvalidSystem("the flow lift is modelled for torus rotations only")
    if base.n_maps != k or k < 1 or ell < 1:
        raise InvalidSystem(f"need k = number of maps ({base.n_maps}) and ell >= 1")
    polys = tuple(tuple(row) for row in polys)
    if polys and (len(polys) != k or any(len(r) != ell for r in polys)):
        raise InvalidArgument("polys must be a k × ell table")
    return FlowExtension(base, k, ell, polys)


def non_concentration(p: RealPoly, N: int, L: int, delta: float) -> float:
    """Fraction of ``n ∈ [N, N+L]`` with ``{p(n)} ∈ [1−δ, 1)``."""
    n = np.arange(N, N + L + 1)
    f = p.frac(n)
    return float(np.mean(f >= 1.0 - delta))
