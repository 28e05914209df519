"""Concrete measure-preserving systems with exact orbit arithmetic.

Every system acts on a fundamental domain ``[0,1)^d`` and exposes
``points(counts, grid)``: the images ``T_1^{m_1(n)}⋯T_k^{m_k(n)} x`` for
each ``n`` and each grid point ``x``, shape ``(n, P, d)``.  Constants enter
only through :class:`~hplab.ergodic.fixedpoint.FixedReal`, so large
iterates do not lose precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from ..errors import InvalidSystem, Unsupported
from .fixedpoint import K, FixedReal, fixed_add, fixed_mul, frac_of_fixed, int_times, snap32
from .observables import Observable, TrigPoly

GRID_POINTS = 1000
GRID_SEED = 0
HAAR_GRID = 64
COMMUTE_TOL = 1e-12
PUSHFORWARD_TOL = 0.02


@lru_cache(maxsize=16)
def _grid(dim: int, n: int, seed: int) -> np.ndarray:
    pts = qmc.Halton(d=dim, scramble=True, seed=seed).random(n)
    out = snap32(pts)
    out.setflags(write=False)
    return out


def sample_grid(dim: int, n: int = GRID_POINTS, seed: int = GRID_SEED) -> np.ndarray:
    """Scrambled Halton points in ``[0,1)^dim``, snapped to ``2^{-32}`` so they print exactly."""
    return _grid(dim, n, seed)


def _midpoints(n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) / n


def _circular_distance(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    d = np.abs(np.mod(u - v, 1.0))
    return np.minimum(d, 1.0 - d)


class ErgodicSystem:
    """Base class.  Subclasses set ``kind``, ``dim`` and ``n_maps``."""

    kind = "system"
    dim = 1
    n_maps = 1

    def points(self, counts: Sequence[np.ndarray], grid: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def haar_integral(self, f: Observable, base_point=None) -> complex:
        raise NotImplementedError

    def apply(self, powers: Sequence[int], x: np.ndarray) -> np.ndarray:
        """``T_1^{powers[0]}⋯ x`` for a batch of points ``x`` (shape ``(P, d)``)."""
        counts = [np.array([int(p)], dtype=np.int64) for p in powers]
        return self.points(counts, np.atleast_2d(np.asarray(x, dtype=np.float64)))[0]

    def commutation_defect(self, n_points: int = 100, seed: int = 0) -> float:
        """Largest circular distance between ``T_i T_j x`` and ``T_j T_i x`` over random points."""
        rng = np.random.default_rng(seed)
        x = rng.random((n_points, self.dim))
        worst = 0.0
        for i in range(self.n_maps):
            for j in range(i + 1, self.n_maps):
                ei = [1 if t == i else 0 for t in range(self.n_maps)]
                ej = [1 if t == j else 0 for t in range(self.n_maps)]
                a = self.apply(ej, self.apply(ei, x))
                b = self.apply(ei, self.apply(ej, x))
                worst = max(worst, float(_circular_distance(a, b).max()))
        return worst

    def check_commutation(self, n_points: int = 100, seed: int = 0) -> float:
        """Raise :class:`InvalidSystem` unless all maps commute to ``1e-12``."""
        defect = self.commutation_defect(n_points, seed)
        if defect > COMMUTE_TOL:
            raise InvalidSystem(f"maps do not commute: defect {defect:.3g}")
        return defect

    def pushforward_defect(self, n_points: int = 10_000, max_freq: int = 2) -> float:
        """Largest ``|E f(T_i x) − E f(x)|`` over low characters on a Halton grid.

        Small values are consistent with ``T_i`` preserving Lebesgue measure
        on the fundamental domain.
        """
        x = sample_grid(self.dim, n_points, GRID_SEED + 1)
        freqs = [k for k in np.ndindex(*([2 * max_freq + 1] * self.dim))]
        freqs = np.array(freqs) - max_freq
        freqs = freqs[np.any(freqs != 0, axis=1)]
        worst = 0.0
        for i in range(self.n_maps):
            e_i = [1 if t == i else 0 for t in range(self.n_maps)]
            y = self.apply(e_i, x)
            a = np.exp(2j * np.pi * (y @ freqs.T)).mean(axis=0)
            b = np.exp(2j * np.pi * (x @ freqs.T)).mean(axis=0)
            worst = max(worst, float(np.abs(a - b).max()))
        return worst


@dataclass(frozen=True, eq=False)
class TorusRotation(ErgodicSystem):
    """Commuting rotations ``T_i x = x + α_i`` on ``T^d``.

    ``alphas[i][c]`` is coordinate ``c`` of the rotation vector of map ``i``.
    """

    alphas: tuple
    kind: str = field(default="torus_rotation", init=False)

    @classmethod
    def circle(cls, alpha) -> "TorusRotation":
        return cls(((FixedReal.of(alpha),),))

    @classmethod
    def of(cls, alphas) -> "TorusRotation":
        rows = []
        for row in alphas:
            row = row if isinstance(row, (list, tuple)) else (row,)
            rows.append(tuple(FixedReal.of(a) for a in row))
        if len({len(r) for r in rows}) != 1:
            raise InvalidSystem("all rotation vectors must have the same dimension")
        return cls(tuple(rows))

    @property
    def dim(self) -> int:
        return len(self.alphas[0])

    @property
    def n_maps(self) -> int:
        return len(self.alphas)

    def shifts(self, counts: Sequence[np.ndarray]) -> np.ndarray:
        """``{Σ_i m_i(n) α_i}`` per coordinate, shape ``(n, d)``, exact up to ``2^{-53}``."""
        n = len(counts[0])
        out = np.empty((n, self.dim))
        for c in range(self.dim):
            parts = [fixed_mul(counts[i], self.alphas[i][c].fixed) for i in range(self.n_maps) if counts[i] is not None]
            out[:, c] = frac_of_fixed(fixed_add(*parts)) if parts else 0.0
        return out

    def points(self, counts, grid):
        s = self.shifts(counts)
        return np.mod(s[:, None, :] + np.asarray(grid)[None, :, :], 1.0)

    def closure_orbit(self):
        """``None`` when every map is irrational in every coordinate, else the rational data."""
        rational = [[a.exact is not None for a in row] for row in self.alphas]
        if not any(any(r) for r in rational):
            return None
        if all(all(r) for r in rational) and self.n_maps == 1:
            q = 1
            for a in self.alphas[0]:
                q = q * a.exact.denominator // np.gcd(q, a.exact.denominator)
            return q
        raise Unsupported("orbit closures are supported for irrational rotations or a single rational rotation")

    def haar_integral(self, f: Observable, base_point=None) -> complex:
        """Integral of ``f`` over the orbit closure of ``base_point`` (default 0).

        Irrational rotation vectors are assumed rationally independent, so the
        closure is the whole torus.
        """
        q = self.closure_orbit()
        if q is None:
            if isinstance(f, TrigPoly):
                return f.mean
            m = _midpoints(HAAR_GRID)
            mesh = np.stack(np.meshgrid(*([m] * self.dim), indexing="ij"), axis=-1).reshape(-1, self.dim)
            return complex(f(mesh).mean())
        x0 = np.zeros(self.dim) if base_point is None else np.asarray(base_point, dtype=np.float64)
        pts = np.array([[float((Fraction(j) * a.exact) % 1) for a in self.alphas[0]] for j in range(q)])
        return complex(f(np.mod(pts + x0, 1.0)).mean())


@dataclass(frozen=True, eq=False)
class UnipotentAffine(ErgodicSystem):
    """``T(x, y) = (x + α, y + x)`` on ``T^2``.

    ``T^m(x, y) = (x + mα, y + m x + C(m,2) α)``.
    """

    alpha: FixedReal
    kind: str = field(default="unipotent_affine", init=False)
    dim = 2
    n_maps = 1

    @classmethod
    def of(cls, alpha) -> "UnipotentAffine":
        return cls(FixedReal.of(alpha))

    def points(self, counts, grid):
        m = np.asarray(counts[0], dtype=np.int64)
        grid = np.asarray(grid)
        s1 = frac_of_fixed(fixed_mul(m, self.alpha.fixed))
        s2 = frac_of_fixed(fixed_mul([int(v) * (int(v) - 1) // 2 for v in m], self.alpha.fixed))
        mx = int_times(m, grid[:, 0])
        out = np.empty((m.size, grid.shape[0], 2))
        out[:, :, 0] = np.mod(grid[None, :, 0] + s1[:, None], 1.0)
        out[:, :, 1] = np.mod(grid[None, :, 1] + mx + s2[:, None], 1.0)
        return out

    def haar_integral(self, f: Observable, base_point=None) -> complex:
        if self.alpha.exact is not None:
            raise Unsupported("orbit closures of rational unipotent maps are not modelled")
        if isinstance(f, TrigPoly):
            return f.mean
        m = _midpoints(HAAR_GRID)
        mesh = np.stack(np.meshgrid(m, m, indexing="ij"), axis=-1).reshape(-1, 2)
        return complex(f(mesh).mean())


@dataclass(frozen=True, eq=False)
class HeisenbergOrbit(ErgodicSystem):
    """Left translation by ``g = (a, b, c)`` on the Heisenberg nilmanifold.

    The group law is ``(x1,x2,x3)(y1,y2,y3) = (x1+y1, x2+y2, x3+y3+x1 y2)`` and
    the lattice is the integer points.  Points are stored in the fundamental
    domain ``[0,1)^3`` via ``u ↦ ({u1}, {u2}, {u3 − u1⌊u2⌋})``.
    """

    a: FixedReal
    b: FixedReal
    c: FixedReal
    ab: FixedReal
    base_point: tuple = (0.0, 0.0, 0.0)
    kind: str = field(default="heisenberg_orbit", init=False)
    dim = 3
    n_maps = 1

    @classmethod
    def of(cls, a, b, c, base_point=(0.0, 0.0, 0.0)) -> "HeisenbergOrbit":
        fa, fb, fc = FixedReal.of(a), FixedReal.of(b), FixedReal.of(c)
        base = tuple(float(v) for v in snap32(np.asarray(base_point, dtype=np.float64)))
        return cls(fa, fb, fc, fa * fb, base)

    def points(self, counts, grid):
        m_arr = [int(v) for v in np.asarray(counts[0]).ravel()]
        grid = np.asarray(grid, dtype=np.float64)
        x1, x2, x3 = grid[:, 0], grid[:, 1], grid[:, 2]
        fA = frac_of_fixed(fixed_mul(m_arr, self.a.fixed))
        fB = frac_of_fixed(fixed_mul(m_arr, self.b.fixed))
        iA = np.array([self.a.floor_mul(m) & 0xFFFFFFFF for m in m_arr], dtype=np.int64)
        iB_full = [self.b.floor_mul(m) for m in m_arr]
        iB = np.array([v & 0xFFFFFFFF for v in iB_full], dtype=np.int64)
        fC = frac_of_fixed(
            fixed_add(
                fixed_mul(m_arr, self.c.fixed),
                fixed_mul([m * (m - 1) // 2 for m in m_arr], self.ab.fixed),
            )
        )
        # {A}·⌊B⌋ mod 1, exact per n.
        fA_fixed = fixed_mul(m_arr, self.a.fixed)
        P1 = frac_of_fixed([(fa * ib) % (1 << K) for fa, ib in zip(fA_fixed, iB_full)])

        u1 = fA[:, None] + x1[None, :]
        c1 = (u1 >= 1.0).astype(np.float64)
        f1 = u1 - c1
        u2 = fB[:, None] + x2[None, :]
        c2 = (u2 >= 1.0).astype(np.float64)
        f2 = u2 - c2
        term = P1[:, None] + fA[:, None] * c2 + int_times(iB, x1) + x1[None, :] * c2
        u3 = fC[:, None] + x3[None, :] + fA[:, None] * x2[None, :] + int_times(iA, x2)
        f3 = np.mod(u3 - term, 1.0)
        out = np.empty((len(m_arr), grid.shape[0], 3))
        out[:, :, 0] = np.mod(f1, 1.0)
        out[:, :, 1] = np.mod(f2, 1.0)
        out[:, :, 2] = f3
        return out

    def closure(self):
        """``("full", None)`` or ``("fibers", q)`` for ``a = p/q`` with irrational ``b``."""
        if self.a.exact is None and self.b.exact is None:
            return "full", None
        if self.a.exact is not None and self.b.exact is None:
            return "fibers", self.a.exact.denominator
        raise Unsupported("Heisenberg orbit closures need b irrational")

    def haar_integral(self, f: Observable, base_point=None) -> complex:
        """Integral over the orbit closure of ``base_point``.

        The full nilmanifold uses a ``64^3`` midpoint grid; for ``a = p/q`` the
        closure is ``q`` fibers ``{x1 + j/q} × T^2``, each on a ``64^2`` grid.
        """
        x0 = self.base_point if base_point is None else tuple(base_point)
        kind, q = self.closure()
        m = _midpoints(HAAR_GRID)
        if kind == "full":
            mesh = np.stack(np.meshgrid(m, m, m, indexing="ij"), axis=-1).reshape(-1, 3)
            return complex(f(mesh).mean())
        u, v = np.meshgrid(m, m, indexing="ij")
        total = 0j
        for j in range(q):
            x1 = (x0[0] + j / q) % 1.0
            pts = np.stack([np.full(u.size, x1), u.ravel(), v.ravel()], axis=-1)
            total += complex(f(pts).mean())
        return total / q

