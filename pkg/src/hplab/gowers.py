"""Gowers uniformity norms over Z, over intervals and over cyclic groups.

The unnormalized ``2^s``-th power over Z is computed with the difference
recursion

    ∥f∥_{U^s}^{2^s} = Σ_{h∈Z} ∥Δ_h f∥_{U^{s-1}}^{2^{s-1}},   Δ_h f(n) = f(n)·conj f(n+h),

which enumerates exactly the lattice points ``(n, h_1..h_s)`` whose ``2^s``
cube vertices all land in the support.  Two shortcuts keep it fast:
``Δ_{-h} f`` is a conjugated shift of ``Δ_h f`` (same norm), so only
``h >= 0`` is visited; and the level ``s = 2`` is closed off with one
autocorrelation, ``Σ_h |Σ_n f(n) conj f(n+h)|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, OutOfRange, PreconditionViolation, Unsupported
from .numtheory import VonMangoldtTable, WTrick, w_tricked_lambda
from .poly import RealPoly

UNNORMALIZED = "unnormalized-Z"
INTERVAL = "interval"
CYCLIC = "cyclic-group"
MAX_S = 5


@dataclass(frozen=True)
class FiniteSequence:
    """A finitely supported sequence ``f: Z -> C``.

    ``data[i]`` is ``f(offset + i)``; every other value is 0.
    """

    offset: int
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=np.complex128))

    @classmethod
    def on_interval(cls, lo: int, values: Sequence[complex]) -> "FiniteSequence":
        return cls(int(lo), np.asarray(values))

    @property
    def end(self) -> int:
        """One past the last supported index."""
        return self.offset + len(self.data)

    def values(self, lo: int, hi: int) -> np.ndarray:
        """``f(n)`` for ``lo <= n <= hi`` (zeros outside the support)."""
        out = np.zeros(max(hi - lo + 1, 0), dtype=np.complex128)
        a, b = max(lo, self.offset), min(hi, self.end - 1)
        if a <= b:
            out[a - lo : b - lo + 1] = self.data[a - self.offset : b - self.offset + 1]
        return out

    def shifted(self, X: int) -> "FiniteSequence":
        """The sequence ``n -> f(n + X)``."""
        return FiniteSequence(self.offset - X, self.data)

    def conj(self) -> "FiniteSequence":
        return FiniteSequence(self.offset, np.conj(self.data))


@dataclass(frozen=True)
class Interval:
    """Integer interval ``{lo, ..., hi}`` (both ends included)."""

    lo: int
    hi: int

    @classmethod
    def half_open(cls, X: int, H: int) -> "Interval":
        """The interval ``(X, X+H]``."""
        return cls(X + 1, X + H)

    def __len__(self) -> int:
        return max(self.hi - self.lo + 1, 0)


@dataclass(frozen=True)
class GowersResult:
    """A Gowers norm value with its normalization and lattice-point count.

    ``term_count`` is the number of tuples ``(n, h)`` whose cube vertices all
    lie in the support window (for the cyclic normalization, ``N^{s+1}``).
    """

    s: int
    value: float
    normalization: str
    term_count: int


def _check_s(s: int) -> None:
    if s < 1:
        raise InvalidArgument(f"s must be >= 1, got {s}")
    if s > MAX_S:
        raise InvalidArgument(f"s capped at {MAX_S} for the direct kernel, got {s}")


def _trim(f: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(f)
    if nz.size == 0:
        return f[:0]
    return f[nz[0] : nz[-1] + 1]


def gowers_power_z(f: np.ndarray, s: int) -> float:
    """``∥f∥_{U^s(Z)}^{2^s}`` for the array ``f`` placed on consecutive integers."""
    f = _trim(np.asarray(f, dtype=np.complex128))
    H = f.size
    if H == 0:
        return 0.0
    if s == 1:
        return float(abs(f.sum()) ** 2)
    if s == 2:
        c = np.correlate(f, f, mode="full")
        return float(np.sum(c.real**2 + c.imag**2))
    terms = np.empty(H)
    terms[0] = gowers_power_z(f * np.conj(f), s - 1)
    for h in range(1, H):
        terms[h] = 2.0 * gowers_power_z(f[: H - h] * np.conj(f[h:]), s - 1)
    return float(np.sum(terms))


@lru_cache(maxsize=256)
def _ones_power(H: int, s: int) -> float:
    if s == 2:
        # Σ_{|h|<H} (H-|h|)^2 in closed form.
        return float(H * H + 2 * sum(k * k for k in range(1, H)))
    return gowers_power_z(np.ones(H), s)


def _root(power: float, s: int) -> float:
    return max(power, 0.0) ** (1.0 / 2**s)


def gowers_unnormalized(f: FiniteSequence, s: int) -> GowersResult:
    """``∥f∥_{U^s(Z)}``, the unnormalized norm over the integers.

    Raises:
        InvalidArgument: if ``s < 1`` or ``s`` exceeds the kernel cap.
    """
    _check_s(s)
    trimmed = _trim(f.data)
    power = gowers_power_z(trimmed, s)
    count = int(round(_ones_power(trimmed.size, s))) if trimmed.size else 0
    return GowersResult(s, _root(power, s), UNNORMALIZED, count)


def gowers_interval(f: FiniteSequence, I: Interval, s: int) -> GowersResult:
    """``∥f∥_{U^s(I)} = ∥f·1_I∥_{U^s(Z)} / ∥1_I∥_{U^s(Z)}``.

    Raises:
        InvalidArgument: if ``I`` is empty or ``s`` is out of range.
    """
    _check_s(s)
    H = len(I)
    if H == 0:
        raise InvalidArgument("empty interval")
    num = gowers_power_z(f.values(I.lo, I.hi), s)
    den = _ones_power(H, s)
    return GowersResult(s, _root(num / den, s), INTERVAL, int(round(den)))


def _cyclic_power_direct(f: np.ndarray, s: int) -> float:
    N = f.size
    if s == 1:
        return float(abs(f.mean()) ** 2)
    if s == 2:
        idx = (np.arange(N)[:, None] + np.arange(N)[None, :]) % N
        corr = (f[None, :] * np.conj(f[idx])).mean(axis=1)
        return float(np.mean(corr.real**2 + corr.imag**2))
    terms = np.array([_cyclic_power_direct(f * np.conj(np.roll(f, -h)), s - 1) for h in range(N)])
    return float(np.mean(terms))


def _cyclic_power_fourier(f: np.ndarray) -> float:
    fhat = np.fft.fft(f) / f.size
    a2 = fhat.real**2 + fhat.imag**2
    return float(np.sum(a2 * a2))


def gowers_cyclic(f: Sequence[complex], s: int, method: str = "auto") -> GowersResult:
    """Averaged norm ``∥f∥_{U^s(Z_N)}`` with wraparound indices.

    Args:
        f: values ``f(0), ..., f(N-1)``.
        s: norm order.
        method: ``"direct"`` (difference recursion with wraparound),
            ``"fourier"`` (``Σ_ξ |f̂(ξ)|^4``, only for ``s = 2``) or ``"auto"``.
    """
    _check_s(s)
    f = np.asarray(f, dtype=np.complex128)
    if f.size == 0:
        raise InvalidArgument("N must be >= 1")
    if method == "auto":
        method = "fourier" if s == 2 else "direct"
    if method == "fourier":
        if s != 2:
            raise InvalidArgument("the Fourier path only exists for s = 2")
        power = _cyclic_power_fourier(f)
    elif method == "direct":
        power = _cyclic_power_direct(f, s)
    else:
        raise InvalidArgument(f"unknown method {method!r}")
    return GowersResult(s, _root(power, s), CYCLIC, f.size ** (s + 1))


def lemma23_bridge(f: FiniteSequence, N_prime: int, s: int, method: str = "auto") -> tuple[float, float]:
    """Compare the interval norm on ``[1, N]`` with the cyclic route on ``Z_{N'}``.

    Returns:
        ``(∥f∥_{U^s[1,N]}, ∥f·1_{[1,N]}∥_{U^s(Z_{N'})} / ∥1_{[1,N]}∥_{U^s(Z_{N'})})``.

    Raises:
        PreconditionViolation: if ``N' < 2N``.
    """
    if f.offset < 1:
        raise InvalidArgument("the sequence must live on [1, N]")
    N = f.end - 1
    if N_prime < 2 * N:
        raise PreconditionViolation(f"need N' >= 2N, got N'={N_prime}, N={N}")
    left = gowers_interval(f, Interval(1, N), s).value
    emb = np.zeros(N_prime, dtype=np.complex128)
    emb[1 : N + 1] = f.values(1, N)
    ind = np.zeros(N_prime)
    ind[1 : N + 1] = 1.0
    num = gowers_cyclic(emb, s, method).value
    den = gowers_cyclic(ind, s, method).value
    return left, num / den


def ap_restriction_check(u: FiniteSequence, a: int, Q: int, X: int, H: int, s: int) -> tuple[float, float]:
    """``(∥u·1_{a (mod Q)}∥_{U^s(X,X+H]}, ∥u∥_{U^s(X,X+H]})``.

    Raises:
        Unsupported: if ``s < 2``.
        InvalidArgument: if ``a`` is not in ``[0, Q)``.
    """
    if s < 2:
        raise Unsupported("restriction to progressions needs s >= 2")
    if not 0 <= a < Q:
        raise InvalidArgument(f"need 0 <= a < Q, got a={a}, Q={Q}")
    I = Interval.half_open(X, H)
    vals = u.values(I.lo, I.hi)
    mask = (np.arange(I.lo, I.hi + 1) % Q) == a
    restricted = FiniteSequence(I.lo, vals * mask)
    full = FiniteSequence(I.lo, vals)
    return gowers_interval(restricted, I, s).value, gowers_interval(full, I, s).value


def weighted_expsum(weights: np.ndarray, p: RealPoly, n: np.ndarray) -> complex:
    """``mean(weights · e(p(n)))`` with ``p(n) mod 1`` computed by reduced Horner."""
    if len(n) == 0:
        raise InvalidArgument("empty range")
    phase = np.exp(2j * np.pi * p.frac(n))
    return complex(np.mean(np.asarray(weights) * phase))


def weighted_polynomial_expsum(
    table: VonMangoldtTable, trick: WTrick, p: RealPoly, N: int, L: int
) -> complex:
    """``E_{N<=n<=N+L} (Λ_{w,b}(n) − 1)·e(p(n))``.

    Raises:
        OutOfRange: if ``W·(N+L) + b`` exceeds the table.
    """
    if trick.W * (N + L) + trick.b > table.limit:
        raise OutOfRange(f"W(N+L)+b = {trick.W * (N + L) + trick.b} beyond table limit {table.limit}")
    n = np.arange(N, N + L + 1)
    weights = w_tricked_lambda(table, trick, n) - 1.0
    return weighted_expsum(weights, p, n)


def lambda_minus_one(table: VonMangoldtTable, trick: WTrick, I: Interval) -> FiniteSequence:
    """The sequence ``Λ_{w,b} − 1`` restricted to ``I``."""
    n = np.arange(I.lo, I.hi + 1)
    return FiniteSequence(I.lo, w_tricked_lambda(table, trick, n) - 1.0)


def cyclic_cross_check(f: FiniteSequence, I: Interval, s: int) -> tuple[float, float]:
    """Interval norm by the direct kernel and by the cyclic route of the bridge.

    The sequence is shifted to start at 1 (shift invariance is exact) and
    embedded in ``Z_{N'}`` with ``N'`` the next power of two ``>= 2|I|``.
    """
    H = len(I)
    moved = FiniteSequence(1, f.values(I.lo, I.hi))
    N_prime = 1 << (2 * H - 1).bit_length()
    direct = gowers_interval(f, I, s).value
    method = "fourier" if s == 2 else "direct"
    _, cyc = lemma23_bridge(moved, N_prime, s, method)
    return direct, cyc
