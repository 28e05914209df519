"""Sieve-built arithmetic tables.

The central object is :class:`VonMangoldtTable`, produced by a segmented
smallest-prime-factor sieve.  On top of it sit the W-tricked weights
``Λ_{w,b}(n) = φ(W)/W · Λ(Wn+b)``, prime counts in progressions with
Brun–Titchmarsh style bound reports, and the prime-versus-Λ average gap.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .errors import CoprimalityViolation, InvalidArgument, OutOfRange

CACHE_MAGIC = b"HPL1"
_SEGMENT = 1 << 18


def small_primes(limit: int) -> np.ndarray:
    """Primes ``p <= limit`` by a plain Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def smallest_prime_factors(limit: int, segment: int = _SEGMENT) -> np.ndarray:
    """Smallest prime factor of every ``n <= limit`` (``spf[0] = spf[1] = 0``).

    The range is processed in segments of ``segment`` integers; within a
    segment each base prime ``p <= sqrt(limit)`` writes itself into the
    still-unmarked multiples, so the first writer is the smallest factor.
    Unmarked entries are primes and receive themselves.
    """
    spf = np.zeros(limit + 1, dtype=np.int32)
    base = small_primes(math.isqrt(limit))
    for lo in range(2, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        block = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            view = block[start - lo :: p]
            view[view == 0] = p
        unmarked = block == 0
        block[unmarked] = np.arange(lo, hi, dtype=np.int32)[unmarked]
    return spf


@dataclass(frozen=True, eq=False)
class VonMangoldtTable:
    """Values of Λ(n) and primality flags for ``1 <= n <= limit``.

    Arrays are indexed directly by ``n``; index 0 is padding and holds 0.
    """

    limit: int
    values: np.ndarray
    is_prime: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values.setflags(write=False)
        self.is_prime.setflags(write=False)

    def __getitem__(self, n):
        return self.values[n]

    def check_range(self, hi: int) -> None:
        if hi > self.limit:
            raise OutOfRange(f"index {hi} beyond table limit {self.limit}")

    @cached_property
    def psi_prefix(self) -> np.ndarray:
        """``psi_prefix[n] = ψ(n) = Σ_{m<=n} Λ(m)``."""
        return np.cumsum(self.values)

    @cached_property
    def pi_prefix(self) -> np.ndarray:
        """``pi_prefix[n] = π(n)``."""
        return np.cumsum(self.is_prime, dtype=np.int64)

    def psi(self, x: int) -> float:
        self.check_range(x)
        return float(self.psi_prefix[x])

    def pi(self, x: int) -> int:
        self.check_range(x)
        return int(self.pi_prefix[x])

    def primes(self, upto: int | None = None) -> np.ndarray:
        upto = self.limit if upto is None else upto
        self.check_range(upto)
        return np.flatnonzero(self.is_prime[: upto + 1])

    def save(self, path: Union[str, Path]) -> None:
        """Write the binary cache: ``HPL1``, u64 LE limit, f64 LE Λ(1..limit)."""
        with open(path, "wb") as fh:
            fh.write(CACHE_MAGIC)
            fh.write(struct.pack("<Q", self.limit))
            fh.write(self.values[1:].astype("<f8").tobytes())

    @classmethod
    def load(cls, path: Union[str, Path]) -> "VonMangoldtTable":
        """Read a cache written by :meth:`save`.

        Primality is recovered from the stored values: ``n`` is prime exactly
        when ``Λ(n) = log n``, i.e. when ``exp(Λ(n))`` rounds back to ``n``.
        """
        raw = Path(path).read_bytes()
        if raw[:4] != CACHE_MAGIC:
            raise InvalidArgument(f"{path}: not an HPL1 sieve cache")
        (limit,) = struct.unpack("<Q", raw[4:12])
        body = np.frombuffer(raw[12:], dtype="<f8")
        if body.size != limit:
            raise InvalidArgument(f"{path}: truncated cache ({body.size} of {limit} values)")
        values = np.zeros(limit + 1)
        values[1:] = body
        n = np.arange(limit + 1)
        is_prime = (values > 0) & (np.rint(np.exp(values)) == n)
        return cls(int(limit), values, is_prime)


def build_table(limit: int) -> VonMangoldtTable:
    """Sieve Λ(n) for ``n <= limit``.

    Args:
        limit: largest argument stored; must be at least 2.

    Raises:
        InvalidArgument: if ``limit < 2``.
    """
    if int(limit) != limit or limit < 2:
        raise InvalidArgument(f"limit must be an integer >= 2, got {limit!r}")
    limit = int(limit)
    spf = smallest_prime_factors(limit)
    n = np.arange(limit + 1)
    is_prime = (spf == n) & (n >= 2)
    values = np.zeros(limit + 1)
    primes = np.flatnonzero(is_prime)
    logs = np.log(primes.astype(np.float64))
    values[primes] = logs
    # Higher prime powers only exist for p <= sqrt(limit); few enough to loop.
    for p, lp in zip(primes[primes <= math.isqrt(limit)], logs):
        q = int(p) * int(p)
        while q <= limit:
            values[q] = lp
            q *= int(p)
    return VonMangoldtTable(limit, values, is_prime)


def euler_phi(n: int) -> int:
    """Euler's totient by trial factorization (used on primorials only)."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@dataclass(frozen=True)
class WTrick:
    """The data ``(w, W, b)`` of the W-trick with ``W = Π_{p<=w} p``."""

    w: int
    W: int
    b: int
    phi_W: int

    @property
    def weight(self) -> float:
        return self.phi_W / self.W

    def argument(self, n):
        """``W·n + b`` (works on ints and integer arrays)."""
        return self.W * n + self.b


def primorial(w: int) -> int:
    return math.prod(int(p) for p in small_primes(w))


def primorial_trick(w: int, b: int) -> WTrick:
    """Validate and build a :class:`WTrick`.

    Raises:
        InvalidArgument: if ``w < 1`` or ``b`` is outside ``[1, W]``.
        CoprimalityViolation: if ``gcd(b, W) != 1``.
    """
    if w < 1:
        raise InvalidArgument(f"w must be positive, got {w}")
    W = primorial(w)
    if not 1 <= b <= W:
        raise InvalidArgument(f"b={b} outside [1, {W}]")
    if math.gcd(b, W) != 1:
        raise CoprimalityViolation(f"gcd({b}, {W}) = {math.gcd(b, W)}")
    return WTrick(w=w, W=W, b=b, phi_W=euler_phi(W))


def coprime_residues(w: int) -> list[int]:
    """All admissible ``b`` for a given ``w``, ascending."""
    W = primorial(w)
    return [b for b in range(1, W + 1) if math.gcd(b, W) == 1]


def w_tricked_lambda(table: VonMangoldtTable, trick: WTrick, n):
    """``Λ_{w,b}(n) = φ(W)/W · Λ(Wn+b)`` for an int or an integer array ``n``.

    Raises:
        OutOfRange: if ``W·n + b`` exceeds the table limit.
    """
    arg = trick.argument(np.asarray(n, dtype=np.int64))
    if arg.size and int(arg.max()) > table.limit:
        raise OutOfRange(f"W*n+b = {int(arg.max())} beyond table limit {table.limit}")
    out = trick.weight * table.values[arg]
    return float(out) if out.ndim == 0 else out


def w_tricked_range(table: VonMangoldtTable, trick: WTrick, lo: int, hi: int) -> np.ndarray:
    """``Λ_{w,b}(n)`` for ``lo <= n <= hi`` as an array."""
    return w_tricked_lambda(table, trick, np.arange(lo, hi + 1))


@dataclass(frozen=True)
class APCountReport:
    """Prime count in ``(x, x+y]`` along ``n ≡ a (mod q)`` with bound checks.

    ``brun_titchmarsh_bound`` is ``2y/(φ(q) log(y/q))``.  ``ap_main_term`` is the main term
    ``2y log x/(φ(q) log(y/q))``; its error terms have unspecified constants,
    so only the raw residual ``weighted_sum - ap_main_term`` is reported.
    ``hypothesis_met`` records whether ``q < y <= x`` and ``gcd(a, q) = 1``.
    """

    count: int
    weighted_sum: float
    brun_titchmarsh_bound: float
    ap_main_term: float | None
    ap_residual: float | None
    hypothesis_met: bool
    brun_titchmarsh_violated: bool
    ap_main_term_exceeded: bool

    @property
    def violation(self) -> bool:
        return self.brun_titchmarsh_violated


def prime_count_ap(table: VonMangoldtTable, x: int, y: int, q: int, a: int) -> APCountReport:
    """Count primes ``p ≡ a (mod q)`` with ``x < p <= x+y``.

    The Λ-weighted sum runs over ``x <= n <= x+y``.

    Raises:
        InvalidArgument: if ``y <= q`` or ``q < 1`` or ``x < 0``.
        OutOfRange: if ``x + y`` exceeds the table.
    """
    if q < 1 or y <= q or x < 0:
        raise InvalidArgument(f"need q >= 1, y > q, x >= 0 (got x={x}, y={y}, q={q})")
    x, y = int(x), int(y)
    table.check_range(x + y)
    a %= q
    start = x + 1 + ((a - (x + 1)) % q)
    idx = np.arange(start, x + y + 1, q)
    count = int(table.is_prime[idx].sum())
    widx = np.arange(x + ((a - x) % q), x + y + 1, q)
    wsum = float(table.values[widx].sum())
    phi_q = euler_phi(q)
    denom = phi_q * math.log(y / q)
    bt_bound = 2.0 * y / denom
    if x >= 2:
        cor = 2.0 * y * math.log(x) / denom
        residual = wsum - cor
    else:
        cor = residual = None
    return APCountReport(
        count=count,
        weighted_sum=wsum,
        brun_titchmarsh_bound=bt_bound,
        ap_main_term=cor,
        ap_residual=residual,
        hypothesis_met=(y <= x and math.gcd(a, q) == 1),
        brun_titchmarsh_violated=count > bt_bound,
        ap_main_term_exceeded=cor is not None and wsum > cor,
    )


Sequenceish = Union[Callable[[np.ndarray], np.ndarray], Sequence[complex], np.ndarray]


def _sequence_values(a: Sequenceish, N: int) -> np.ndarray:
    """Values ``a(n)`` for ``n = 0..N`` (index 0 is never used)."""
    if callable(a):
        return np.asarray(a(np.arange(N + 1)))
    arr = np.asarray(a)
    if arr.shape[0] < N + 1:
        raise OutOfRange(f"sequence has {arr.shape[0]} entries, need {N + 1}")
    return arr[: N + 1]


def prime_vs_lambda_gap(table: VonMangoldtTable, a: Sequenceish, N: int) -> float:
    """``|(1/π(N)) Σ_{p<=N} a(p) − (1/N) Σ_{n<=N} Λ(n) a(n)|``.

    Args:
        table: sieve covering ``N``.
        a: a callable evaluated on ``arange(N+1)`` or an array indexed by ``n``.
        N: cutoff.
    """
    table.check_range(N)
    vals = _sequence_values(a, N)
    primes = table.primes(N)
    prime_avg = vals[primes].sum() / primes.size
    lam_avg = (table.values[1 : N + 1] * vals[1:]).sum() / N
    return float(abs(prime_avg - lam_avg))
