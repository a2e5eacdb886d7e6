"""Integer kernels: primes, Legendre symbols, character sums, least non-residues."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional

import numpy as np

from .errors import DomainError, ResourceError

SIEVE_CAP = 10**9
SEGMENT = 1 << 20
RESIDUE_TABLE_MAX = 2**31

# Deterministic for n < 3.4e14 (Jaeschke); beyond that we add more bases.
_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17)
_MR_BASES_LARGE = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
_MR_DETERMINISTIC_LIMIT = 341_550_071_728_321


# -- primes ---------------------------------------------------------------

def _small_sieve(limit: int) -> np.ndarray:
    s = np.ones(limit + 1, dtype=bool)
    s[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if s[i]:
            s[i * i :: i] = False
    return np.flatnonzero(s)


def prime_bitmap(limit: int, cap: int = SIEVE_CAP) -> np.ndarray:
    """Boolean array ``is_prime[0..limit]`` built by a segmented sieve."""
    if limit < 0:
        raise DomainError("limit must be nonnegative")
    if limit > cap:
        raise ResourceError(f"sieve limit {limit} exceeds cap {cap}")
    out = np.zeros(limit + 1, dtype=bool)
    if limit < 2:
        return out
    base = _small_sieve(math.isqrt(limit))
    for lo in range(0, limit + 1, SEGMENT):
        hi = min(lo + SEGMENT, limit + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= hi:
                break
            start = max(q * q, -(-lo // q) * q)
            seg[start - lo :: q] = False
        out[lo:hi] = seg
    out[:2] = False
    return out


def sieve_primes(limit: int, cap: int = SIEVE_CAP) -> List[int]:
    """All primes ``<= limit`` in ascending order."""
    return np.flatnonzero(prime_bitmap(limit, cap)).tolist()


def is_prime(n: int) -> bool:
    """Miller-Rabin: bases 2..17 below 3.4e14, the first 16 primes above
    (deterministic below 3.3e24, strong-probable-prime beyond)."""
    if n < 2:
        return False
    for q in _MR_BASES_LARGE:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES_SMALL if n < _MR_DETERMINISTIC_LIMIT else _MR_BASES_LARGE
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# -- Legendre symbol --------------------------------------------------------

def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0:
        raise DomainError(f"{p} is not an odd prime")


def legendre(n: int, p: int) -> int:
    """Legendre symbol (n|p) via the reciprocity ladder.

    ``p`` is only checked for being odd and >= 3 here; primality is the
    caller's contract (use :class:`PrimeContext` for a checked modulus).
    """
    _check_odd_prime(p)
    return _jacobi(n, p)


def euler_criterion(n: int, p: int) -> int:
    r = pow(n % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@dataclass(frozen=True)
class PrimeContext:
    """An odd prime with an optional lazily built residue table."""

    p: int

    def __post_init__(self):
        if self.p < 3 or self.p % 2 == 0 or not is_prime(self.p):
            raise DomainError(f"{self.p} is not an odd prime")

    def legendre(self, n: int) -> int:
        return _jacobi(n, self.p)

    @property
    def has_table(self) -> bool:
        return "residue_table" in self.__dict__

    @cached_property
    def residue_table(self) -> np.ndarray:
        """Bool array of length p; entry n is True iff n is a nonzero square mod p."""
        p = self.p
        if p > RESIDUE_TABLE_MAX:
            raise ResourceError(f"residue table for p={p} exceeds budget {RESIDUE_TABLE_MAX}")
        table = np.zeros(p, dtype=bool)
        x = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
        table[(x * x) % p] = True
        return table

    def chi(self, n_max: int) -> np.ndarray:
        """int8 array ``chi[0..n_max]`` of Legendre symbols (chi[0] = 0)."""
        return chi_array(self, n_max)


def _euler_vec(n: np.ndarray, p: int) -> np.ndarray:
    # products stay below 2**64 for p < 2**32
    base = n.astype(np.uint64) % np.uint64(p)
    result = np.ones_like(base)
    e = (p - 1) // 2
    P = np.uint64(p)
    while e:
        if e & 1:
            result = (result * base) % P
        base = (base * base) % P
        e >>= 1
    out = np.zeros(len(n), dtype=np.int8)
    out[result == 1] = 1
    out[result == np.uint64(p - 1)] = -1
    return out


def chi_array(ctx: PrimeContext, n_max: int) -> np.ndarray:
    """Legendre symbols for 0..n_max as int8.

    Uses the residue table when the scan covers a decent fraction of a
    period, otherwise a vectorised Euler criterion; both are cross-checked
    against the scalar ladder in the tests.
    """
    p = ctx.p
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    use_table = ctx.has_table or (p <= RESIDUE_TABLE_MAX and n_max * 32 >= p)
    if use_table:
        period = np.where(ctx.residue_table, 1, -1).astype(np.int8)
        period[0] = 0
        reps = n_max // p + 1
        return np.tile(period, reps)[: n_max + 1]
    if p < 2**32:
        out = np.empty(n_max + 1, dtype=np.int8)
        for lo in range(0, n_max + 1, SEGMENT):
            hi = min(lo + SEGMENT, n_max + 1)
            out[lo:hi] = _euler_vec(np.arange(lo, hi, dtype=np.uint64), p)
        return out
    return np.fromiter((_jacobi(n, p) for n in range(n_max + 1)), dtype=np.int8, count=n_max + 1)


def _ctx(p) -> PrimeContext:
    return p if isinstance(p, PrimeContext) else PrimeContext(p)


# -- character sums -----------------------------------------------------------

@dataclass(frozen=True)
class CharSumProfile:
    p: int
    x: int
    value: int
    count_res: int
    count_nonres: int

    @property
    def count_zero(self) -> int:
        return self.x - self.count_res - self.count_nonres


def char_sum(p, x: int) -> CharSumProfile:
    """S_p(x) together with residue / non-residue counts up to x."""
    ctx = _ctx(p)
    x = int(math.floor(x))
    if x < 1:
        raise DomainError("x must be >= 1")
    chi = chi_array(ctx, x)[1:]
    res = int(np.count_nonzero(chi == 1))
    nonres = int(np.count_nonzero(chi == -1))
    return CharSumProfile(ctx.p, x, res - nonres, res, nonres)


def least_nonresidue(p) -> int:
    ctx = _ctx(p)
    n = 2
    while ctx.legendre(n) != -1:
        n += 1
    if not is_prime(n):
        raise AssertionError(f"least non-residue {n} of {ctx.p} is not prime")
    return n


def prime_nonresidues(p, X: int, primes: Optional[List[int]] = None) -> List[int]:
    """Primes q <= X with (q|p) = -1, ascending."""
    ctx = _ctx(p)
    if X < 1:
        raise DomainError("X must be >= 1")
    qs = primes if primes is not None else sieve_primes(int(X))
    return [q for q in qs if q <= X and ctx.legendre(q) == -1]
