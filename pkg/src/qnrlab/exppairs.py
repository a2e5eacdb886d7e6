"""Exact-rational exponent-pair calculus (A and B processes) and the PS c-range."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import DomainError

HALF = Fraction(1, 2)
#: 1 + (1 - R)/(2 - R) rounded up, R = Rankin's constant 0.8290213568...
GRAHAM_CEILING = Fraction(114601347, 10**8)
MAX_DEPTH = 30


@dataclass(frozen=True)
class ExponentPair:
    kappa: Fraction
    lam: Fraction
    word: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kappa", Fraction(self.kappa))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if not (0 <= self.kappa <= HALF <= self.lam <= 1):
            raise DomainError(f"pair ({self.kappa}, {self.lam}) violates 0 <= k <= 1/2 <= l <= 1")

    @classmethod
    def parse(cls, text: str) -> "ExponentPair":
        """Parse ``"k_num/k_den,l_num/l_den"`` optionally followed by ``@word``."""
        body, _, word = text.partition("@")
        try:
            k, l = body.split(",")
            return cls(Fraction(k.strip()), Fraction(l.strip()), word.strip())
        except ValueError as exc:
            raise DomainError(f"cannot parse exponent pair {text!r}") from exc

    @property
    def key(self) -> Tuple[Fraction, Fraction]:
        return (self.kappa, self.lam)

    def __str__(self) -> str:
        s = f"{self.kappa},{self.lam}"
        return f"{s}@{self.word}" if self.word else s


TRIVIAL = ExponentPair(Fraction(0), Fraction(1))


def _pair(x) -> ExponentPair:
    if isinstance(x, ExponentPair):
        return x
    if isinstance(x, str):
        return ExponentPair.parse(x)
    k, l = x
    return ExponentPair(Fraction(k), Fraction(l))


def a_process(pair) -> ExponentPair:
    """(k, l) -> (k/(2k+2), (k+l+1)/(2k+2))."""
    pr = _pair(pair)
    k, l = pr.kappa, pr.lam
    return ExponentPair(k / (2 * k + 2), (k + l + 1) / (2 * k + 2), pr.word + "A")


def b_process(pair) -> ExponentPair:
    """(k, l) -> (l - 1/2, k + 1/2)."""
    pr = _pair(pair)
    return ExponentPair(pr.lam - HALF, pr.kappa + HALF, pr.word + "B")


def replay(word: str, seed=TRIVIAL) -> ExponentPair:
    """Apply a word (read left to right) to ``seed``."""
    pr = _pair(seed)
    pr = ExponentPair(pr.kappa, pr.lam, "")
    for ch in word:
        if ch == "A":
            pr = a_process(pr)
        elif ch == "B":
            pr = b_process(pr)
        else:
            raise DomainError(f"bad process letter {ch!r}")
    return pr


def c_range(pair) -> Fraction:
    """Upper end 1 + (1 - l)/(2k - l + 3) of the admissible c-interval."""
    pr = _pair(pair)
    den = 2 * pr.kappa - pr.lam + 3
    if den <= 0:
        raise DomainError("2k - l + 3 must be positive")
    return 1 + (1 - pr.lam) / den


def ps_exponent(c) -> float:
    """1/(4 (2 - c) sqrt(e)), the exponent of the N_c(p) bound."""
    c = Fraction(c)
    if not 1 < c < 2:
        raise DomainError(f"c must lie in (1, 2), got {c}")
    return 1.0 / (4 * float(2 - c) * math.sqrt(math.e))


def lemma2_bound(pair, h: int, L: float, M: float, c) -> float:
    """(h^k0 L^(k0/c+l0) M^(1-k0+k0/c) + h^(-1/2) (LM)^(1-1/(2c)) + L M^(1/2)) log L,
    with (k0, l0) the A-process image of ``pair``."""
    if h < 1:
        raise DomainError("h must be >= 1")
    if L < 2 or M < 2:
        raise DomainError("L, M must be >= 2")
    a = a_process(pair)
    k0, l0 = float(a.kappa), float(a.lam)
    cf = float(Fraction(c))
    t1 = h ** k0 * L ** (k0 / cf + l0) * M ** (1 - k0 + k0 / cf)
    t2 = h ** -0.5 * (L * M) ** (1 - 1 / (2 * cf))
    t3 = L * math.sqrt(M)
    return (t1 + t2 + t3) * math.log(L)


def _better(cand: ExponentPair, best: ExponentPair) -> bool:
    ca, cb = c_range(cand), c_range(best)
    if ca != cb:
        return ca > cb
    if len(cand.word) != len(best.word):
        return len(cand.word) < len(best.word)
    return cand.word < best.word


@dataclass
class SearchResult:
    best_pair: ExponentPair
    best_c: Fraction
    per_depth: List[Fraction]
    pairs_seen: int
    max_c_seen: Fraction


def search_best_c(seeds: Optional[Iterable] = None, depth: int = 12,
                  interpolate: bool = False) -> SearchResult:
    """Breadth-first enumeration of A/B words up to ``depth`` letters.

    Pairs are deduplicated exactly; each keeps its first word in
    (length, lexicographic) order.  ``interpolate`` adds midpoints of the
    best stored pairs at the end (experimental).
    """
    if not 0 <= depth <= MAX_DEPTH:
        raise DomainError(f"depth must lie in [0, {MAX_DEPTH}]")
    seeds = [TRIVIAL] if seeds is None else [_pair(s) for s in seeds]
    seen: Dict[Tuple[Fraction, Fraction], ExponentPair] = {}
    frontier: List[ExponentPair] = []
    for s in sorted(seeds, key=lambda s: s.word):
        if s.key not in seen:
            seen[s.key] = s
            frontier.append(s)
    best = min(frontier, key=lambda s: (-c_range(s), len(s.word), s.word))
    per_depth = [c_range(best)]
    for _ in range(depth):
        nxt: List[ExponentPair] = []
        for pr in frontier:
            for step in (a_process, b_process):
                try:
                    q = step(pr)
                except DomainError:
                    continue
                if q.key in seen:
                    continue
                seen[q.key] = q
                nxt.append(q)
                if _better(q, best):
                    best = q
        frontier = nxt
        per_depth.append(c_range(best))
    max_seen = max(c_range(p) for p in seen.values())
    if interpolate:
        warnings.warn("interpolation between exponent pairs is experimental", stacklevel=2)
        top = sorted(seen.values(), key=lambda s: -c_range(s))[:8]
        for i, x in enumerate(top):
            for y in top[i + 1 :]:
                mid = ExponentPair((x.kappa + y.kappa) / 2, (x.lam + y.lam) / 2,
                                   f"mid({x.word},{y.word})")
                if c_range(mid) > c_range(best):
                    best = mid
    return SearchResult(best, c_range(best), per_depth, len(seen), max_seen)
