"""Beatty sequences floor(alpha*n + beta) and Piatetski-Shapiro sequences floor(n^c)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import DomainError, PrecisionError
from .fixed import GUARD, MIN_PREC, Real, near, parse_real
from .ntcore import _ctx, chi_array

DEFAULT_CAP = 10**6


# -- parameters ---------------------------------------------------------------

@dataclass(frozen=True)
class BeattyParams:
    """alpha, beta as guaranteed enclosures carried at ``precision_bits``."""

    alpha: Real
    beta: Real
    irrational: bool = True
    precision_bits: int = MIN_PREC
    alpha_token: str = ""
    beta_token: str = ""

    def __post_init__(self):
        if self.precision_bits < MIN_PREC:
            raise DomainError(f"precision_bits must be >= {MIN_PREC}")
        if self.alpha.lo <= 0 <= self.alpha.hi:
            raise DomainError("alpha must be nonzero")

    @classmethod
    def parse(cls, alpha: Union[str, int, Fraction, Real], beta: Union[str, int, Fraction, Real] = 0,
              precision_bits: int = MIN_PREC, irrational: Optional[bool] = None) -> "BeattyParams":
        if precision_bits < MIN_PREC:
            raise DomainError(f"precision_bits must be >= {MIN_PREC}")
        a, a_irr = parse_real(alpha, precision_bits)
        b, _ = parse_real(beta, precision_bits)
        return cls(a, b, a_irr if irrational is None else irrational, precision_bits,
                   str(alpha), str(beta))

    @property
    def lam(self) -> Real:
        """lambda = 1/alpha."""
        return self.alpha.reciprocal()

    def negated(self) -> "BeattyParams":
        """(-alpha, 1 - beta): the parameters of the reflected sequence."""
        return BeattyParams(-self.alpha, 1 - self.beta, self.irrational, self.precision_bits,
                            f"-({self.alpha_token})", f"1-({self.beta_token})")


@dataclass(frozen=True)
class PSParams:
    """Exponent c = a/b with gcd(a, b) = 1 and 1 < c < 2."""

    a: int
    b: int

    def __post_init__(self):
        if self.b <= 0 or math.gcd(self.a, self.b) != 1 or not (self.b < self.a < 2 * self.b):
            raise DomainError(f"c = {self.a}/{self.b} must be a reduced fraction in (1, 2)")

    @classmethod
    def of(cls, c: Union[str, Fraction, "PSParams"]) -> "PSParams":
        if isinstance(c, PSParams):
            return c
        f = Fraction(c)
        return cls(f.numerator, f.denominator)

    @property
    def c(self) -> Fraction:
        return Fraction(self.a, self.b)

    def __str__(self) -> str:
        return f"{self.a}/{self.b}"


# -- Beatty sequences ---------------------------------------------------------

def _beatty_value(params: BeattyParams, n: int) -> Real:
    return params.alpha * n + params.beta


def beatty_term(params: BeattyParams, n: int, *, with_flag: bool = False):
    """Exact floor(alpha*n + beta).

    With ``with_flag`` returns ``(value, near_integer)`` where the flag is set
    when an inexact alpha*n + beta lies within 2^-64 of an integer.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    x = _beatty_value(params, n)
    k = x.floor()
    if not with_flag:
        return k
    flag = not x.exact and x.distance_to_integer() < GUARD
    return k, flag


def beatty_contains(params: BeattyParams, m: int) -> Tuple[bool, Optional[int]]:
    """Membership of m in the Beatty sequence for alpha > 1.

    m belongs iff 0 < {(m - beta + 1)/alpha} <= 1/alpha, and then the index is
    ceil((m - beta)/alpha).  The returned index is re-verified.
    """
    if params.alpha.compare(1) <= 0:
        raise DomainError("beatty_contains needs alpha > 1")
    if params.beta.compare(m) >= 0:
        raise DomainError(f"m={m} must exceed beta")
    lam = params.lam
    t = lam * (m - params.beta + 1)
    fr = t.frac()
    if near(fr, 0) or near(fr, lam):
        raise PrecisionError(f"membership of {m} is within 2^-64 of the boundary")
    member = fr.sign() > 0 and fr.compare(lam) <= 0
    if not member:
        return False, None
    idx = (lam * (m - params.beta)).ceil()
    if idx < 1 or beatty_term(params, idx) != m:
        raise AssertionError(f"index {idx} does not reproduce {m}")
    return True, idx


NOT_FOUND = None


def least_beatty_nonresidue(params: BeattyParams, p, cap: int = DEFAULT_CAP) -> Optional[int]:
    """Least n <= cap with floor(alpha*n+beta) a non-residue mod p, else None.

    Terms <= 0 and multiples of p are skipped.
    """
    ctx = _ctx(p)
    if cap < 1:
        raise DomainError("cap must be >= 1")
    for n in range(1, cap + 1):
        v = beatty_term(params, n)
        if v <= 0:
            continue
        if ctx.legendre(v) == -1:
            return n
    return NOT_FOUND


def negation_identity_exceptions(params: BeattyParams, n_max: int) -> int:
    """Count n <= n_max with floor(alpha n + beta) != -floor(-alpha n - beta + 1)."""
    if params.alpha.sign() >= 0:
        raise DomainError("negation identity check needs alpha < 0")
    count = 0
    for n in range(1, n_max + 1):
        x = _beatty_value(params, n)
        if x.floor() != -((1 - x).floor()):
            count += 1
    return count


# -- Piatetski-Shapiro sequences ----------------------------------------------

def iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1."""
    if x < 0 or k < 1:
        raise DomainError("iroot needs x >= 0 and k >= 1")
    if x < 2 or k == 1:
        return x
    if k == 2:
        return math.isqrt(x)
    # float seed, then Newton from above
    try:
        r = int(math.exp(math.log(x) / k)) + 2
    except OverflowError:
        r = 1 << (x.bit_length() // k + 1)
    if r ** k <= x:
        r = 1 << (x.bit_length() // k + 1)
    while True:
        s = ((k - 1) * r + x // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def ps_term(params: PSParams, n: int) -> int:
    """Exact floor(n^(a/b)) as the integer b-th root of n^a."""
    params = PSParams.of(params)
    if n < 1:
        raise DomainError("n must be >= 1")
    return iroot(n ** params.a, params.b)


def least_ps_nonresidue(params: PSParams, p, cap: int = DEFAULT_CAP) -> Optional[int]:
    params = PSParams.of(params)
    ctx = _ctx(p)
    if cap < 1:
        raise DomainError("cap must be >= 1")
    for n in range(1, cap + 1):
        if ctx.legendre(ps_term(params, n)) == -1:
            return n
    return NOT_FOUND


def root_power(x: int, num: int, den: int, prec: int) -> Real:
    """Enclosure of x^(num/den) at ``prec`` bits, from an exact integer root."""
    big = (x ** num) << (den * prec)
    r = iroot(big, den)
    return Real(r, r if r ** den == big else r + 1, prec)


class ProductWitness(NamedTuple):
    """Outcome of the floor(n^c) = l*m test for one pair.

    ``n`` is set when the fractional-part criterion holds and floor(n^c) = l*m
    was verified; ``mismatch`` is set when the criterion held but the
    verification failed (possible for small L, M).
    """

    n: Optional[int]
    criterion: bool
    mismatch: bool


def ps_product_witness(params: PSParams, ell: int, m: int, L: int, M: int,
                       prec: int = MIN_PREC) -> ProductWitness:
    """Test 1 - 1/(2 (LM)^(1-1/c)) <= {(l m)^(1/c)} and produce n = floor((lm)^(1/c)) + 1."""
    params = PSParams.of(params)
    if L < 4 or M < 4:
        raise DomainError("L and M must be >= 4")
    if not (L / 2 < ell <= L and M / 2 < m <= M):
        raise DomainError("need ell in (L/2, L] and m in (M/2, M]")
    a, b = params.a, params.b
    x = root_power(ell * m, b, a, prec)              # (lm)^(1/c)
    y = root_power(L * M, a - b, a, prec)            # (LM)^(1-1/c)
    fr = x.frac()
    # criterion  <=>  2 y (1 - frac) <= 1
    lhs = (y * 2) * (1 - fr)
    try:
        hit = lhs.compare(1) <= 0
    except PrecisionError:
        raise PrecisionError(f"criterion undecided for ({ell}, {m}) at {prec} bits")
    if not hit:
        return ProductWitness(None, False, False)
    n = iroot((ell * m) ** b, a) + 1
    if ps_term(params, n) != ell * m:
        return ProductWitness(None, True, True)
    return ProductWitness(n, True, False)


@dataclass
class Theorem3Result:
    p: int
    c: str
    pair: str
    epsilon: float
    X: float
    delta_hat: float
    J: int
    L: int
    M: int
    A: float
    size_L: int
    size_M: int
    hits: int
    mismatches: int
    witnesses: List[int] = field(default_factory=list)
    verified: int = 0
    windows: List[Tuple[int, int]] = field(default_factory=list)


def select_dyadic_window(chi: np.ndarray, X: float, J: int) -> Tuple[int, List[Tuple[int, int]]]:
    """Among L_j = floor(X / 2^j), j = 0..J, pick the one whose (L/2, L]
    holds the most non-residues; ties go to the larger L.

    Returns the chosen L and the (L_j, count) table.
    """
    table = []
    for j in range(J + 1):
        L = math.floor(X / 2 ** j)
        if L < 4:
            break
        cnt = int(np.count_nonzero(chi[L // 2 + 1 : L + 1] == -1))
        table.append((L, cnt))
    if not table:
        raise DomainError("no dyadic window with L >= 4")
    best = max(table, key=lambda t: (t[1], t[0]))
    return best[0], table


def theorem3_pipeline(params: PSParams, p, pair, epsilon: float, A: float = 1.0,
                      prec: int = MIN_PREC) -> Theorem3Result:
    """Search for n with floor(n^c) = l*m, l a non-residue in a dyadic window
    below p^(1/(4 sqrt e)+eps) and m a residue in (M/2, M].

    Every witness n is re-verified: floor(n^c) = l*m exactly and (l*m | p) = -1.
    """
    from .density import BURGESS_EXPONENT
    from .exppairs import c_range

    params = PSParams.of(params)
    ctx = _ctx(p)
    if params.c >= c_range(pair):
        raise DomainError(f"c = {params} is outside the admissible range for {pair}")
    X = ctx.p ** (BURGESS_EXPONENT + epsilon)
    if math.floor(X) < 16:
        raise DomainError(f"p^(1/(4 sqrt e)+eps) = {X:.2f} is below 16")
    base = dict(p=ctx.p, c=str(params), pair=str(pair), epsilon=epsilon, X=X, A=A)

    Xf = math.floor(X)
    c = float(params.c)
    Mest = Xf ** (2 * (c - 1) / (2 - c)) * math.log(Xf) ** A
    chi = chi_array(ctx, max(Xf, 2 * math.ceil(Mest) + 8))
    nonres = int(np.count_nonzero(chi[1 : Xf + 1] == -1))
    delta_hat = nonres / Xf
    if delta_hat <= 0:
        return Theorem3Result(**base, delta_hat=0.0, J=0, L=0, M=0, size_L=0, size_M=0,
                              hits=0, mismatches=0)
    J = max(0, math.ceil(math.log(2 / delta_hat) / math.log(2)))
    L, windows = select_dyadic_window(chi, X, J)
    M = max(4, round(L ** (2 * (c - 1) / (2 - c)) * math.log(L) ** A))
    if M >= len(chi):
        chi = chi_array(ctx, M)
    ells = np.flatnonzero(chi[L // 2 + 1 : L + 1] == -1) + L // 2 + 1
    ms = np.flatnonzero(chi[M // 2 + 1 : M + 1] == 1) + M // 2 + 1

    hits = mismatches = verified = 0
    witnesses: List[int] = []
    for ell in ells.tolist():
        for m in ms.tolist():
            w = ps_product_witness(params, ell, m, L, M, prec)
            if not w.criterion:
                continue
            hits += 1
            if w.mismatch:
                mismatches += 1
                continue
            v = ps_term(params, w.n)
            if v != ell * m or ctx.legendre(v) != -1:
                raise AssertionError(f"witness {w.n} failed re-verification")
            verified += 1
            witnesses.append(w.n)
    return Theorem3Result(**base, delta_hat=delta_hat, J=J, L=L, M=M, size_L=len(ells),
                          size_M=len(ms), hits=hits, mismatches=mismatches,
                          witnesses=witnesses, verified=verified, windows=windows)
