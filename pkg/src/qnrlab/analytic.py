"""Continued fractions, exponential sums, discrepancy and bilinear-sum experiments."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, PrecisionError, ResourceError
from .fixed import Real, near
from .ntcore import _ctx, chi_array
from .sequences import BeattyParams, beatty_term

TWO_PI = 2.0 * math.pi
BILINEAR_CAP = 10**10
PAIR_CAP = 10**9
#: float prefilter margin for the V-condition; anything closer is redone exactly
_FLOAT_MARGIN = 1e-6


# -- continued fractions ----------------------------------------------------------

@dataclass
class CFExpansion:
    target: Union[Real, Fraction]
    partial_quotients: List[int]
    convergents: List[Tuple[int, int]]
    terminated: bool = False


def _as_bounds(x) -> Tuple[Fraction, Fraction]:
    if isinstance(x, Real):
        return x.lower, x.upper
    f = Fraction(x)
    return f, f


def cf_convergents(x, K: int) -> CFExpansion:
    """First K convergents p_k/q_k of x (a Real enclosure or an exact rational).

    A partial quotient is accepted only when both ends of the enclosure agree
    on it; otherwise PrecisionError reports how many were obtained.  Rational
    input terminates early with the exact value as last convergent.
    """
    if K < 1:
        raise DomainError("K must be >= 1")
    lo, hi = _as_bounds(x)
    quotients: List[int] = []
    convs: List[Tuple[int, int]] = []
    p2, p1, q2, q1 = 0, 1, 1, 0
    terminated = False
    while len(quotients) < K:
        a = math.floor(lo)
        if math.floor(hi) != a:
            raise PrecisionError(f"precision exhausted after {len(quotients)} partial quotients")
        quotients.append(a)
        p2, p1 = p1, a * p1 + p2
        q2, q1 = q1, a * q1 + q2
        convs.append((p1, q1))
        if lo == a or hi == a:
            if lo == hi:
                terminated = True
                break
            raise PrecisionError(f"precision exhausted after {len(quotients)} partial quotients")
        lo, hi = 1 / (hi - a), 1 / (lo - a)
    exp = CFExpansion(x, quotients, convs, terminated)
    _check_cf(exp)
    return exp


def _check_cf(exp: CFExpansion) -> None:
    lo, hi = _as_bounds(exp.target)
    p2, p1, q2, q1 = 0, 1, 1, 0
    for a, (p, q) in zip(exp.partial_quotients, exp.convergents):
        if p != a * p1 + p2 or q != a * q1 + q2:
            raise AssertionError("convergent recurrence broken")
        if math.gcd(p, q) != 1:
            raise AssertionError("convergent not in lowest terms")
        r = Fraction(p, q)
        bound = Fraction(1, q * q)
        if abs(lo - r) > bound or abs(hi - r) > bound:
            raise AssertionError(f"|x - {p}/{q}| exceeds 1/q^2")
        p2, p1, q2, q1 = p1, p, q1, q


# -- exponential sums and discrepancy ---------------------------------------------

@dataclass(frozen=True)
class UnitSequence:
    points: Tuple[float, ...]

    def __post_init__(self):
        for x in self.points:
            if not 0.0 <= x < 1.0:
                raise DomainError(f"point {x} outside [0, 1)")

    @classmethod
    def of(cls, pts) -> "UnitSequence":
        if isinstance(pts, UnitSequence):
            return pts
        return cls(tuple(float(v) for v in pts))

    @classmethod
    def kronecker(cls, alpha: Real, T: int) -> "UnitSequence":
        """{n alpha} for n = 1..T, fractional parts taken on the enclosure."""
        return cls(tuple(float((alpha * n).frac()) % 1.0 for n in range(1, T + 1)))

    def __len__(self) -> int:
        return len(self.points)


def exp_sum(seq, h: int) -> complex:
    """sum_t e(h x_t) with compensated (fsum) accumulation."""
    seq = UnitSequence.of(seq)
    if h == 0:
        raise DomainError("h must be nonzero")
    # reduce h*x mod 1 before scaling by 2 pi to keep the angle small
    angles = [TWO_PI * math.fmod(h * x, 1.0) for x in seq.points]
    return complex(math.fsum(math.cos(a) for a in angles), math.fsum(math.sin(a) for a in angles))


def star_discrepancy(seq) -> float:
    """Exact D*_T = max_i max(i/T - x_(i), x_(i) - (i-1)/T)."""
    seq = UnitSequence.of(seq)
    T = len(seq)
    if T == 0:
        raise DomainError("empty sequence")
    x = np.sort(np.asarray(seq.points, dtype=np.float64))
    i = np.arange(1, T + 1)
    return float(max(np.max(i / T - x), np.max(x - (i - 1) / T)))


def erdos_turan_bound(seq, H: int, c1: float = 1.0, c2: float = 3.0) -> float:
    """c1/(H+1) + c2 * sum_{h<=H} |exp_sum(seq, h)| / (h T)."""
    seq = UnitSequence.of(seq)
    if H < 1:
        raise DomainError("H must be >= 1")
    T = len(seq)
    if T == 0:
        raise DomainError("empty sequence")
    s = math.fsum(abs(exp_sum(seq, h)) / (h * T) for h in range(1, H + 1))
    return c1 / (H + 1) + c2 * s


# -- bilinear sums ----------------------------------------------------------------

def vinogradov_bound(X: float, Y: float, q: int) -> float:
    """XY sqrt(1/X + 1/Y + 1/q + q/(XY)) (implied constant 1)."""
    if X < 1 or Y < 1:
        raise DomainError("X, Y must be >= 1")
    if q < 1:
        raise DomainError("q must be >= 1")
    return X * Y * math.sqrt(1 / X + 1 / Y + 1 / q + q / (X * Y))


def _frac_of_product(lam, k: int) -> float:
    """{lam * k} as a float, computed exactly for float or Fraction lam."""
    if isinstance(lam, Real):
        return float((lam * k).frac())
    f = Fraction(lam) * k
    return float(f - math.floor(f))


def _geometric_unit(theta: float, M: int) -> complex:
    """sum_{m=1}^M e(theta m) for theta in [0, 1)."""
    s = math.sin(math.pi * theta)
    if abs(s) < 1e-15:
        return complex(M, 0.0)
    mag = math.sin(math.pi * theta * M) / s
    return cmath.exp(1j * math.pi * theta * (M + 1)) * mag


def bilinear_sum(lam, h: int, N: int, M: int, a: Optional[Sequence[complex]] = None,
                 b: Optional[Sequence[complex]] = None, direct: bool = False) -> complex:
    """sum_{n<=N} sum_{m<=M} a_n b_m e(lam h n m).

    Unit coefficients use the geometric closed form per row (O(N));
    ``direct=True`` or explicit coefficients use the double loop.
    """
    if N < 0 or M < 0:
        raise DomainError("N, M must be >= 0")
    if a is not None and len(a) < N or b is not None and len(b) < M:
        raise DomainError("coefficient sequences shorter than N or M")
    unit = a is None and b is None
    if not unit or direct:
        if N * M > BILINEAR_CAP:
            raise ResourceError(f"N*M = {N * M} exceeds cap {BILINEAR_CAP}")
        av = np.ones(N, dtype=complex) if a is None else np.asarray(a[:N], dtype=complex)
        bv = np.ones(M, dtype=complex) if b is None else np.asarray(b[:M], dtype=complex)
        total = 0j
        ms = np.arange(1, M + 1)
        for n in range(1, N + 1):
            if av[n - 1] == 0:
                continue
            theta = _frac_of_product(lam, h * n)
            phases = np.exp(2j * math.pi * np.mod(theta * ms, 1.0))
            total += av[n - 1] * complex(np.dot(bv, phases))
        return total
    re, im = [], []
    for n in range(1, N + 1):
        g = _geometric_unit(_frac_of_product(lam, h * n), M)
        re.append(g.real)
        im.append(g.imag)
    return complex(math.fsum(re), math.fsum(im))


def empirical_rho(lam, h: int, N: int, M: int) -> float:
    """|bilinear_sum(lam, h, N, M)| / (N M) with unit coefficients."""
    return abs(bilinear_sum(lam, h, N, M)) / (N * M)


# -- W / V pair counts ------------------------------------------------------------

def _chi_counts(chi: np.ndarray, M: int) -> Tuple[int, int]:
    c = chi[1 : M + 1]
    return int(np.count_nonzero(c == 1)), int(np.count_nonzero(c == -1))


def _chi_upto(ctx, n: int) -> np.ndarray:
    return chi_array(ctx, n)


def pair_count_W(p, N: int, M: int, sigma: int) -> int:
    """#{(n, m): n <= N, m <= M, (nm|p) = sigma} by row decomposition."""
    ctx = _ctx(p)
    if N < 1 or M < 1:
        raise DomainError("N, M must be >= 1")
    if sigma not in (1, -1):
        raise DomainError("sigma must be +1 or -1")
    chi = _chi_upto(ctx, max(N, M))
    n_res, n_non = _chi_counts(chi, N)
    m_res, m_non = _chi_counts(chi, M)
    if sigma == 1:
        return n_res * m_res + n_non * m_non
    return n_res * m_non + n_non * m_res


@dataclass
class PairCountRecord:
    p: int
    N: int
    M: int
    sigma: int
    count_W: int
    count_V: int
    lam: float
    exact_rechecks: int = 0


def _v_condition_exact(params: BeattyParams, lam: Real, v: int) -> bool:
    fr = (lam * (v - params.beta + 1)).frac()
    if near(fr, 0) or near(fr, lam):
        raise PrecisionError(f"V-condition for value {v} is within 2^-64 of the boundary")
    return fr.sign() > 0 and fr.compare(lam) <= 0


def _v_mask(params: BeattyParams, lam: Real, values: np.ndarray) -> Tuple[np.ndarray, int]:
    """Boolean mask of 0 < {lam (v - beta + 1)} <= lam; float prefilter + exact recheck."""
    lamf = float(lam)
    shift = float(1 - params.beta)
    t = lamf * (values.astype(np.float64) + shift)
    fr = t - np.floor(t)
    mask = (fr > 0) & (fr <= lamf)
    close = (fr < _FLOAT_MARGIN) | (fr > 1 - _FLOAT_MARGIN) | (np.abs(fr - lamf) < _FLOAT_MARGIN)
    idx = np.flatnonzero(close)
    for i in idx.tolist():
        mask[i] = _v_condition_exact(params, lam, int(values[i]))
    return mask, len(idx)


def pair_count_V(p, N: int, M: int, sigma: int, params: BeattyParams) -> PairCountRecord:
    """W and V counts: V keeps pairs whose product nm satisfies the Beatty criterion."""
    ctx = _ctx(p)
    if params.alpha.compare(1) <= 0:
        raise DomainError("pair_count_V needs alpha > 1")
    if sigma not in (1, -1):
        raise DomainError("sigma must be +1 or -1")
    if N < 1 or M < 1:
        raise DomainError("N, M must be >= 1")
    if N * M > PAIR_CAP:
        raise ResourceError(f"N*M = {N * M} exceeds cap {PAIR_CAP}")
    lam = params.lam
    chi = _chi_upto(ctx, max(N, M))
    ms = np.arange(1, M + 1, dtype=np.int64)
    chim = chi[1 : M + 1]
    count_W = count_V = rechecks = 0
    for n in range(1, N + 1):
        tau = int(chi[n])
        if tau == 0:
            continue
        sel = ms[chim == sigma * tau]
        count_W += len(sel)
        if len(sel):
            mask, k = _v_mask(params, lam, n * sel)
            count_V += int(np.count_nonzero(mask))
            rechecks += k
    return PairCountRecord(ctx.p, N, M, sigma, count_W, count_V, float(lam), rechecks)


def pairs_in_V(p, N: int, M: int, sigma: int, params: BeattyParams) -> List[Tuple[int, int]]:
    """The pairs of V explicitly, ascending in (n, m)."""
    ctx = _ctx(p)
    lam = params.lam
    chi = _chi_upto(ctx, max(N, M))
    ms = np.arange(1, M + 1, dtype=np.int64)
    chim = chi[1 : M + 1]
    out = []
    for n in range(1, N + 1):
        tau = int(chi[n])
        if tau == 0:
            continue
        sel = ms[chim == sigma * tau]
        if len(sel):
            mask, _ = _v_mask(params, lam, n * sel)
            out.extend((n, int(m)) for m in sel[mask].tolist())
    return out


# -- Beatty product non-residue experiment -----------------------------------------

@dataclass
class Theorem2Result:
    p: int
    alpha: str
    beta: str
    epsilon: float
    N: int
    M: int
    sigma_target: int
    reflected: bool
    counts: dict = field(default_factory=dict)
    witnesses: List[Tuple[int, int]] = field(default_factory=list)  # (value, beatty index)
    verified: int = 0
    least_index: Optional[int] = None
    rho_hat: List[float] = field(default_factory=list)
    H: Optional[int] = None


def theorem2_experiment(p, params: BeattyParams, epsilon: float, rho_threshold: float = 0.5,
                        h_max: int = 32) -> Theorem2Result:
    """Desk-scale run of the pair-counting argument for |alpha| > 1.

    N = floor(p^(1/(4 sqrt e)+eps/2)), M = floor(p^(eps/2)).  For alpha > 1 the
    non-residue target is sigma = -1; for alpha < -1 the counts run on the
    reflected parameters (-alpha, 1 - beta) with sigma = -(-1|p), and each
    value v maps to the term -v of the original sequence.  Every witness is
    re-verified with exact floors and a Legendre evaluation.

    H is the least h <= h_max with empirical rho(h) = |sum|/(NM) above
    ``rho_threshold`` (None if no such h).
    """
    from .density import BURGESS_EXPONENT

    ctx = _ctx(p)
    sa = params.alpha.sign()
    reflected = sa < 0
    work = params.negated() if reflected else params
    if work.alpha.compare(1) <= 0:
        raise DomainError("theorem2_experiment needs |alpha| > 1")
    N = math.floor(ctx.p ** (BURGESS_EXPONENT + epsilon / 2))
    M = math.floor(ctx.p ** (epsilon / 2))
    if N < 1 or M < 1:
        raise DomainError(f"degenerate N={N}, M={M}")
    sigma_target = -ctx.legendre(-1) if reflected else -1

    counts = {}
    for sigma in (1, -1):
        rec = pair_count_V(ctx, N, M, sigma, work)
        counts[sigma] = (rec.count_W, rec.count_V)
    values = sorted({n * m for n, m in pairs_in_V(ctx, N, M, sigma_target, work)})

    lam = work.lam
    witnesses = []
    for v in values:
        if work.beta.compare(v) >= 0:
            continue
        idx = (lam * (v - work.beta)).ceil()
        if beatty_term(work, idx) != v:
            raise AssertionError(f"index {idx} does not reproduce {v}")
        term = v
        if reflected:
            term = beatty_term(params, idx)
            if term != -v:
                # one of the O(1) exceptions of the negation identity
                continue
        if ctx.legendre(term) != -1:
            raise AssertionError(f"witness term {term} is not a non-residue mod {ctx.p}")
        witnesses.append((term, idx))
    rho = [empirical_rho(lam, h, N, M) for h in range(1, h_max + 1)]
    H = next((h for h, r in enumerate(rho, 1) if r > rho_threshold), None)
    return Theorem2Result(
        p=ctx.p, alpha=params.alpha_token, beta=params.beta_token, epsilon=epsilon, N=N, M=M,
        sigma_target=sigma_target, reflected=reflected, counts=counts, witnesses=witnesses,
        verified=len(witnesses), least_index=min((i for _, i in witnesses), default=None),
        rho_hat=rho, H=H,
    )
