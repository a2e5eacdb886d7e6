"""Non-residue density over Burgess-type windows and supporting quantities."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import DomainError
from .ntcore import PrimeContext, _ctx, _euler_vec, chi_array, prime_bitmap, prime_nonresidues

#: 1/(4 sqrt(e)), the Burgess exponent.
BURGESS_EXPONENT = 1.0 / (4.0 * math.sqrt(math.e))

EXACT_SCAN_LIMIT = 10**7
GEOMETRIC_RATIO = 1.01
_CHUNK = 1 << 22


def burgess_floor(p: int, epsilon: float) -> int:
    """ceil(p^(1/(4 sqrt e) + epsilon))."""
    return math.ceil(p ** (BURGESS_EXPONENT + epsilon))


@dataclass(frozen=True)
class DensityScanResult:
    p: int
    epsilon: float
    window: Tuple[int, int]
    min_density: float
    argmin_N: int
    max_abs_charsum_ratio: float
    points_scanned: int
    grid: str


def _check_epsilon(epsilon: float) -> None:
    if not 0 < epsilon <= 0.5:
        raise DomainError(f"epsilon must lie in (0, 0.5], got {epsilon}")
    if epsilon > 0.01:
        warnings.warn(f"epsilon={epsilon} exceeds 0.01; the density argument assumes epsilon <= 0.01",
                      stacklevel=3)


def _geometric_grid(lo: int, hi: int, ratio: float = GEOMETRIC_RATIO) -> np.ndarray:
    pts = {lo, hi}
    x = float(lo)
    while x < hi:
        pts.add(int(x))
        x *= ratio
    return np.array(sorted(v for v in pts if lo <= v <= hi), dtype=np.int64)


def density_scan(p, epsilon: float, grid: str = "auto") -> DensityScanResult:
    """Scan count_nonres(N)/N and |S_p(N)|/N over ceil(p^(1/(4 sqrt e)+eps)) <= N <= p.

    ``grid`` is ``"exact"`` (every N), ``"geometric"`` (ratio 1.01 plus the
    endpoints) or ``"auto"`` (exact up to p = 10^7).  Either way the counts
    come from one running pass over n = 1..p.
    """
    ctx = _ctx(p)
    p = ctx.p
    _check_epsilon(epsilon)
    lo, hi = burgess_floor(p, epsilon), p
    if lo > hi:
        raise DomainError(f"empty window: {lo} > {p}")
    if grid == "auto":
        grid = "exact" if p <= EXACT_SCAN_LIMIT else "geometric"
    if grid not in ("exact", "geometric"):
        raise DomainError(f"unknown grid policy {grid!r}")

    pts = np.arange(lo, hi + 1, dtype=np.int64) if grid == "exact" else _geometric_grid(lo, hi)
    nonres_at = np.empty(len(pts), dtype=np.int64)
    sum_at = np.empty(len(pts), dtype=np.int64)
    run_nonres = run_sum = 0
    # chunked running pass; each chunk resolves the grid points inside it
    for start in range(1, hi + 1, _CHUNK):
        stop = min(start + _CHUNK, hi + 1)
        chi = _chi_range(ctx, start, stop)
        cnr = np.cumsum(chi == -1, dtype=np.int64) + run_nonres
        cs = np.cumsum(chi, dtype=np.int64) + run_sum
        sel = (pts >= start) & (pts < stop)
        nonres_at[sel] = cnr[pts[sel] - start]
        sum_at[sel] = cs[pts[sel] - start]
        run_nonres, run_sum = int(cnr[-1]), int(cs[-1])

    dens = nonres_at / pts
    i = int(np.argmin(dens))
    ratio = float(np.max(np.abs(sum_at) / pts))
    return DensityScanResult(p, epsilon, (lo, hi), float(dens[i]), int(pts[i]), ratio, len(pts), grid)


def _chi_range(ctx: PrimeContext, start: int, stop: int) -> np.ndarray:
    if stop - 1 <= _CHUNK:
        return chi_array(ctx, stop - 1)[start:]
    if ctx.has_table or ctx.p <= EXACT_SCAN_LIMIT:
        table = np.where(ctx.residue_table, 1, -1).astype(np.int8)
        table[0] = 0
        return table[np.arange(start, stop, dtype=np.int64) % ctx.p]
    if ctx.p < 2**32:
        return _euler_vec(np.arange(start, stop, dtype=np.uint64), ctx.p)
    return np.array([ctx.legendre(n) for n in range(start, stop)], dtype=np.int8)


def hildebrand_ratio(p) -> float:
    """S_p(floor(p^(1/4))) / floor(p^(1/4))."""
    ctx = _ctx(p)
    if ctx.p < 17:
        raise DomainError("hildebrand_ratio needs p >= 17")
    x = math.isqrt(math.isqrt(ctx.p))
    s = int(np.sum(chi_array(ctx, x)[1:], dtype=np.int64))
    return s / x


def mertens_tail(y: float, z: float) -> Tuple[float, float, float]:
    """(sum of 1/q over primes y < q <= z, log(log z / log y), |difference|)."""
    if y < 2:
        raise DomainError("y must be >= 2")
    if z < y:
        raise DomainError("z must be >= y")
    bm = prime_bitmap(int(math.floor(z)))
    qs = np.flatnonzero(bm)
    qs = qs[qs > y]
    total = math.fsum((1.0 / qs.astype(np.float64)).tolist())
    prediction = math.log(math.log(z) / math.log(y))
    return total, prediction, abs(total - prediction)


def reciprocal_nonres_sum(p, X: int) -> float:
    return math.fsum(1.0 / q for q in prime_nonresidues(p, X))


# -- constructive non-residues --------------------------------------------

@dataclass
class ConstructionReport:
    p: int
    N: int
    epsilon: float
    mode: str  # "small-q1" or "large-q1"
    k: int
    products: List[int]
    verified_count: int
    q: List[int] = field(default_factory=list)
    reciprocal_sum_k: float = 0.0
    overshoot: bool = False
    undershoot: bool = False
    residue_density_min: Optional[float] = None


def construct_nonresidues(p, N: int, epsilon: float, mode: str = "auto") -> ConstructionReport:
    """Build distinct non-residues q_j * m <= N from prime non-residues and residues.

    With q_1 <= 1/epsilon the products are q_1 * n over residues n <= N/q_1.
    Otherwise k is the least index with sum_{l<=k} 1/q_l >= epsilon and the
    cofactors m <= N/q_j are residues free of the primes q_1..q_k.  The
    upper sandwich sum <= 2*epsilon is only reported (``overshoot``), and if
    the reciprocal sum never reaches epsilon all available q are used
    (``undershoot``).

    ``mode`` forces one branch ("small-q1" or "large-q1"); desk-scale primes
    essentially never have q_1 > 100, so the second branch is only reached
    this way.
    """
    ctx = _ctx(p)
    if not 0 < epsilon <= 0.01:
        raise DomainError("epsilon must lie in (0, 0.01]")
    if N < 1:
        raise DomainError("N must be >= 1")
    qs = prime_nonresidues(ctx, N)
    if not qs:
        raise DomainError(f"no prime non-residue mod {ctx.p} is <= {N}")
    chi = chi_array(ctx, N)

    def residues_upto(x: int) -> np.ndarray:
        return np.flatnonzero(chi[: x + 1] == 1)

    if mode == "auto":
        mode = "small-q1" if qs[0] <= 1 / epsilon else "large-q1"
    if mode not in ("small-q1", "large-q1"):
        raise DomainError(f"unknown construction mode {mode!r}")
    if mode == "small-q1":
        k = 1
        used = qs[:1]
        cof = [residues_upto(N // qs[0])]
        acc = 1 / qs[0]
    else:
        acc, k = 0.0, 0
        for q in qs:
            k += 1
            acc += 1 / q
            if acc >= epsilon:
                break
        used = qs[:k]
        cof = []
        for qj in used:
            m = residues_upto(N // qj)
            keep = np.ones(len(m), dtype=bool)
            for ql in used:
                keep &= (m % ql) != 0
            cof.append(m[keep])

    products: List[int] = []
    dens = []
    for qj, ms in zip(used, cof):
        products.extend((int(qj) * ms).tolist())
        dens.append(len(ms) * qj / N)
    if len(set(products)) != len(products):
        raise AssertionError("construction produced duplicate products")
    products.sort()
    verified = 0
    for v in products:
        if v > N or ctx.legendre(v) != -1:
            raise AssertionError(f"product {v} is not a non-residue <= {N}")
        verified += 1
    return ConstructionReport(
        p=ctx.p, N=N, epsilon=epsilon, mode=mode, k=k, products=products,
        verified_count=verified, q=list(used), reciprocal_sum_k=acc,
        overshoot=mode == "large-q1" and acc > 2 * epsilon,
        undershoot=mode == "large-q1" and acc < epsilon,
        residue_density_min=min(dens) if dens else None,
    )


# -- constants and bound curves ------------------------------------------------

def adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float,
                     max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = (a + b) / 2
        lm, rm = (a + m) / 2, (m + b) / 2
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        err = (left + right - whole) / 15
        if depth <= 0 or abs(err) < tol / 2:
            return left + right + err
        return (rec(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f((a + b) / 2)
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def xi_integrand(t: float) -> float:
    return math.log(t) / (t + 1)


def xi_constant(tolerance: float = 1e-10) -> float:
    """1 - 2 log(1 + sqrt e) + 4 * integral_1^sqrt(e) log(t)/(t+1) dt."""
    if tolerance < 1e-12:
        raise DomainError("tolerance must be >= 1e-12")
    se = math.sqrt(math.e)
    integral = adaptive_simpson(xi_integrand, 1.0, se, tolerance / 4)
    return 1 - 2 * math.log(1 + se) + 4 * integral


def gs_curves(alpha: float, xi: Optional[float] = None) -> Tuple[float, float]:
    """(max{|xi|, 1/2 + 2 log^2 alpha}, -2 log alpha) for e^(-1/2) <= alpha <= 1."""
    lo = math.exp(-0.5)
    if not (lo - 1e-15 <= alpha <= 1):
        raise DomainError(f"alpha must lie in [e^-1/2, 1], got {alpha}")
    if xi is None:
        xi = xi_constant()
    la = math.log(alpha)
    return max(abs(xi), 0.5 + 2 * la * la), -2 * la + 0.0  # no -0.0 at alpha = 1
