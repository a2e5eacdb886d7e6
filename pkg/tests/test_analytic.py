import cmath
import math
import random
from fractions import Fraction

import pytest

from oracles import (
    bilinear_direct, euler, exp_sum_direct, in_beatty_sqrt2, star_discrepancy_brute,
    theorem2_witness_values_sqrt2,
)
from qnrlab.analytic import (
    UnitSequence, bilinear_sum, cf_convergents, empirical_rho, erdos_turan_bound, exp_sum,
    pair_count_V, pair_count_W, star_discrepancy, theorem2_experiment, vinogradov_bound,
)
from qnrlab.errors import DomainError, PrecisionError, ResourceError
from qnrlab.fixed import euler_e, golden_ratio, parse_real, sqrt_int
from qnrlab.ntcore import legendre, sieve_primes
from qnrlab.sequences import BeattyParams, beatty_term

SQRT2 = BeattyParams.parse("sqrt2", "0")


# -- continued fractions

def test_cf_sqrt2():
    cf = cf_convergents(sqrt_int(2), 4)
    assert cf.partial_quotients == [1, 2, 2, 2]
    assert cf.convergents == [(1, 1), (3, 2), (7, 5), (17, 12)]


def test_cf_rational_terminates():
    cf = cf_convergents(Fraction(1, 2), 2)
    assert cf.terminated and cf.convergents[-1] == (1, 2)
    cf = cf_convergents(Fraction(355, 113), 10)
    assert cf.terminated and cf.convergents[-1] == (355, 113)


def test_cf_golden_ratio_fibonacci():
    cf = cf_convergents(golden_ratio(), 6)
    assert cf.convergents == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (13, 8)]


def test_cf_e_pattern():
    cf = cf_convergents(euler_e(), 12)
    assert cf.partial_quotients == [2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8]


def test_cf_precision_exhaustion():
    with pytest.raises(PrecisionError, match="after"):
        cf_convergents(sqrt_int(2, 192), 500)
    with pytest.raises(DomainError):
        cf_convergents(Fraction(1, 3), 0)


def test_cf_invariants_exact():
    for x in (sqrt_int(3), parse_real("1/sqrt2")[0], -golden_ratio()):
        cf = cf_convergents(x, 30)
        (p1, q1), (p2, q2) = cf.convergents[-2:]
        assert abs(p1 * q2 - p2 * q1) == 1
        for p, q in cf.convergents:
            assert math.gcd(p, q) == 1
            assert abs(x.lower - Fraction(p, q)) <= Fraction(1, q * q)


# -- exponential sums and discrepancy

def test_exp_sum_examples():
    assert exp_sum([0.0] * 7, 1) == 7
    T = 64
    assert abs(exp_sum([t / T for t in range(T)], 1)) < 1e-9 * T
    rng = random.Random(5)
    pts = [rng.random() for _ in range(500)]
    for h in (1, -3, 17):
        assert abs(exp_sum(pts, h) - exp_sum_direct(pts, h)) < 1e-9
    with pytest.raises(DomainError):
        exp_sum(pts, 0)


def test_unit_sequence_validation():
    with pytest.raises(DomainError):
        UnitSequence.of([0.5, 1.0])


def test_star_discrepancy_examples():
    assert star_discrepancy([0.0]) == 1.0
    T = 10
    assert star_discrepancy([(2 * i - 1) / (2 * T) for i in range(1, T + 1)]) == pytest.approx(1 / (2 * T))
    assert star_discrepancy([0.25, 0.75]) == 0.25
    with pytest.raises(DomainError):
        star_discrepancy([])


def test_star_discrepancy_matches_bruteforce():
    rng = random.Random(11)
    for T in (1, 2, 5, 40):
        pts = [rng.random() for _ in range(T)]
        assert star_discrepancy(pts) == pytest.approx(star_discrepancy_brute(pts), abs=1e-12)


def test_erdos_turan_examples():
    assert erdos_turan_bound([0.0], 1) == 3.5
    assert erdos_turan_bound([0.5], 1) == 3.5
    seq = UnitSequence.kronecker(sqrt_int(2), 100)
    b, d = erdos_turan_bound(seq, 10), star_discrepancy(seq)
    # fixture from an mpmath evaluation of the same quantities
    assert d == pytest.approx(0.014718625761429682, rel=1e-12)
    assert b - d == pytest.approx(0.16524306024569688, rel=1e-9)


@pytest.mark.parametrize("H", [1, 5, 10, 50])
def test_erdos_turan_dominates(H):
    rng = random.Random(H)
    for _ in range(20):
        T = rng.choice([10, 100, 1000])
        seq = UnitSequence.of([rng.random() for _ in range(T)])
        assert erdos_turan_bound(seq, H) >= star_discrepancy(seq)


# -- bilinear sums

def test_vinogradov_bound_examples():
    assert vinogradov_bound(100, 100, 10) == pytest.approx(10**4 * math.sqrt(0.121))
    assert vinogradov_bound(1, 1, 1) == 2
    assert vinogradov_bound(30, 40, 1200) >= 1200
    with pytest.raises(DomainError):
        vinogradov_bound(0.5, 2, 1)


def test_bilinear_examples():
    assert bilinear_sum(0, 1, 5, 7) == 35
    assert bilinear_sum(0.5, 1, 2, 2) == pytest.approx(2)
    assert bilinear_sum(0.5, 1, 2, 2, direct=True) == pytest.approx(2)
    assert bilinear_sum(math.sqrt(2), 1, 4, 4, a=[0] * 4) == 0
    with pytest.raises(ResourceError):
        bilinear_sum(0.3, 1, 10**6, 10**5, direct=True)


def test_bilinear_fast_equals_direct():
    rng = random.Random(2024)
    for _ in range(50):
        lam, h = rng.random(), rng.randint(1, 20)
        N, M = rng.randint(1, 200), rng.randint(1, 200)
        fast = bilinear_sum(lam, h, N, M)
        ref = bilinear_sum(lam, h, N, M, direct=True)
        assert abs(fast - ref) <= 1e-6 * max(1.0, abs(ref))
        assert abs(fast) <= N * M + 1e-9


def test_bilinear_against_oracle_with_coefficients():
    rng = random.Random(3)
    N, M = 13, 17
    a = [cmath.exp(2j * math.pi * rng.random()) * rng.random() for _ in range(N)]
    b = [rng.choice([-1, 0, 1]) for _ in range(M)]
    lam = Fraction(5, 17)
    got = bilinear_sum(lam, 3, N, M, a, b)
    assert abs(got - bilinear_direct(float(lam), 3, N, M, a, b)) < 1e-9


def test_bilinear_with_real_lambda():
    lam = parse_real("1/sqrt2")[0]
    assert abs(bilinear_sum(lam, 2, 50, 60) - bilinear_direct(1 / math.sqrt(2), 2, 50, 60)) < 1e-8
    assert 0 <= empirical_rho(lam, 1, 50, 60) <= 1


# -- pair counts

def test_pair_count_W_examples():
    assert pair_count_W(101, 1, 1, 1) == 1
    assert pair_count_W(7, 2, 2, 1) == 4
    assert pair_count_W(7, 2, 2, -1) == 0
    with pytest.raises(DomainError):
        pair_count_W(7, 2, 2, 0)


def test_pair_count_W_bruteforce():
    for p in sieve_primes(101)[1:]:
        for N, M in ((1, 40), (40, 1), (17, 23), (40, 40), (p, p)):
            for s in (1, -1):
                brute = sum(1 for n in range(1, N + 1) for m in range(1, M + 1) if euler(n * m, p) == s)
                assert pair_count_W(p, N, M, s) == brute


def test_pair_count_V_examples():
    r = pair_count_V(7, 1, 1, 1, SQRT2)
    assert (r.count_W, r.count_V) == (1, 1)
    r = pair_count_V(10007, 200, 50, -1, SQRT2)
    # brute-force oracle with integer square roots: W = 4944, V = 3401
    assert (r.count_W, r.count_V) == (4944, 3401)
    assert abs(r.count_V / r.count_W - 1 / math.sqrt(2)) < 0.15
    with pytest.raises(DomainError):
        pair_count_V(7, 2, 2, 1, BeattyParams.parse("1/sqrt2", "0"))
    with pytest.raises(ResourceError):
        pair_count_V(7, 10**5, 10**5, 1, SQRT2)


def test_pair_count_V_bruteforce_small():
    for p in (11, 101, 1009):
        for s in (1, -1):
            r = pair_count_V(p, 30, 20, s, SQRT2)
            brute = sum(1 for n in range(1, 31) for m in range(1, 21)
                        if euler(n * m, p) == s and in_beatty_sqrt2(n * m))
            assert r.count_V == brute <= r.count_W


# -- Beatty product non-residue experiment

def test_theorem2_witnesses_verified():
    r = theorem2_experiment(10007, SQRT2, 0.4)
    assert (r.N, r.M) == (25, 6)
    assert [v for v, _ in r.witnesses] == theorem2_witness_values_sqrt2(10007, 0.4)
    for v, idx in r.witnesses:
        assert beatty_term(SQRT2, idx) == v and legendre(v, 10007) == -1
    # sigma dichotomy: pairs with nonzero Legendre product split into W+ and W-
    assert r.counts[1][0] + r.counts[-1][0] == r.N * r.M
    assert r.sigma_target == -1 and not r.reflected


def test_theorem2_negative_alpha_sigma():
    p = 10007
    params = BeattyParams.parse("-sqrt2", "0.3")
    r = theorem2_experiment(p, params, 0.4)
    assert r.reflected
    assert r.sigma_target == -legendre(-1, p)
    for v, idx in r.witnesses:
        assert v < 0
        assert beatty_term(params, idx) == v and legendre(v, p) == -1


def test_theorem2_domain():
    with pytest.raises(DomainError):
        theorem2_experiment(10007, BeattyParams.parse("1/sqrt2", "0"), 0.4)
