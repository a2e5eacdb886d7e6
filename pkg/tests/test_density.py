import math
import warnings

import pytest

from oracles import euler, is_prime_trial, least_nonres_brute, min_density_brute
from qnrlab.density import (
    BURGESS_EXPONENT, adaptive_simpson, construct_nonresidues, density_scan, gs_curves,
    hildebrand_ratio, mertens_tail, reciprocal_nonres_sum, xi_constant, xi_integrand,
)
from qnrlab.errors import DomainError
from qnrlab.ntcore import sieve_primes


def test_burgess_exponent():
    assert BURGESS_EXPONENT == pytest.approx(0.151633, abs=1e-6)


def test_density_scan_p7():
    r = density_scan(7, 0.01, "exact")
    assert r.window == (2, 7)
    assert r.min_density == 0 and r.argmin_N == 2
    assert r.max_abs_charsum_ratio <= 1


@pytest.mark.parametrize("p", [101, 1009, 10007])
def test_density_at_p_is_half(p):
    # with N_hi = p the last point has (p-1)/2 non-residues out of p
    r = density_scan(p, 0.01, "exact")
    assert r.window[1] == p
    assert r.min_density <= ((p - 1) / 2) / p


def test_density_scan_regression_10007():
    # brute-force oracle: window starts at 5, minimum 1/6 at N = 6
    r = density_scan(10007, 0.01, "exact")
    assert r.window == (5, 10007)
    assert (r.min_density, r.argmin_N) == (1 / 6, 6)
    assert (r.min_density, r.argmin_N) == min_density_brute(10007, 5, 10007)


def test_density_scan_geometric_grid_is_subset():
    exact = density_scan(10007, 0.01, "exact")
    geo = density_scan(10007, 0.01, "geometric")
    assert geo.points_scanned < exact.points_scanned
    assert geo.min_density >= exact.min_density
    assert geo.window == exact.window


def test_density_scan_epsilon_policy():
    with pytest.warns(UserWarning):
        density_scan(101, 0.2)
    with pytest.raises(DomainError):
        density_scan(101, 0.6)
    with pytest.raises(DomainError):
        density_scan(101, 0)


def test_density_above_045_positive_on_sample():
    for p in sieve_primes(20000)[168::97]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = density_scan(p, 0.45 - BURGESS_EXPONENT, "exact")
        assert r.min_density > 0


def test_hildebrand_ratio():
    assert hildebrand_ratio(17) == 1.0
    # oracle: S(31) = -1 for p = 10^6 + 3
    assert hildebrand_ratio(10**6 + 3) == pytest.approx(-1 / 31)
    for p in (101, 997, 65537):
        assert -1 <= hildebrand_ratio(p) <= 1
    with pytest.raises(DomainError):
        hildebrand_ratio(13)


def test_mertens_tail_examples():
    assert mertens_tail(10, 10)[:2] == (0.0, 0.0)
    s, pred, dev = mertens_tail(3, 7)
    assert s == pytest.approx(12 / 35)
    assert pred == pytest.approx(math.log(math.log(7) / math.log(3)))
    with pytest.raises(DomainError):
        mertens_tail(1.5, 10)


@pytest.mark.parametrize("y,z", [(286, 10**4), (286, 3 * 10**5), (500, 10**6), (2000, 10**6)])
def test_mertens_tail_deviation(y, z):
    assert mertens_tail(y, z)[2] <= 1 / math.log(y) ** 2


def test_reciprocal_nonres_sum():
    assert reciprocal_nonres_sum(7, 7) == pytest.approx(8 / 15)
    assert reciprocal_nonres_sum(101, 1) == 0
    assert reciprocal_nonres_sum(17, 20) == pytest.approx(1 / 3 + 1 / 5 + 1 / 7 + 1 / 11)


def test_construct_small():
    r = construct_nonresidues(7, 6, 0.01)
    assert r.mode == "small-q1"
    assert r.products == [3, 6]
    assert r.verified_count == 2
    with pytest.raises(DomainError):
        construct_nonresidues(7, 2, 0.01)


def test_construct_regression_10007():
    N = math.ceil(10007 ** 0.45)
    r = construct_nonresidues(10007, N, 0.01)
    # oracle: q_1 = 5 and there are 9 residues <= 64 // 5
    assert N == 64 and r.q == [5]
    assert r.verified_count == 9


@pytest.mark.parametrize("p,N,eps", [(10007, 2000, 0.01), (514751, 20000, 0.01), (1009, 300, 0.005)])
def test_construct_large_q1_branch(p, N, eps):
    r = construct_nonresidues(p, N, eps, mode="large-q1")
    assert r.mode == "large-q1"
    qs = [q for q in range(2, N + 1) if is_prime_trial(q) and euler(q, p) == -1]
    # k is minimal with sum 1/q_l >= eps
    assert r.q == qs[: r.k]
    assert sum(1 / q for q in r.q) >= eps
    assert sum(1 / q for q in r.q[:-1]) < eps
    assert r.overshoot == (r.reciprocal_sum_k > 2 * eps)
    assert len(set(r.products)) == len(r.products) == r.verified_count > 0
    for v in r.products:
        assert v <= N and euler(v, p) == -1
        # cofactor avoids every q_l, l <= k
        qj = next(q for q in r.q if v % q == 0)
        assert all((v // qj) % q for q in r.q)


def test_construct_mode_validation():
    with pytest.raises(DomainError):
        construct_nonresidues(7, 6, 0.01, mode="other")
    with pytest.raises(DomainError):
        construct_nonresidues(7, 6, 0.02)


def test_construct_subset_of_bruteforce():
    for p in sieve_primes(10**4)[1::37]:
        N = max(least_nonres_brute(p), math.ceil(p ** 0.45))
        r = construct_nonresidues(p, N, 0.01)
        brute = {n for n in range(1, N + 1) if euler(n, p) == -1}
        assert set(r.products) <= brute


def test_simpson_polynomial_exact():
    assert adaptive_simpson(lambda t: t ** 3, 0, 2, 1e-12) == pytest.approx(4.0, abs=1e-12)


def test_xi_constant():
    assert xi_integrand(1.0) == 0.0
    assert math.sqrt(math.e) == pytest.approx(1.648721, abs=1e-6)
    assert xi_constant(1e-6) == pytest.approx(-0.656999, abs=1e-5)
    with pytest.raises(DomainError):
        xi_constant(1e-13)


def test_gs_curves_examples():
    xi = xi_constant()
    t4, conj = gs_curves(1.0)
    assert t4 == pytest.approx(abs(xi)) and conj == 0
    t4, conj = gs_curves(math.exp(-0.5))
    assert t4 == pytest.approx(1.0) and conj == pytest.approx(1.0)
    t4, conj = gs_curves(0.8)
    assert t4 == pytest.approx(0.656999, abs=1e-6)
    assert conj == pytest.approx(0.44629, abs=1e-5)
    with pytest.raises(DomainError):
        gs_curves(0.5)


def test_gs_curves_grid():
    xi = xi_constant()
    lo = math.exp(-0.5)
    for i in range(100):
        a = min(1.0, lo + (1 - lo) * i / 99)
        t4, conj = gs_curves(a, xi)
        assert t4 >= abs(xi) and t4 >= 0.5
