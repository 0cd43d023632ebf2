import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from davenport import bounds as B
from davenport.group import GroupDescriptor, InvalidInput


def G(*factors):
    return GroupDescriptor(factors)


def test_d_star():
    assert B.d_star(G(2, 4, 8)) == 12
    assert B.d_star(G()) == 1
    assert B.d_star(G(3, 3)) == 5


def test_log_upper_bound():
    for n in (2, 7, 30):
        assert B.log_upper_bound(G(n)) == n
    assert B.log_upper_bound(G(2, 2, 2)) == pytest.approx(2 * (1 + math.log(4)), rel=1e-15)
    assert B.log_upper_bound(G(2, 2, 4)) == pytest.approx(4 * (1 + math.log(4)), rel=1e-15)
    with pytest.raises(InvalidInput):
        B.log_upper_bound(G())


@given(st.sampled_from([(2, 2), (2, 2, 2), (3, 9), (2, 4, 8), (5, 5, 5), (6, 12)]))
def test_log_upper_bound_is_upper(factors):
    g = G(*factors)
    with mpmath.workdps(50):
        exact = g.exponent * (1 + mpmath.log(mpmath.mpf(g.order) / g.exponent))
        assert mpmath.mpf(B.log_upper_bound(g)) >= exact


def test_alon_dubiner_values():
    assert B.alon_dubiner_c(1) == 2
    assert B.alon_dubiner_c(2) == 6147
    c3 = B.alon_dubiner_c(3, {2: 4})
    assert 20233.004 < c3 < 20233.005
    lo, hi = B.alon_dubiner_c_endpoints(3, {2: 4})
    assert lo <= hi <= Fraction(c3) < Fraction("20233.005")
    with pytest.raises(InvalidInput):
        B.alon_dubiner_c(2, {3: 1})


def test_alon_dubiner_rounds_up():
    for r in range(2, 7):
        lo, hi = B.alon_dubiner_c_endpoints(r)
        assert Fraction(B.alon_dubiner_c(r)) >= hi


def test_gao_yang():
    assert B.gao_yang_s_bound(G(2, 2, 2)) == 9
    assert B.gao_yang_s_bound(G(5, 5, 5)) == 129
    for p in (2, 3, 7):
        assert B.gao_yang_s_bound(G(p)) == 2 * p - 1


def test_eegkr_composition():
    assert B.eegkr_s_bound(G(2, 2, 2), (2, 4, 20370)).value == 20371
    assert B.eegkr_s_bound(G(3, 3), (2, 4)).value == 9
    assert B.eegkr_s_bound(G(2, 2, 6), (2, 4, 20370)).value == 20379
    with pytest.raises(InvalidInput):
        B.eegkr_s_bound(G(2, 2), (2, 4, 5))


@given(st.integers(1, 40), st.integers(1, 10))
def test_eegkr_reproduces_rank_two_form(n1, k):
    n2 = n1 * k
    if n2 == 1:
        return
    g = GroupDescriptor((n1, n2)) if n1 > 1 else GroupDescriptor((n2,))
    b = (2, 4) if n1 > 1 else (2,)
    assert B.eegkr_s_bound(g, b).value == B.rank2_closed_forms(n1, n2)["s"]


def test_derive_a3():
    d = B.derive_a3("20233.005")
    assert (d.s_coeff, d.eta_coeff, d.split_prime, d.last_small_prime) == (20370, 20369, 149, 139)
    assert d.b == (2, 4, 20370)
    assert B.verify_a3_derivation(d, 10**5) == []


def test_derive_a3_forced_split():
    assert B.derive_a3("20233.005", split_at=139).s_coeff == 20380
    with pytest.raises(InvalidInput):
        B.derive_a3("20233.005", split_at=140)


def test_derive_a3_tiny_c3():
    c3 = Fraction(30001, 10000)
    d = B.derive_a3(c3)
    assert d.split_prime == 2 and d.last_small_prime is None
    assert d.s_coeff == math.ceil(2 * c3 - 1)
    with pytest.raises(InvalidInput):
        B.derive_a3(3)


def test_derive_a3_is_optimal_over_splits():
    c3 = Fraction("20233.005")
    best = B.derive_a3(c3).s_coeff
    for p in B.primes_upto(400):
        assert B.derive_a3(c3, split_at=p).s_coeff >= best


def test_derivation_detects_failures():
    d = B.derive_a3("20233.005")
    weaker = B.A3Derivation(d.c3, d.s_coeff - 1, d.eta_coeff - 1, d.split_prime,
                            d.last_small_prime, d.small_requirement, d.large_requirement)
    assert B.verify_a3_derivation(weaker, 1000)


def test_main_bound_examples():
    assert B.main_bound(2, 2, 2).value == 20370
    assert B.main_bound(2, 4, 8).value == 20378
    for n in (3, 5):
        for a3 in (8, 20369):
            assert B.main_bound(n, n, n, a3).value == a3 * (n - 1) + 1
    rep = B.main_bound(2, 4, 8, a3=8)
    assert rep.conjectural and rep.details["D_H"] == 5
    assert B.main_bound(3, 3, 3).details["D_H"] == 1
    assert B.main_bound(2, 2, 8).details["D_H"] == 4
    for bad in [(1, 2, 2), (2, 3, 6), (2, 4, 6)]:
        with pytest.raises(InvalidInput):
            B.main_bound(*bad)


def test_main_bound_identity_random():
    rng = random.Random(7)
    for _ in range(2000):
        n1 = rng.randint(2, 50)
        n2 = n1 * rng.randint(1, 50)
        n3 = n2 * rng.randint(1, 50)
        a3 = rng.choice([8, 20369, rng.randint(1, 10**6)])
        rep = B.main_bound(n1, n2, n3, a3)
        assert rep.value == rep.details["pipeline_value"] == B.expanded_main_bound(n1, n2, n3, a3)


def test_crossover():
    with mpmath.workdps(50):
        ref = mpmath.mpf(20368) / (2 * mpmath.log(2))
    thr = B.crossover_threshold(2, 2)
    assert abs(thr - float(ref)) / float(ref) < 1e-9
    assert thr >= ref
    assert B.crossover_compare(2, 2, 16384)["main_is_smaller"]
    assert not B.crossover_compare(2, 2, 4)["main_is_smaller"]
    with pytest.raises(InvalidInput):
        B.crossover_threshold(1, 2)


def test_corollary_and_omega():
    assert B.corollary_bound(2) == 4
    assert B.corollary_bound(6) == 46
    assert B.omega(1) == 0
    assert [B.omega(n) for n in (2, 12, 30, 97, 210)] == [1, 2, 3, 1, 4]
    with pytest.raises(InvalidInput):
        B.corollary_bound(1)


def test_corollary_caps_at_a3():
    n = 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23 * 29
    assert B.corollary_bound(n) == 20369 * (n - 1) + 1


def test_conjecture_window():
    assert B.conjecture_window(2, 4, 8) == (12, 17)
    assert B.conjecture_window(2, 2, 2) == (4, 9)
    assert B.conjecture_window(3, 3, 3) == (7, 17)
    with pytest.raises(InvalidInput):
        B.conjecture_window(2, 3, 6)


def test_trivial_a_r_lower():
    assert [B.trivial_a_r_lower(r) for r in (1, 2, 3)] == [1, 3, 7]


def test_bounds_table():
    names = [r.name for r in B.bounds_table(G(2, 2, 2))]
    assert {"D_star", "D_log_upper", "main_bound", "conjecture_window", "corollary"} <= set(names)
    names = [r.name for r in B.bounds_table(G(3, 3))]
    assert "D_rank2_exact" in names


def test_eegkr_rank_one():
    for n in range(2, 101):
        assert B.eegkr_s_bound(G(n), (2,)).value == 2 * n - 1


def test_recursion_monotone_in_override():
    assert B.alon_dubiner_c(3, {2: 4}) < B.alon_dubiner_c(3, {2: 6147}) == B.alon_dubiner_c(3)


def test_corollary_dominates_d_star():
    for n in range(2, 10**4 + 1):
        bound, dstar = B.corollary_bound(n), 3 * n - 2
        assert bound >= dstar
        assert (bound == dstar) == (B.omega(n) == 1)


@given(st.integers(2, 100), st.integers(1, 100), st.integers(1, 100))
def test_main_bound_strictly_above_d_star(n1, k2, k3):
    n2, n3 = n1 * k2, n1 * k2 * k3
    assert B.main_bound(n1, n2, n3).value > B.d_star(G(n1, n2, n3))
