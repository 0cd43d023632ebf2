import pytest

import oracles
from davenport.bounds import d_star, rank2_closed_forms
from davenport.group import GroupDescriptor, InvalidInput, sigma
from davenport.search import (Budget, BudgetExhausted, InvariantResult, check_certificate,
                              compute, exact_davenport, exact_dm, exact_eta, exact_s,
                              has_m_disjoint_zero_sums, violates)

SMALL = [(2,), (3,), (4,), (5,), (6,), (2, 2), (7,), (8,), (2, 4), (2, 2, 2), (9,), (3, 3)]


@pytest.mark.parametrize("factors", SMALL)
@pytest.mark.parametrize("kind", ["D", "eta", "s"])
def test_matches_naive_oracle(kind, factors):
    G = GroupDescriptor(factors)
    result = compute(G, kind)
    assert result.value == oracles.invariant_dfs(kind, factors)
    assert check_certificate(result)


@pytest.mark.parametrize("factors", [f for f in SMALL if len(oracles.elements(f)) <= 6])
@pytest.mark.parametrize("kind", ["D", "eta", "s"])
def test_matches_subset_oracle(kind, factors):
    # second oracle: all multisets of each length, all index subsets
    assert compute(GroupDescriptor(factors), kind).value == oracles.invariant(kind, factors)


@pytest.mark.parametrize("factors, value", [((6,), 6), ((2, 4), 5), ((2, 2, 2), 4)])
def test_davenport_examples(factors, value):
    assert exact_davenport(GroupDescriptor(factors)).value == value


@pytest.mark.parametrize("factors, eta, s", [((3,), 3, 5), ((2, 2), 4, 5), ((3, 3), 7, 9)])
def test_eta_s_examples(factors, eta, s):
    G = GroupDescriptor(factors)
    assert exact_eta(G).value == eta
    assert exact_s(G).value == s


@pytest.mark.parametrize("factors", [(12,), (2, 6), (4, 4), (2, 8), (5, 5)])
def test_rank_two_closed_forms(factors):
    G = GroupDescriptor(factors)
    n1, n2 = (1, factors[0]) if len(factors) == 1 else factors
    forms = rank2_closed_forms(n1, n2)
    for kind in ("D", "eta", "s"):
        assert compute(G, kind).value == forms[kind], kind


def test_certificate_is_lex_least_and_sorted():
    r = exact_davenport(GroupDescriptor((2, 4)))
    assert r.certificate == [(0, 1), (0, 1), (0, 1), (1, 0)]
    r = exact_s(GroupDescriptor((3,)))
    assert r.certificate == sorted(r.certificate)


def test_trivial_group():
    T = GroupDescriptor(())
    assert exact_davenport(T).value == 1
    assert exact_eta(T).value == 1
    assert exact_s(T).value == 1
    assert exact_dm(T, 3).value == 3


def test_dm_examples():
    assert exact_dm(GroupDescriptor((2, 4)), 1).value == 5
    assert exact_dm(GroupDescriptor((2,)), 2).value == 4
    r = exact_dm(GroupDescriptor((3,)), 2)
    assert r.value == 6 and r.certificate == [(1,)] * 5
    assert check_certificate(r)


@pytest.mark.parametrize("factors, m", [((2,), 2), ((3,), 2), ((2,), 3), ((4,), 2), ((2, 2), 2)])
def test_dm_matches_naive_oracle(factors, m):
    r = exact_dm(GroupDescriptor(factors), m)
    assert r.value == oracles.dm(factors, m)
    assert check_certificate(r)


def test_has_m_disjoint_examples():
    C2, C3 = GroupDescriptor((2,)), GroupDescriptor((3,))
    ok, witness = has_m_disjoint_zero_sums([(0,), (0,)], C2, 2)
    assert ok and sorted(witness) == [[0], [1]]
    assert not has_m_disjoint_zero_sums([(1,)] * 5, C3, 2)[0]
    ok, witness = has_m_disjoint_zero_sums([(1,)] * 6, C3, 2)
    assert ok and len(witness) == 2


def test_has_m_disjoint_witness_is_valid():
    G = GroupDescriptor((2, 4))
    S = [(1, 0), (0, 1), (1, 3), (0, 2), (0, 2), (1, 1), (1, 1)]
    for m in range(1, 5):
        ok, witness = has_m_disjoint_zero_sums(S, G, m)
        assert ok == (oracles.max_disjoint(G.factors, S) >= m)
        if ok:
            flat = [i for block in witness for i in block]
            assert len(witness) == m and len(flat) == len(set(flat))
            assert all(block and sigma([S[i] for i in block], G) == G.zero for block in witness)


def test_budget_exhaustion_carries_lower_bound():
    G = GroupDescriptor((20,))
    with pytest.raises(BudgetExhausted) as info:
        exact_s(G, Budget(max_nodes=2000))
    ex = info.value
    assert ex.nodes >= 2000
    assert ex.lower_bound == len(ex.certificate) + 1
    assert violates("s", ex.certificate, G)
    assert ex.lower_bound <= 39


def test_budget_validation():
    with pytest.raises(InvalidInput):
        Budget(max_nodes=0)
    with pytest.raises(InvalidInput):
        Budget(max_seconds=-1)


def test_unknown_kind():
    with pytest.raises(InvalidInput):
        compute(GroupDescriptor((2,)), "nope")
    with pytest.raises(InvalidInput):
        exact_dm(GroupDescriptor((2,)), 0)


def test_result_record_round_trip():
    r = exact_dm(GroupDescriptor((3,)), 2)
    back = InvariantResult.from_record(r.as_record())
    assert back.as_record() == r.as_record()
    assert back.group == r.group and back.certificate == r.certificate


@pytest.mark.parametrize("factors", [(2,), (3,), (4,), (2, 2), (5,), (6,), (2, 4), (3, 3),
                                     (2, 2, 2), (8,), (2, 6), (4, 4)])
def test_invariant_chain(factors):
    G = GroupDescriptor(factors)
    D, eta, s = (compute(G, k).value for k in ("D", "eta", "s"))
    assert d_star(G) <= D <= eta <= s - G.exponent + 1


def _chains(max_order, start=2, prefix=()):
    out = []
    order = 1
    for n in prefix:
        order *= n
    for n in range(start, max_order // order + 1):
        if prefix and n % prefix[-1]:
            continue
        out.append(prefix + (n,))
        out.extend(_chains(max_order, n, prefix + (n,)))
    return out


@pytest.fixture(scope="module")
def davenport_values():
    return {f: exact_davenport(GroupDescriptor(f)).value for f in _chains(36)}


def test_subgroup_monotonicity(davenport_values):
    groups = [GroupDescriptor(f) for f in davenport_values]
    pairs = 0
    for H in groups:
        for G in groups:
            if H.order < G.order and G.order % H.order == 0 and G.is_subgroup_type(H):
                pairs += 1
                assert davenport_values[H.factors] <= davenport_values[G.factors], (H, G)
    assert pairs > 50


def test_dm_growth():
    for factors in [(2,), (3,), (4,), (2, 2)]:
        G = GroupDescriptor(factors)
        values = [exact_dm(G, m).value for m in (1, 2, 3)]
        assert values[1] >= values[0] + 1 and values[2] >= values[1] + 1
