import math

import pytest

from dissem.adversary import (
    BOUND_FORMULAS,
    bound_for,
    greedy_adversary,
    lower_bound_value,
    nlogn_cap,
    replay,
    resolve_cap,
    verify_upper_bound,
    worst_case_time,
)
from dissem.dissemination import RoundCount, pigeonhole_horizon
from dissem.errors import ValidationError
from dissem.graphs import (
    ClassKind,
    GraphClassDescriptor,
    contains,
    describe,
    directed_path,
    enumerate_class,
    make_graph,
)


def brute_force_value(desc, cap):
    """Plain recursive minimax over set-valued states; None if above ``cap``."""
    graphs = list(enumerate_class(desc))
    n = desc.n
    full = frozenset(range(1, n + 1))

    def advance(sets, g):
        return tuple(s | {v for u, v in g.edges if u in s} for s in sets)

    def value(sets, budget):
        if full in sets:
            return 0
        if budget == 0:
            return math.inf
        return 1 + max(value(advance(sets, g), budget - 1) for g in graphs)

    v = value(tuple(frozenset({p}) for p in range(1, n + 1)), cap)
    return None if v == math.inf else v


ORACLE_CASES = [
    ("rooted-trees", 2, None),
    ("rooted-trees", 3, None),
    ("directed-chains", 3, None),
    ("directed-chains", 4, None),
    ("undirected-chains", 3, None),
    ("undirected-chains", 4, None),
    ("star", 4, None),
    ("rooted-trees-leaves", 4, 3),
]


@pytest.mark.parametrize("kind,n,m", ORACLE_CASES)
def test_search_matches_brute_force(kind, n, m):
    desc = describe(kind, n, m)
    cap = max(pigeonhole_horizon(n), 1)
    res = worst_case_time(desc)
    assert res.worst_case.value == brute_force_value(desc, cap)


@pytest.mark.parametrize(
    "kind,n,m",
    [("directed-chains", 5, None), ("rooted-trees", 4, None), ("undirected-chains", 5, None),
     ("rooted-trees-leaves", 4, 2)],
)
def test_canonicalization_preserves_value(kind, n, m):
    desc = describe(kind, n, m)
    plain = worst_case_time(desc)
    canon = worst_case_time(desc, canonicalize=True)
    assert plain.worst_case == canon.worst_case
    assert canon.canonicalization
    assert canon.explored_states <= plain.explored_states


@pytest.mark.parametrize("kind,n", [("directed-chains", 5), ("rooted-trees", 4), ("undirected-chains", 6)])
def test_certificate_replays_and_stays_in_class(kind, n):
    res = worst_case_time(describe(kind, n))
    assert replay(res) == res.worst_case
    assert all(contains(res.descriptor, g) for g in res.certificate.rounds)
    assert len(res.certificate) == res.worst_case.value


def test_results_are_deterministic():
    desc = describe("rooted-trees", 4)
    assert worst_case_time(desc).to_dict() == worst_case_time(desc).to_dict()


def test_infinite_class_gets_periodic_certificate():
    g = make_graph(4, [(1, 2), (3, 4)], undirected=True)
    h = make_graph(4, [(1, 2), (2, 3), (3, 4)], undirected=True)
    desc = GraphClassDescriptor(ClassKind.EXPLICIT_LIST, 4, graphs=(h, g))
    res = worst_case_time(desc, cap=20)
    assert not res.worst_case.is_finite and res.worst_case.horizon == 20
    assert res.certificate.is_infinite
    assert not replay(res).is_finite


def test_cap_below_value_reports_infinite():
    res = worst_case_time(describe("directed-chains", 5), cap=2)
    assert res.worst_case == RoundCount.infinite(2)
    assert len(res.certificate) == 2


def test_resolve_cap():
    desc = describe("rooted-trees", 5)
    assert resolve_cap(desc, None) == 16
    assert resolve_cap(desc, "nlogn") == nlogn_cap(5) == 5 + 3 + 2 + 2 + 1
    assert resolve_cap(desc, "7") == 7
    with pytest.raises(ValidationError):
        resolve_cap(desc, 0)
    assert resolve_cap(describe("rooted-trees", 1), None) == 1


def test_explicit_asymmetric_class_disables_canonicalization():
    desc = GraphClassDescriptor(ClassKind.EXPLICIT_LIST, 3, graphs=(directed_path([1, 2, 3]),))
    res = worst_case_time(desc, canonicalize=True)
    assert not res.canonicalization
    assert res.worst_case.value == 2


# -- greedy -------------------------------------------------------------------


@pytest.mark.parametrize("heuristic", ["min-max-set-growth", "min-total-growth", "random-restart"])
def test_greedy_is_a_certified_lower_bound(heuristic):
    desc = describe("rooted-trees", 5)
    exact = worst_case_time(desc, canonicalize=True).worst_case.value
    res = greedy_adversary(desc, heuristic, seed=3)
    assert not res.exact
    assert replay(res) == res.worst_case
    assert 1 <= res.worst_case.value <= exact


def test_greedy_is_deterministic_per_seed():
    desc = describe("rooted-trees", 8)
    a = greedy_adversary(desc, "random-restart", seed=11, restarts=3)
    b = greedy_adversary(desc, "random-restart", seed=11, restarts=3)
    assert a.to_dict() == b.to_dict()


def test_greedy_warm_start_reaches_exact_value():
    desc = describe("rooted-trees", 5)
    exact = worst_case_time(desc)
    res = greedy_adversary(desc, warm_start=exact.certificate)
    assert res.worst_case == exact.worst_case


def test_greedy_rejects_unknown_heuristic():
    with pytest.raises(ValidationError):
        greedy_adversary(describe("star", 3), "clever")


# -- bound formulas ------------------------------------------------------------


def test_bound_formula_values():
    assert bound_for(describe("rooted-trees-leaves", 4, 2), "k-leaves") == 5
    assert bound_for(describe("rooted-trees-leaves", 2, 1), "k-leaves") is None
    assert bound_for(describe("directed-chains", 6), "chain") == 5
    assert bound_for(describe("undirected-chains", 6), "undirected-chain") == 3
    assert bound_for(describe("undirected-chains", 5), "undirected-chain") == 2
    assert bound_for(describe("directed-chains", 5), "inner-nodes") == 10
    assert bound_for(describe("star", 6), "inner-nodes") == 1
    assert set(BOUND_FORMULAS) >= {"nlogn", "pigeonhole", "k-leaves", "chain", "inner-nodes"}
    with pytest.raises(ValidationError):
        bound_for(describe("star", 3), "nope")


def test_lower_bound_value():
    assert [lower_bound_value(n) for n in (2, 3, 4, 5, 6, 7, 10)] == [1, 2, 4, 5, 7, 8, 13]


@pytest.mark.parametrize("n", range(2, 6))
def test_chain_bound_is_tight(n):
    rep = verify_upper_bound(describe("directed-chains", n), "chain")
    assert rep.passed and rep.tight


@pytest.mark.parametrize("m", [1, 2, 3])
def test_inner_nodes_bound_n4(m):
    rep = verify_upper_bound(describe("rooted-trees-leaves", 4, m), "inner-nodes")
    assert rep.passed
    assert rep.to_dict()["passed"] is True
