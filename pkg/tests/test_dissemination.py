import csv
import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIG1_KNOWLEDGE
from dissem.dissemination import (
    InfluenceState,
    RoundCount,
    dissemination_time,
    dissemination_time_by_knowledge,
    dissemination_time_of_node,
    initial_state,
    knowledge_step,
    node_times,
    pigeonhole_horizon,
    run,
    simulate,
    step,
    trace_to_csv,
    trace_to_dict,
    transpose,
    winners,
)
from dissem.errors import ValidationError
from dissem.graphs import GraphSequence, classify, describe, directed_path, make_graph, sample_class


def naive_knowledge(seq, rounds):
    """Knowledge sets from the message-passing rule, one set per node."""
    n = seq.n
    k = [{p} for p in range(1, n + 1)]
    out = [[set(s) for s in k]]
    for r in range(1, rounds + 1):
        g = seq.graph_at(r)
        k = [k[p - 1] | set().union(*(k[q - 1] for q, v in g.edges if v == p)) for p in range(1, n + 1)]
        out.append([set(s) for s in k])
    return out


def test_fig1_knowledge_sets(fig1):
    trace = run(fig1, horizon=3)
    for r, expected in FIG1_KNOWLEDGE.items():
        s = trace.states[r]
        for p, digits in expected.items():
            assert s.knowledge(p) == {int(c) for c in digits}, (r, p)


def test_fig1_times(fig1):
    trace = run(fig1, horizon=3)
    assert dissemination_time(trace) == RoundCount(3)
    assert winners(trace) == {3, 5}
    times = node_times(trace)
    assert times[3] == times[5] == RoundCount(3)
    for p in (1, 2, 4):
        assert not times[p].is_finite
        assert times[p].horizon == 3


def test_fig1_intermediate_rounds_not_terminal(fig1):
    trace = run(fig1, horizon=3)
    assert not trace.states[1].is_terminal and not trace.states[2].is_terminal


def test_single_node_disseminates_at_round_zero():
    seq = GraphSequence(1, (make_graph(1, []),))
    assert simulate(seq) == RoundCount(0)
    assert pigeonhole_horizon(1) == 0


@pytest.mark.parametrize("n", range(2, 9))
def test_constant_chain_takes_n_minus_1(n):
    seq = GraphSequence.constant(directed_path(range(1, n + 1)))
    trace = run(seq)
    assert dissemination_time(trace) == RoundCount(n - 1)
    assert dissemination_time_of_node(trace, 1) == RoundCount(n - 1)
    assert winners(trace) == {1}


def test_disconnected_never_disseminates():
    seq = GraphSequence.constant(make_graph(4, [(1, 2), (3, 4)], undirected=True))
    b = simulate(seq, horizon=50)
    assert not b.is_finite and b.horizon == 50
    assert str(b) == ">= 51"
    with pytest.raises(ValidationError):
        run(seq)  # no default horizon for graphs that are not rooted trees


def test_round_count_json_roundtrip():
    for rc in (RoundCount(4), RoundCount.infinite(9)):
        assert RoundCount.from_json(rc.to_json()) == rc


def test_state_rejects_missing_self():
    with pytest.raises(ValidationError):
        InfluenceState(2, (0b10, 0b10))
    with pytest.raises(ValidationError):
        initial_state(0)


def test_step_rejects_size_mismatch():
    with pytest.raises(ValidationError):
        step(initial_state(3), directed_path([1, 2]))


@st.composite
def rooted_sequences(draw, n_max=7, rounds_max=12):
    n = draw(st.integers(1, n_max))
    desc = describe("rooted-trees", n)
    seeds = draw(st.lists(st.integers(0, 2**32), min_size=1, max_size=rounds_max))
    return GraphSequence(n, tuple(sample_class(desc, s) for s in seeds))


@st.composite
def arbitrary_sequences(draw, n_max=6, rounds_max=10):
    n = draw(st.integers(1, n_max))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v]
    rounds = []
    for _ in range(draw(st.integers(1, rounds_max))):
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
        rounds.append(make_graph(n, chosen))
    return GraphSequence(n, tuple(rounds))


@given(arbitrary_sequences())
def test_engine_matches_naive_message_passing(seq):
    rounds = len(seq)
    trace = run(seq, rounds, stop_at_termination=False)
    for r, ks in enumerate(naive_knowledge(seq, rounds)):
        assert [trace.states[r].knowledge(p) for p in range(1, seq.n + 1)] == ks


@given(arbitrary_sequences())
def test_duality_between_views(seq):
    s = initial_state(seq.n)
    k = tuple(1 << p for p in range(seq.n))
    for g in seq:
        s, k = step(s, g), knowledge_step(k, g)
        assert transpose(s.masks, seq.n) == k
        assert transpose(k, seq.n) == s.masks


@given(arbitrary_sequences())
def test_sets_only_grow(seq):
    trace = run(seq, len(seq), stop_at_termination=False)
    for a, b in zip(trace.states, trace.states[1:]):
        assert all(x & ~y == 0 for x, y in zip(a.masks, b.masks))


@given(rooted_sequences())
def test_root_holders_grow_and_mass_increases(seq):
    trace = run(seq, len(seq))
    for r in range(1, trace.last_round + 1):
        prev, cur = trace.states[r - 1], trace.states[r]
        if prev.is_terminal:
            break
        root = classify(seq.graph_at(r)).root
        for p in range(1, seq.n + 1):
            if root in prev.influence(p):
                assert len(cur.influence(p)) > len(prev.influence(p))
        assert cur.mass > prev.mass


@given(rooted_sequences(rounds_max=4))
def test_pigeonhole_bound(seq):
    # periodic continuation keeps every round a rooted tree
    periodic = GraphSequence(seq.n, seq.rounds, (1, len(seq)))
    b = simulate(periodic)
    assert b.is_finite and b.value <= pigeonhole_horizon(seq.n)


@given(arbitrary_sequences())
def test_two_characterizations_agree(seq):
    trace = run(seq, len(seq))
    assert dissemination_time(trace) == dissemination_time_by_knowledge(trace)


def test_exports(fig1):
    trace = run(fig1, horizon=3)
    d = trace_to_dict(trace)
    assert d["dissemination_time"] == 3
    assert d["rounds"][0]["influence"] == [[1], [2], [3], [4], [5]]
    rows = list(csv.reader(io.StringIO(trace_to_csv(trace))))
    assert rows[0] == ["round", "max_set_size", "intersection_size"]
    assert rows[-1] == ["3", "5", "2"]
