import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dissem.coverings import (
    Covering,
    CoveringSequence,
    StrictCovering,
    check_lemma2,
    covering_at,
    is_covering,
    is_strict,
    is_strict_by_removal,
    random_covering_sequence,
    reduce_to_strict,
    strict_covering_sequence,
    unique_nodes,
)
from dissem.dissemination import InfluenceState, run
from dissem.errors import ValidationError
from dissem.graphs import GraphSequence, describe, directed_path, make_graph, sample_class


def state_of(sets, r=0):
    return InfluenceState.from_sets(sets, r)


def test_is_covering_accepts_sets_and_masks():
    assert is_covering([{1, 2}, {3}], 3)
    assert is_covering([0b011, 0b100], 3)
    assert not is_covering([{1}, {3}], 3)


def test_unique_nodes_example():
    s = state_of([{1, 2}, {2, 3}, {3, 4}, {4}])
    c = covering_at(s, [1, 2, 3, 4])
    assert unique_nodes(c) == {1: {1}, 2: set(), 3: set(), 4: set()}
    assert not is_strict(c)


def test_covering_requires_coverage():
    with pytest.raises(ValidationError):
        covering_at(state_of([{1}, {2}, {3}]), [1, 2])
    with pytest.raises(ValidationError):
        covering_at(state_of([{1}, {2}]), [])


def test_reduce_removes_smallest_index_first():
    s = state_of([{1, 2, 3}, {2}, {1, 2, 3}])
    red = reduce_to_strict(covering_at(s, [1, 2, 3]))
    assert red.index_set == {3}
    assert [p for p, _, _ in red.removals] == [1, 2]
    assert isinstance(red, StrictCovering)


@st.composite
def set_families(draw):
    n = draw(st.integers(1, 7))
    k = draw(st.integers(1, 6))
    masks = [draw(st.integers(1, (1 << n) - 1)) for _ in range(k)]
    # force coverage through the last member
    union = 0
    for m in masks:
        union |= m
    masks.append(((1 << n) - 1) & ~union or 1)
    return n, masks


def _covering(n, masks):
    # plain set families; members need not contain their own index
    return Covering(n, frozenset(range(1, len(masks) + 1)), 0, 0, dict(enumerate(masks, 1)))


@given(set_families())
def test_strict_iff_every_member_has_unique_node(fam):
    c = _covering(*fam)
    assert is_strict(c) == is_strict_by_removal(c)


@given(set_families())
def test_reduction_yields_strict_subcovering(fam):
    c = _covering(*fam)
    red = reduce_to_strict(c)
    assert red.index_set <= c.index_set
    assert is_strict_by_removal(red)
    assert all(gain <= size for _, gain, size in red.removals)


def test_strictness_brute_force_small():
    # every family of subsets of {1,2,3} with 2 or 3 members
    subsets = list(range(1, 8))
    for k in (2, 3):
        for fam in itertools.combinations(subsets, k):
            if not is_covering(fam, 3):
                continue
            c = _covering(3, list(fam))
            minimal = all(not is_covering(fam[:i] + fam[i + 1:], 3) for i in range(k))
            assert is_strict(c) == minimal


def test_covering_sequence_validates_shape():
    s0 = state_of([{1}, {2}])
    s1 = state_of([{1, 2}, {2}], 1)
    a = covering_at(s0, [1, 2])
    b = covering_at(s1, [1], t=0)
    CoveringSequence((a, b))
    with pytest.raises(ValidationError):
        CoveringSequence((b, a))


def _random_rooted_trace(seed, n):
    rng = random.Random(seed)
    desc = describe("rooted-trees", n)
    seq = GraphSequence(n, tuple(sample_class(desc, rng) for _ in range(n * n)))
    return run(seq, n * n)


@pytest.mark.parametrize("seed", range(40))
def test_covering_properties_hold_on_random_traces(seed):
    n = 2 + seed % 7
    trace = _random_rooted_trace(seed, n)
    for cs in (strict_covering_sequence(trace), random_covering_sequence(trace, random.Random(seed))):
        report = check_lemma2(trace, cs)
        assert report.passed, report.failures
        assert {"i", "iii"} <= set(report.counts())


def test_covering_properties_on_constant_chain():
    trace = run(GraphSequence.constant(directed_path([1, 2, 3, 4, 5])))
    report = check_lemma2(trace, strict_covering_sequence(trace))
    assert report.passed
    assert report.counts()["vi"] == 2


def test_covering_check_rejects_non_tree_rounds():
    seq = GraphSequence.constant(make_graph(3, [(1, 2), (2, 3)], undirected=True))
    trace = run(seq, 3)
    with pytest.raises(ValidationError):
        check_lemma2(trace, strict_covering_sequence(trace))


def test_covering_check_rejects_mismatched_coverings():
    trace = run(GraphSequence.constant(directed_path([1, 2, 3])))
    cs = strict_covering_sequence(trace, start=1)
    assert check_lemma2(trace, cs).passed
    other = run(GraphSequence.constant(directed_path([3, 2, 1])))
    with pytest.raises(ValidationError):
        check_lemma2(other, cs)


def test_property_report_json():
    trace = run(GraphSequence.constant(directed_path([1, 2, 3])))
    d = check_lemma2(trace, strict_covering_sequence(trace)).to_dict()
    assert d["passed"] is True
    assert all({"round", "property", "passed"} <= set(c) for c in d["checks"])
