"""Randomized property checks over many simulated traces.

Each check takes a seeded random trace and returns the list of violations it
found (empty when the property holds).  :func:`run_suite` drives every check
over a fixed number of traces and is what the ``properties`` command and the
acceptance tests call.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _rng
from .constructions import chain_collection_invariant, undirected_chain_invariant, WitnessError
from .coverings import check_lemma2, random_covering_sequence, strict_covering_sequence
from .dissemination import (
    dissemination_time,
    dissemination_time_by_knowledge,
    dissemination_time_of_node,
    initial_state,
    knowledge_step,
    pigeonhole_horizon,
    run,
    step,
    transpose,
)
from .graphs import GraphSequence, classify, describe, full_mask, make_graph, sample_class

PROPERTIES = (
    "lemma1",
    "duality",
    "monotonicity",
    "mass-growth",
    "pigeonhole",
    "lemma2",
    "chain-witness",
    "undirected-witness",
)


def random_sequence(kind, n, rounds, rng, m=None) -> GraphSequence:
    desc = describe(kind, n, m)
    return GraphSequence(n, tuple(sample_class(desc, rng) for _ in range(rounds)))


def random_digraph(n, rng, density=0.3):
    edges = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if u != v and rng.random() < density]
    return make_graph(n, edges)


def _rooted_trace(rng, n_max, stop=True):
    n = rng.randint(1, n_max)
    horizon = pigeonhole_horizon(n)
    seq = random_sequence("rooted-trees", n, horizon, rng)
    return run(seq, horizon, stop_at_termination=stop)


def check_lemma1(trace) -> list[str]:
    """Initial state, update rule (set form), max-size characterization,
    monotonicity and root growth."""
    bad = []
    n = trace.n
    full = full_mask(n)
    s0 = trace.states[0]
    if s0.sets != tuple(frozenset({p}) for p in range(1, n + 1)):
        bad.append("(i) initial sets are not singletons")
    for r in range(1, trace.last_round + 1):
        g = trace.graph(r)
        prev, cur = trace.states[r - 1], trace.states[r]
        for p in range(1, n + 1):
            sp = prev.influence(p)
            expect = set(sp) | {v for (u, v) in g.edges if u in sp}
            if cur.influence(p) != expect:
                bad.append(f"(ii) S_{p}({r}) differs from the update rule")
            if not sp <= cur.influence(p):
                bad.append(f"(iv) S_{p} shrank in round {r}")
        rep = classify(g)
        if rep.is_rooted_tree:
            root_bit = 1 << (rep.root - 1)
            for q, m in enumerate(prev.masks, 1):
                if m & root_bit and m != full and cur.masks[q - 1] == m:
                    bad.append(f"(v) S_{q} holds root {rep.root} of round {r} but did not grow")
    b1 = dissemination_time(trace)
    if b1 != dissemination_time_by_knowledge(trace):
        bad.append("(iii) the two dissemination-time characterizations disagree")
    per_node = [dissemination_time_of_node(trace, p) for p in range(1, n + 1)]
    finite = [t.value for t in per_node if t.is_finite]
    if b1.is_finite and (not finite or min(finite) != b1.value):
        bad.append("B is not the minimum of the per-node times")
    return bad


def check_duality(seq, rounds) -> list[str]:
    """Evolve influence and knowledge sets separately and compare."""
    n = seq.n
    s = initial_state(n)
    k = tuple(1 << p for p in range(n))
    bad = []
    for r in range(1, rounds + 1):
        g = seq.graph_at(r)
        s = step(s, g)
        k = knowledge_step(k, g)
        if transpose(s.masks, n) != k:
            bad.append(f"knowledge and influence views differ after round {r}")
            break
    return bad


def check_monotone_and_mass(trace) -> tuple[list[str], list[str]]:
    mono, mass = [], []
    for r in range(1, trace.last_round + 1):
        prev, cur = trace.states[r - 1], trace.states[r]
        if any(a & ~b for a, b in zip(prev.masks, cur.masks)):
            mono.append(f"an influence set shrank in round {r}")
        if not prev.is_terminal and classify(trace.graph(r)).is_rooted_tree and cur.mass <= prev.mass:
            mass.append(f"total influence did not grow in round {r}")
    return mono, mass


@dataclass
class SuiteResult:
    traces: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def record(self, prop, bad):
        self.traces[prop] = self.traces.get(prop, 0) + 1
        if bad:
            self.failures.setdefault(prop, []).extend(bad[:3])

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "properties": {
                p: {"traces": self.traces.get(p, 0), "failures": self.failures.get(p, [])[:5]}
                for p in PROPERTIES
                if p in self.traces
            },
        }


def run_suite(seed: int = 0, traces: int = 1000, n_max: int = 8, only=None) -> SuiteResult:
    """Run every property on ``traces`` independent random traces each."""
    selected = set(only or PROPERTIES)
    out = SuiteResult()
    for t in range(traces):
        if selected & {"lemma1", "monotonicity", "mass-growth", "pigeonhole"}:
            rng = _rng.spawn(seed, 1, t)
            trace = _rooted_trace(rng, n_max)
            if "lemma1" in selected:
                out.record("lemma1", check_lemma1(trace))
            mono, mass = check_monotone_and_mass(trace)
            if "monotonicity" in selected:
                out.record("monotonicity", mono)
            if "mass-growth" in selected:
                out.record("mass-growth", mass)
            if "pigeonhole" in selected:
                b = dissemination_time(trace)
                ok = b.is_finite and b.value <= pigeonhole_horizon(trace.n)
                out.record("pigeonhole", [] if ok else [f"B = {b} exceeds n(n-2)+1 for n={trace.n}"])
        if "duality" in selected:
            rng = _rng.spawn(seed, 2, t)
            n = rng.randint(1, n_max)
            seq = GraphSequence(n, tuple(random_digraph(n, rng, rng.choice((0.1, 0.2, 0.4))) for _ in range(100)))
            out.record("duality", check_duality(seq, 100))
        if "lemma2" in selected:
            rng = _rng.spawn(seed, 3, t)
            trace = _rooted_trace(rng, n_max)
            bad = [f"{c.prop} at r={c.round}: {c.detail}" for c in check_lemma2(trace, strict_covering_sequence(trace)).failures]
            report = check_lemma2(trace, random_covering_sequence(trace, rng))
            bad += [f"{c.prop} at r={c.round}: {c.detail}" for c in report.failures]
            out.record("lemma2", bad)
        if "chain-witness" in selected:
            rng = _rng.spawn(seed, 4, t)
            n = rng.randint(1, n_max)
            trace = run(random_sequence("directed-chains", n, max(n - 1, 0), rng), max(n - 1, 0), stop_at_termination=False)
            out.record("chain-witness", _witness_failures(chain_collection_invariant, trace, n - 1))
        if "undirected-witness" in selected:
            rng = _rng.spawn(seed, 5, t)
            n = rng.randint(1, max(n_max, 9))
            rounds = (n - 1) // 2
            trace = run(random_sequence("undirected-chains", n, rounds, rng), rounds, stop_at_termination=False)
            bad = _witness_failures(undirected_chain_invariant, trace, rounds)
            out.record("undirected-witness", bad)
    return out


def _witness_failures(builder, trace, last) -> list[str]:
    try:
        witnesses = builder(trace)
    except WitnessError as exc:
        return [str(exc)]
    bad = [f"witness at r={w.round} violates the union inequality" for w in witnesses if not w.valid]
    if len(witnesses) != last + 1:
        bad.append(f"expected witnesses for rounds 0..{last}, got {len(witnesses)}")
    return bad
