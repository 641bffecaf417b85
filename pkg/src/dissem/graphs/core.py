"""Per-round communication graphs and finite/periodic graph sequences.

Nodes are labelled ``1..n``.  Node sets are carried around as Python ints
used as bitsets: node ``p`` is bit ``p - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from ..errors import HorizonError, ValidationError


def mask_of(nodes: Iterable[int]) -> int:
    m = 0
    for p in nodes:
        m |= 1 << (p - 1)
    return m


def nodes_of(mask: int) -> list[int]:
    out = []
    p = 1
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class LabeledDigraph:
    """One round's communication graph on nodes ``1..n``.

    Undirected graphs are stored as symmetric digraphs with
    ``undirected=True``.  Instances are immutable; build them with
    :func:`make_graph`, which validates and symmetrizes.
    """

    n: int
    edges: frozenset
    undirected: bool = False

    def __post_init__(self):
        _check_edges(self.n, self.edges)
        if self.undirected:
            for u, v in self.edges:
                if (v, u) not in self.edges:
                    raise ValidationError(f"undirected graph is missing edge ({v}, {u})")

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        """``out_masks[p - 1]`` is the bitset of out-neighbours of ``p``."""
        out = [0] * self.n
        for u, v in self.edges:
            out[u - 1] |= 1 << (v - 1)
        return tuple(out)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        inn = [0] * self.n
        for u, v in self.edges:
            inn[v - 1] |= 1 << (u - 1)
        return tuple(inn)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def advance(self, mask: int) -> int:
        """Return ``mask`` plus every out-neighbour of a node in ``mask``."""
        out = self.out_masks
        result = mask
        i = 0
        while mask:
            if mask & 1:
                result |= out[i]
            mask >>= 1
            i += 1
        return result

    def step_table(self) -> list[int]:
        """``advance`` tabulated over all ``2**n`` node subsets."""
        out = self.out_masks
        table = [0] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = m & -m
            table[m] = table[m ^ low] | low | out[low.bit_length() - 1]
        return table

    def reversed(self) -> "LabeledDigraph":
        return LabeledDigraph(self.n, frozenset((v, u) for u, v in self.edges), self.undirected)

    def relabeled(self, perm: Sequence[int]) -> "LabeledDigraph":
        """Apply ``p -> perm[p - 1]`` to every endpoint."""
        return LabeledDigraph(
            self.n, frozenset((perm[u - 1], perm[v - 1]) for u, v in self.edges), self.undirected
        )

    def __repr__(self):
        arrow = "--" if self.undirected else "->"
        pairs = self.sorted_edges()
        if self.undirected:
            pairs = [(u, v) for u, v in pairs if u < v]
        body = ", ".join(f"{u}{arrow}{v}" for u, v in pairs)
        return f"LabeledDigraph(n={self.n}, [{body}])"


def _check_edges(n, edges):
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    for e in edges:
        u, v = e
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValidationError(f"edge ({u}, {v}) has a node outside 1..{n}")
        if u == v:
            raise ValidationError(f"self-loop at node {u}")


def make_graph(n: int, edges: Iterable[Sequence[int]], undirected: bool = False) -> LabeledDigraph:
    """Build a validated graph.

    Duplicate edges are rejected.  For ``undirected=True`` each pair is an
    unordered edge (listing both ``(u, v)`` and ``(v, u)`` is a duplicate)
    and the stored edge set is symmetrized.
    """
    seen = set()
    pairs = []
    for e in edges:
        if len(e) != 2:
            raise ValidationError(f"edge {e!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        key = (min(u, v), max(u, v)) if undirected else (u, v)
        if key in seen:
            raise ValidationError(f"duplicate edge ({u}, {v})")
        seen.add(key)
        pairs.append((u, v))
    _check_edges(n, pairs)
    if undirected:
        pairs += [(v, u) for u, v in pairs]
    return LabeledDigraph(n, frozenset(pairs), undirected)


def empty_graph(n: int) -> LabeledDigraph:
    return make_graph(n, [])


def directed_path(order: Sequence[int]) -> LabeledDigraph:
    """Directed chain visiting ``order`` from first (root) to last (leaf)."""
    return make_graph(len(order), list(zip(order, order[1:])))


def undirected_path(order: Sequence[int]) -> LabeledDigraph:
    return make_graph(len(order), list(zip(order, order[1:])), undirected=True)


def star(n: int, center: int) -> LabeledDigraph:
    return make_graph(n, [(center, v) for v in range(1, n + 1) if v != center])


@dataclass(frozen=True)
class ClassificationReport:
    is_rooted_tree: bool
    root: Optional[int]
    leaf_count: Optional[int]
    is_directed_chain: bool
    is_undirected_chain: bool
    is_undirected_connected: bool


def classify(g: LabeledDigraph) -> ClassificationReport:
    n = g.n
    indeg = [0] * n
    outdeg = [0] * n
    for u, v in g.edges:
        outdeg[u - 1] += 1
        indeg[v - 1] += 1

    root = None
    is_tree = False
    if len(g.edges) == n - 1:
        roots = [p for p in range(1, n + 1) if indeg[p - 1] == 0]
        if len(roots) == 1 and all(d <= 1 for d in indeg):
            reach = _reach(g.out_masks, roots[0])
            is_tree = reach == full_mask(n)
            if is_tree:
                root = roots[0]
    leaves = sum(1 for d in outdeg if d == 0) if is_tree else None

    sym = [a | b for a, b in zip(g.out_masks, g.in_masks)]
    connected = _reach(sym, 1) == full_mask(n)
    symmetric = all((v, u) in g.edges for u, v in g.edges)
    undirected_chain = (
        symmetric
        and connected
        and len(g.edges) == 2 * (n - 1)
        and all(bin(m).count("1") <= 2 for m in sym)
    )
    return ClassificationReport(
        is_rooted_tree=is_tree,
        root=root,
        leaf_count=leaves,
        is_directed_chain=is_tree and leaves == 1,
        is_undirected_chain=undirected_chain,
        is_undirected_connected=connected,
    )


def _reach(adj_masks, start):
    seen = 1 << (start - 1)
    frontier = seen
    while frontier:
        nxt = 0
        i = 0
        f = frontier
        while f:
            if f & 1:
                nxt |= adj_masks[i]
            f >>= 1
            i += 1
        frontier = nxt & ~seen
        seen |= nxt
    return seen


@dataclass(frozen=True)
class GraphSequence:
    """Rounds ``G_1, G_2, ...`` with an optional periodic suffix.

    ``repeat=(r1, r2)`` means that once the listed rounds run out the
    sequence continues with rounds ``r1..r2`` over and over.
    """

    n: int
    rounds: tuple = ()
    repeat: Optional[tuple[int, int]] = None

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(self.rounds))
        for i, g in enumerate(self.rounds, 1):
            if not isinstance(g, LabeledDigraph):
                raise ValidationError(f"round {i} is not a LabeledDigraph")
            if g.n != self.n:
                raise ValidationError(f"round {i} has n={g.n}, sequence has n={self.n}")
        if self.repeat is not None:
            r1, r2 = self.repeat
            if not (1 <= r1 <= r2 <= len(self.rounds)):
                raise ValidationError(
                    f"repeat range {r1}..{r2} is not inside rounds 1..{len(self.rounds)}"
                )
            object.__setattr__(self, "repeat", (int(r1), int(r2)))

    @property
    def is_infinite(self) -> bool:
        return self.repeat is not None

    def __len__(self):
        return len(self.rounds)

    def graph_at(self, r: int) -> LabeledDigraph:
        """The graph of round ``r`` (1-based)."""
        if r < 1:
            raise ValidationError(f"rounds are numbered from 1, got {r}")
        if r <= len(self.rounds):
            return self.rounds[r - 1]
        if self.repeat is None:
            raise HorizonError(
                f"sequence has {len(self.rounds)} rounds and no repeat rule; round {r} requested"
            )
        r1, r2 = self.repeat
        period = r2 - r1 + 1
        return self.rounds[r1 - 1 + (r - len(self.rounds) - 1) % period]

    def prefix(self, i: int) -> "GraphSequence":
        return GraphSequence(self.n, tuple(self.graph_at(r) for r in range(1, i + 1)))

    def __iter__(self) -> Iterator[LabeledDigraph]:
        r = 1
        while r <= len(self.rounds) or self.repeat is not None:
            yield self.graph_at(r)
            r += 1

    @classmethod
    def constant(cls, g: LabeledDigraph) -> "GraphSequence":
        return cls(g.n, (g,), (1, 1))
