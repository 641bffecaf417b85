"""Graph classes: descriptors, exhaustive enumeration, counting, sampling."""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Union

from ..errors import CapacityError, ValidationError
from .core import LabeledDigraph, classify, directed_path, make_graph, star, undirected_path

#: Largest class that :func:`enumerate_class` will stream.  Rooted trees
#: fit up to n = 6 (7776 graphs), directed chains up to n = 8.
MAX_ENUMERATION = 50_000


class ClassKind(str, enum.Enum):
    ROOTED_TREES = "rooted-trees"
    ROOTED_TREES_WITH_LEAVES = "rooted-trees-leaves"
    DIRECTED_CHAINS = "directed-chains"
    UNDIRECTED_CHAINS = "undirected-chains"
    STAR = "star"
    EXPLICIT_LIST = "explicit"


_ALIASES = {
    "trees": ClassKind.ROOTED_TREES,
    "rooted-trees": ClassKind.ROOTED_TREES,
    "leaves": ClassKind.ROOTED_TREES_WITH_LEAVES,
    "rooted-trees-leaves": ClassKind.ROOTED_TREES_WITH_LEAVES,
    "k-leaves": ClassKind.ROOTED_TREES_WITH_LEAVES,
    "chains": ClassKind.DIRECTED_CHAINS,
    "directed-chains": ClassKind.DIRECTED_CHAINS,
    "undirected-chains": ClassKind.UNDIRECTED_CHAINS,
    "uchains": ClassKind.UNDIRECTED_CHAINS,
    "star": ClassKind.STAR,
    "stars": ClassKind.STAR,
    "explicit": ClassKind.EXPLICIT_LIST,
}

# kinds whose members are all rooted trees
ROOTED_KINDS = frozenset(
    {ClassKind.ROOTED_TREES, ClassKind.ROOTED_TREES_WITH_LEAVES, ClassKind.DIRECTED_CHAINS, ClassKind.STAR}
)


def parse_kind(name: Union[str, ClassKind]) -> ClassKind:
    if isinstance(name, ClassKind):
        return name
    try:
        return _ALIASES[name.strip().lower().replace("_", "-")]
    except KeyError:
        raise ValidationError(f"unknown graph class {name!r}") from None


@dataclass(frozen=True)
class GraphClassDescriptor:
    """A named graph class on ``n`` nodes.

    ``m`` is the leaf count for ``ROOTED_TREES_WITH_LEAVES``.  For
    ``EXPLICIT_LIST`` the members are given in ``graphs``; ``claimed`` names a
    built-in kind every member must belong to, and ``symmetric`` declares the
    list closed under relabeling (which permits canonicalized search).
    """

    kind: ClassKind
    n: int
    m: Optional[int] = None
    graphs: tuple = ()
    claimed: Optional[ClassKind] = None
    symmetric: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", parse_kind(self.kind))
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        if self.kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
            if self.m is None or not 1 <= self.m <= self.n - 1:
                raise ValidationError(f"leaf count m must lie in 1..{self.n - 1}, got {self.m!r}")
        elif self.kind is not ClassKind.EXPLICIT_LIST and self.m is not None:
            raise ValidationError(f"{self.kind.value} takes no leaf parameter")
        if self.kind is ClassKind.EXPLICIT_LIST:
            graphs = tuple(self.graphs)
            object.__setattr__(self, "graphs", graphs)
            if not graphs:
                raise ValidationError("explicit class needs at least one graph")
            claimed = parse_kind(self.claimed) if self.claimed is not None else None
            object.__setattr__(self, "claimed", claimed)
            if len(set(graphs)) != len(graphs):
                raise ValidationError("explicit class lists a graph twice")
            for g in graphs:
                if g.n != self.n:
                    raise ValidationError(f"explicit member has n={g.n}, class has n={self.n}")
                if claimed is not None and not is_member(g, claimed, self.m):
                    raise ValidationError(f"{g!r} is not in class {claimed.value}")

    @property
    def name(self) -> str:
        if self.kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
            return f"{self.kind.value}(m={self.m})"
        return self.kind.value

    @property
    def all_rooted(self) -> bool:
        """True when every member is a rooted tree."""
        if self.kind in ROOTED_KINDS:
            return True
        if self.kind is ClassKind.EXPLICIT_LIST:
            if self.claimed in ROOTED_KINDS:
                return True
            return all(classify(g).is_rooted_tree for g in self.graphs)
        return False

    @property
    def label_symmetric(self) -> bool:
        return self.kind is not ClassKind.EXPLICIT_LIST or self.symmetric

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "n": self.n}
        if self.m is not None:
            d["m"] = self.m
        if self.kind is ClassKind.EXPLICIT_LIST:
            d["claimed"] = self.claimed.value if self.claimed else None
            d["symmetric"] = self.symmetric
            d["count"] = len(self.graphs)
        return d


def describe(kind, n: int, m: Optional[int] = None) -> GraphClassDescriptor:
    return GraphClassDescriptor(parse_kind(kind), n, m)


def is_member(g: LabeledDigraph, kind: ClassKind, m: Optional[int] = None) -> bool:
    rep = classify(g)
    if kind is ClassKind.ROOTED_TREES:
        return rep.is_rooted_tree
    if kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
        return rep.is_rooted_tree and (m is None or rep.leaf_count == m)
    if kind is ClassKind.DIRECTED_CHAINS:
        return rep.is_directed_chain
    if kind is ClassKind.UNDIRECTED_CHAINS:
        return rep.is_undirected_chain
    if kind is ClassKind.STAR:
        return rep.is_rooted_tree and rep.leaf_count == max(g.n - 1, 0)
    return True


def contains(desc: GraphClassDescriptor, g: LabeledDigraph) -> bool:
    if g.n != desc.n:
        return False
    if desc.kind is ClassKind.EXPLICIT_LIST:
        return g in desc.graphs
    return is_member(g, desc.kind, desc.m)


# -- encodings ---------------------------------------------------------------


def prufer_decode(code, n: int) -> list[tuple[int, int]]:
    """Undirected edges of the labeled tree with Prüfer code ``code``."""
    if n == 1:
        return []
    if len(code) != n - 2:
        raise ValidationError(f"Prüfer code for n={n} must have length {n - 2}")
    degree = [1] * (n + 1)
    for c in code:
        degree[c] += 1
    edges = []
    for c in code:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((leaf, c))
        degree[leaf] -= 1
        degree[c] -= 1
    u, w = (v for v in range(1, n + 1) if degree[v] == 1)
    edges.append((u, w))
    return edges


def orient_from(n: int, undirected_edges, root: int) -> LabeledDigraph:
    adj = {v: [] for v in range(1, n + 1)}
    for u, w in undirected_edges:
        adj[u].append(w)
        adj[w].append(u)
    arcs = []
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                arcs.append((u, w))
                stack.append(w)
    return make_graph(n, arcs)


def rooted_code_decode(code, n: int) -> LabeledDigraph:
    """Decode a length ``n - 1`` parent code into a rooted tree.

    Repeatedly the smallest node that no longer occurs in the rest of the code
    (and is not yet placed) becomes a child of the current code entry.  The
    last entry is the root and the set of entries is the set of inner nodes,
    so trees with ``m`` leaves are exactly the codes using ``n - m`` distinct
    values.
    """
    if n == 1:
        return make_graph(1, [])
    if len(code) != n - 1:
        raise ValidationError(f"rooted code for n={n} must have length {n - 1}")
    remaining = [0] * (n + 1)
    for c in code:
        remaining[c] += 1
    placed = [False] * (n + 1)
    arcs = []
    for c in code:
        child = next(v for v in range(1, n + 1) if not placed[v] and remaining[v] == 0)
        placed[child] = True
        arcs.append((c, child))
        remaining[c] -= 1
    return make_graph(n, arcs)


# -- enumeration -------------------------------------------------------------


@lru_cache(maxsize=None)
def stirling2(a: int, k: int) -> int:
    if a == k:
        return 1
    if k == 0 or k > a:
        return 0
    return k * stirling2(a - 1, k) + stirling2(a - 1, k - 1)


def count_class(desc: GraphClassDescriptor) -> int:
    """Number of labeled graphs in the class (closed forms, any ``n``)."""
    n = desc.n
    kind = desc.kind
    if kind is ClassKind.ROOTED_TREES:
        return n ** (n - 1)
    if kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
        m = desc.m
        return math.factorial(n) // math.factorial(m) * stirling2(n - 1, n - m)
    if kind is ClassKind.DIRECTED_CHAINS:
        return math.factorial(n)
    if kind is ClassKind.UNDIRECTED_CHAINS:
        return 1 if n == 1 else math.factorial(n) // 2
    if kind is ClassKind.STAR:
        return n
    return len(desc.graphs)


def enumerate_class(desc: GraphClassDescriptor, limit: int = MAX_ENUMERATION) -> Iterator[LabeledDigraph]:
    """Stream every graph of the class once, in a fixed order.

    Rooted trees come in lexicographic (Prüfer code, root) order; chains in
    lexicographic permutation order (undirected chains keep the orientation
    whose first node is smaller than its last).
    """
    size = count_class(desc)
    if size > limit:
        raise CapacityError(
            f"{desc.name} on n={desc.n} has {size} graphs; enumeration is capped at {limit}"
        )
    return _stream(desc)


def _stream(desc):
    n = desc.n
    kind = desc.kind
    if kind is ClassKind.EXPLICIT_LIST:
        yield from desc.graphs
    elif kind in (ClassKind.ROOTED_TREES, ClassKind.ROOTED_TREES_WITH_LEAVES):
        if n == 1:
            if kind is ClassKind.ROOTED_TREES:
                yield make_graph(1, [])
            return
        for code in itertools.product(range(1, n + 1), repeat=n - 2):
            tree = prufer_decode(code, n)
            for root in range(1, n + 1):
                g = orient_from(n, tree, root)
                if kind is ClassKind.ROOTED_TREES or classify(g).leaf_count == desc.m:
                    yield g
    elif kind is ClassKind.DIRECTED_CHAINS:
        for perm in itertools.permutations(range(1, n + 1)):
            yield directed_path(perm)
    elif kind is ClassKind.UNDIRECTED_CHAINS:
        for perm in itertools.permutations(range(1, n + 1)):
            if perm[0] <= perm[-1]:
                yield undirected_path(perm)
    elif kind is ClassKind.STAR:
        for c in range(1, n + 1):
            yield star(n, c)


# -- sampling ----------------------------------------------------------------


def _as_rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(int(seed))


def _uniform_partition(a: int, k: int, rng: random.Random) -> list[int]:
    """Uniform set partition of ``0..a-1`` into exactly ``k`` blocks.

    Returns the block index of every element.  Element ``a - 1`` either
    opens a new block (weight S(a-1, k-1)) or joins one of ``k`` blocks
    (weight k * S(a-1, k)).
    """
    labels = [0] * a
    blocks = k
    for x in range(a - 1, -1, -1):
        total = stirling2(x + 1, blocks)
        if rng.randrange(total) < stirling2(x, blocks - 1):
            blocks -= 1
            labels[x] = -1 - blocks  # singleton opener, fixed below
        else:
            labels[x] = rng.randrange(blocks)
    # openers carry -(index+1); their block id is that index
    return [(-lab - 1) if lab < 0 else lab for lab in labels]


def _sample_leaves(n: int, m: int, rng: random.Random) -> LabeledDigraph:
    inner = rng.sample(range(1, n + 1), n - m)
    blocks = _uniform_partition(n - 1, n - m, rng)
    return rooted_code_decode([inner[b] for b in blocks], n)


def sample_class(desc: GraphClassDescriptor, seed) -> LabeledDigraph:
    """Draw one member; a deterministic function of ``(desc, seed)``.

    Rooted trees, m-leaf trees, chains and stars are sampled uniformly.
    """
    rng = _as_rng(seed)
    n = desc.n
    kind = desc.kind
    if kind is ClassKind.EXPLICIT_LIST:
        return desc.graphs[rng.randrange(len(desc.graphs))]
    if kind is ClassKind.ROOTED_TREES:
        if n == 1:
            return make_graph(1, [])
        code = [rng.randint(1, n) for _ in range(n - 2)]
        root = rng.randint(1, n)
        return orient_from(n, prufer_decode(code, n), root)
    if kind is ClassKind.ROOTED_TREES_WITH_LEAVES:
        return _sample_leaves(n, desc.m, rng)
    if kind is ClassKind.STAR:
        return star(n, rng.randint(1, n))
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    if kind is ClassKind.DIRECTED_CHAINS:
        return directed_path(perm)
    if perm[0] > perm[-1]:
        perm.reverse()
    return undirected_path(perm)
