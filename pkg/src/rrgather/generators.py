"""Constructors for the graph families used as the test corpus.

Random constructors take an explicit integer seed and draw from
``random.Random`` (Mersenne Twister, named ``RNG_NAME`` in manifests), so the
same seed always yields the same graph.
"""

from __future__ import annotations

import random
from typing import Callable, Sequence

from .canon import is_isomorphic, is_vertex_transitive
from .graph import Graph, GraphError, is_connected

RNG_NAME = "python-random-mt19937/v1"


def _graph(n: int, edges, *, connected: bool = True) -> Graph:
    return Graph.from_edges(n, sorted({(min(u, v), max(u, v)) for u, v in edges}), connected=connected)


def empty(n: int) -> Graph:
    """``n K_1``: ``n`` isolated vertices (allowed as a join operand)."""
    if n < 1:
        raise GraphError("empty graph needs n >= 1")
    return _graph(n, [], connected=False)


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    return _graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs n >= 1")
    return _graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return _graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int) -> Graph:
    """``K_{1,leaves}`` with the center at vertex 0."""
    if leaves < 1:
        raise GraphError("star needs at least one leaf")
    return _graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(m: int, n: int) -> Graph:
    """``K_{m,n}``: vertices ``0..m-1`` on one side, ``m..m+n-1`` on the other."""
    if m < 1 or n < 1:
        raise GraphError("complete bipartite graph needs both sides nonempty")
    return _graph(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def wheel(spokes: int) -> Graph:
    """Hub 0 joined to a cycle on ``1..spokes``."""
    if spokes < 3:
        raise GraphError("wheel needs at least 3 spokes")
    rim = [(1 + i, 1 + (i + 1) % spokes) for i in range(spokes)]
    return _graph(spokes + 1, rim + [(0, i) for i in range(1, spokes + 1)])


def butterfly(d: int) -> Graph:
    """``BF(d)``: vertex ``layer * 2**d + column``.

    ``[l, c]`` and ``[l+1, c']`` are adjacent when ``c' == c`` or ``c'`` is ``c``
    with bit ``l`` flipped (bits counted from 0, i.e. the (l+1)-th bit).
    """
    if d < 1:
        raise GraphError("butterfly dimension must be >= 1")
    cols = 1 << d
    edges = []
    for layer in range(d):
        for c in range(cols):
            u = layer * cols + c
            edges.append((u, (layer + 1) * cols + c))
            edges.append((u, (layer + 1) * cols + (c ^ (1 << layer))))
    return _graph((d + 1) * cols, edges)


def butterfly_layer(d: int, v: int) -> int:
    return v >> d


def disjoint_union(graphs: Sequence[Graph]) -> tuple[Graph, list[list[int]]]:
    """Disjoint union (unvalidated) plus, per operand, the new ids of its vertices."""
    offset = 0
    edges = []
    blocks = []
    for g in graphs:
        blocks.append(list(range(offset, offset + g.n)))
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        offset += g.n
    return _graph(offset, edges, connected=False), blocks


def copies(t: int, g: Graph) -> Graph:
    """``t G``: ``t`` disjoint copies of ``g`` (usually disconnected)."""
    if t < 1:
        raise GraphError("need at least one copy")
    return disjoint_union([g] * t)[0]


def join(g1: Graph, g2: Graph) -> Graph:
    """``G1 + G2``: disjoint union plus every edge between the two vertex sets."""
    union, (a, b) = disjoint_union([g1, g2])
    return _graph(union.n, union.edges + [(u, v) for u in a for v in b])


def windmill(m: int, n: int) -> Graph:
    """``Wd(m, n)``: ``n`` copies of ``K_m`` sharing one universal vertex (0)."""
    if m < 2 or n < 2:
        raise GraphError("windmill needs m >= 2 and n >= 2")
    edges = []
    nxt = 1
    for _ in range(n):
        blade = [0] + list(range(nxt, nxt + m - 1))
        nxt += m - 1
        edges.extend((u, v) for i, u in enumerate(blade) for v in blade[i + 1:])
    return _graph(nxt, edges)


def threshold(ops: Sequence[str]) -> Graph:
    """Threshold graph from a one-vertex start and ops ``'i'`` (isolated) / ``'d'`` (dominating).

    The result must be connected, so the last op has to be ``'d'`` unless no
    op is given.
    """
    n = 1
    edges: list[tuple[int, int]] = []
    for op in ops:
        if op in ("d", "dominating"):
            edges.extend((u, n) for u in range(n))
        elif op not in ("i", "isolated"):
            raise GraphError(f"unknown threshold op {op!r}")
        n += 1
    return _graph(n, edges)


def h_family(a: Graph, b: Graph, n: int) -> Graph:
    """``G(A, B; n)``: copies ``A_i``, ``B_i`` with joins ``A_i + B_i`` and ``B_i + A_{i+1}``.

    Vertices of ``A_i`` come first (``i * |A| ...``), then those of every ``B_i``.
    """
    if n < 3:
        raise GraphError("H-family needs n >= 3")
    if not is_vertex_transitive(a) or not is_vertex_transitive(b):
        raise GraphError("H-family operands must be vertex-transitive")
    if is_isomorphic(a, b):
        raise GraphError("H-family operands must be non-isomorphic")
    a_blocks = [[i * a.n + v for v in range(a.n)] for i in range(n)]
    base = n * a.n
    b_blocks = [[base + i * b.n + v for v in range(b.n)] for i in range(n)]
    edges = []
    for i in range(n):
        edges.extend((a_blocks[i][u], a_blocks[i][v]) for u, v in a.edges)
        edges.extend((b_blocks[i][u], b_blocks[i][v]) for u, v in b.edges)
        for x in b_blocks[i]:
            edges.extend((x, y) for y in a_blocks[i])
            edges.extend((x, y) for y in a_blocks[(i + 1) % n])
    return _graph(base + n * b.n, edges)


# ---------------------------------------------------------------------------
# random constructors


def random_tree(n: int, seed: int) -> Graph:
    """Random recursive tree: vertex i hooks onto a uniformly chosen earlier vertex."""
    if n < 1:
        raise GraphError("tree needs n >= 1")
    rng = random.Random(seed)
    return _graph(n, [(i, rng.randrange(i)) for i in range(1, n)])


def random_connected(n: int, p: float, seed: int) -> Graph:
    """G(n, p) edges on top of a random spanning tree, so the result is connected."""
    if n < 1:
        raise GraphError("graph needs n >= 1")
    if not 0.0 <= p <= 1.0:
        raise GraphError("edge probability must lie in [0, 1]")
    rng = random.Random(seed)
    edges = {(rng.randrange(i), i) for i in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return _graph(n, edges)


def _substitute_blocks(n_blocks: int, seed: int, make_block: Callable[[random.Random], Graph]) -> Graph:
    """Glue random blocks along a random tree of attachment points."""
    rng = random.Random(seed)
    edges: list[tuple[int, int]] = []
    n = 1
    for _ in range(n_blocks):
        block = make_block(rng)
        anchor = rng.randrange(n)
        ids = [anchor] + list(range(n, n + block.n - 1))
        n += block.n - 1
        edges.extend((ids[u], ids[v]) for u, v in block.edges)
    return _graph(n, edges)


def random_cactus(n_blocks: int, seed: int, max_cycle: int = 6) -> Graph:
    """Cactus: every block is an edge or a chordless cycle."""
    return _substitute_blocks(
        n_blocks, seed, lambda r: complete(2) if r.random() < 0.4 else cycle(r.randint(3, max_cycle))
    )


def random_block_graph(n_blocks: int, seed: int, max_clique: int = 5) -> Graph:
    """Block graph: every block is a clique."""
    return _substitute_blocks(n_blocks, seed, lambda r: complete(r.randint(2, max_clique)))


def random_threshold(n: int, seed: int) -> Graph:
    rng = random.Random(seed)
    ops = [rng.choice("id") for _ in range(n - 2)] + ["d"] if n >= 2 else []
    return threshold(ops)


def random_trivially_perfect(n: int, seed: int) -> Graph:
    """Connected trivially perfect graph: a universal vertex joined to a random
    disjoint union of smaller trivially perfect graphs (built recursively)."""
    rng = random.Random(seed)

    def build(size: int) -> Graph:
        if size == 1:
            return complete(1)
        rest = size - 1
        parts = []
        while rest > 0:
            k = rng.randint(1, rest)
            parts.append(build(k))
            rest -= k
        union, _ = disjoint_union(parts)
        return join(complete(1), union)

    if n < 1:
        raise GraphError("graph needs n >= 1")
    return build(n)


FAMILIES: dict[str, Callable[..., Graph]] = {
    "path": path,
    "cycle": cycle,
    "complete": complete,
    "star": star,
    "complete_bipartite": complete_bipartite,
    "wheel": wheel,
    "butterfly": butterfly,
    "windmill": windmill,
    "random_tree": random_tree,
    "random_connected": random_connected,
    "random_cactus": random_cactus,
    "random_block_graph": random_block_graph,
    "random_threshold": random_threshold,
    "random_trivially_perfect": random_trivially_perfect,
}


def named_graph(spec: str) -> Graph:
    """Small named operands for joins and the H-family: ``K1``, ``2K1``, ``K3``, ``C4``, ``P3`` ..."""
    spec = spec.strip()
    t = 1
    i = 0
    while i < len(spec) and spec[i].isdigit():
        i += 1
    if i and i < len(spec):
        t, spec = int(spec[:i]), spec[i:]
    kind, arg = spec[0].upper(), int(spec[1:])
    base = {"K": complete, "C": cycle, "P": path}.get(kind)
    if base is None:
        raise GraphError(f"unknown named graph {spec!r}")
    g = base(arg)
    return g if t == 1 else copies(t, g)


def build_family(name: str, params: Sequence[str], seed: int | None = None) -> Graph:
    """Dispatch used by the CLI: integer params, named operands for joins/H-family."""
    if name in ("h_family", "h"):
        a, b, n = params
        return h_family(named_graph(a), named_graph(b), int(n))
    if name == "join":
        a, b = params
        return join(named_graph(a), named_graph(b))
    if name == "threshold":
        return threshold(list("".join(params)))
    if name not in FAMILIES:
        raise GraphError(f"unknown family {name!r}")
    fn = FAMILIES[name]
    args: list = []
    for p in params:
        args.append(float(p) if "." in p else int(p))
    if name.startswith("random"):
        args.append(0 if seed is None else seed)
    g = fn(*args)
    if not is_connected(g):
        raise GraphError(f"{name} produced a disconnected graph")
    return g
