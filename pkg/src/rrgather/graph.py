"""Undirected simple graphs on dense vertex ids and the queries built on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs, bad vertex ids, or unparsable graph files."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on vertices ``0..n-1`` with optional vertex colors.

    Use :meth:`from_edges` to build one; it validates simplicity and, unless
    ``connected=False``, connectivity.
    """

    n: int
    adjacency: tuple[frozenset[int], ...]
    colors: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.colors:
            object.__setattr__(self, "colors", (0,) * self.n)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        colors: Sequence[int] | None = None,
        *,
        connected: bool = True,
    ) -> "Graph":
        if n < 1:
            raise GraphError("a graph needs at least one vertex")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        if colors is not None and len(colors) != n:
            raise GraphError(f"expected {n} colors, got {len(colors)}")
        g = cls(n, tuple(frozenset(a) for a in adj), tuple(int(c) for c in colors) if colors is not None else ())
        if connected and not is_connected(g):
            raise GraphError("graph is not connected")
        return g

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adjacency[u]) if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def is_colored(self) -> bool:
        return any(self.colors)

    def with_colors(self, colors: Sequence[int]) -> "Graph":
        if len(colors) != self.n:
            raise GraphError(f"expected {self.n} colors, got {len(colors)}")
        return Graph(self.n, self.adjacency, tuple(int(c) for c in colors))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the image graph where vertex ``v`` becomes ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling is not a bijection on the vertex set")
        adj: list[frozenset[int]] = [frozenset()] * self.n
        colors = [0] * self.n
        for v in range(self.n):
            adj[perm[v]] = frozenset(perm[u] for u in self.adjacency[v])
            colors[perm[v]] = self.colors[v]
        return Graph(self.n, tuple(adj), tuple(colors))

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph (unvalidated for connectivity) plus the new->old id map."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        adj = tuple(frozenset(index[u] for u in self.adjacency[v] if u in index) for v in keep)
        return Graph(len(keep), adj, tuple(self.colors[v] for v in keep)), keep

    def key(self) -> tuple:
        """Hashable identity of the labeled graph (edges and colors)."""
        return (self.n, tuple(self.edges), self.colors)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def check_vertex(g: Graph, v: int) -> int:
    if not isinstance(v, int) or not 0 <= v < g.n:
        raise GraphError(f"invalid vertex id {v!r} for graph with n={g.n}")
    return v


# ---------------------------------------------------------------------------
# distances


def _bfs(g: Graph, sources: Iterable[int], allowed: set[int] | frozenset[int] | None = None) -> dict[int, int]:
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sources:
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g.adjacency[u]:
            if w not in dist and (allowed is None or w in allowed):
                dist[w] = du
                queue.append(w)
    return dist


def distances_from(g: Graph, s: int) -> dict[int, int]:
    """Hop distances from ``s`` to every reachable vertex."""
    check_vertex(g, s)
    return _bfs(g, [s])


def distances_to_set(g: Graph, targets: Iterable[int], allowed: Iterable[int] | None = None) -> dict[int, int]:
    """Multi-source BFS: distance from each vertex to the nearest target."""
    return _bfs(g, targets, None if allowed is None else set(allowed))


def all_pairs_distances(g: Graph) -> list[dict[int, int]]:
    return [_bfs(g, [s]) for s in range(g.n)]


def is_connected(g: Graph, vertices: Iterable[int] | None = None) -> bool:
    vs = set(range(g.n)) if vertices is None else set(vertices)
    if not vs:
        return True
    start = next(iter(vs))
    return len(_bfs(g, [start], vs)) == len(vs)


def diameter(g: Graph) -> int:
    best = 0
    for s in range(g.n):
        dist = _bfs(g, [s])
        if len(dist) != g.n:
            raise GraphError("diameter is undefined for a disconnected graph")
        best = max(best, max(dist.values()))
    return best


def eccentricity(g: Graph, v: int) -> int:
    dist = distances_from(g, v)
    if len(dist) != g.n:
        raise GraphError("eccentricity is undefined for a disconnected graph")
    return max(dist.values())


def set_diameter(g: Graph, vertices: Iterable[int]) -> int:
    """Largest pairwise distance among ``vertices`` (0 for fewer than two)."""
    vs = sorted(set(vertices))
    best = 0
    for i, s in enumerate(vs[:-1]):
        dist = _bfs(g, [s])
        for t in vs[i + 1:]:
            best = max(best, dist[t])
    return best


# ---------------------------------------------------------------------------
# structure


def connected_components(g: Graph, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
    """Components of the subgraph induced by ``vertices`` (default: all of V).

    Components come back ordered by their smallest vertex id.
    """
    remaining = set(range(g.n)) if vertices is None else set(vertices)
    allowed = frozenset(remaining)
    comps = []
    for s in sorted(remaining):
        if s not in remaining:
            continue
        comp = frozenset(_bfs(g, [s], allowed))
        remaining -= comp
        comps.append(comp)
    return comps


def cut_vertices(g: Graph) -> frozenset[int]:
    """Articulation points via iterative Hopcroft-Tarjan low-link."""
    disc = [-1] * g.n
    low = [0] * g.n
    cuts: set[int] = set()
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack = [(root, -1, iter(sorted(g.adjacency[root])))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] == -1:
                    disc[w] = low[w] = timer
                    timer += 1
                    if v == root:
                        root_children += 1
                    stack.append((w, v, iter(sorted(g.adjacency[w]))))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent != -1:
                low[parent] = min(low[parent], low[v])
                if parent != root and low[v] >= disc[parent]:
                    cuts.add(parent)
        if root_children > 1:
            cuts.add(root)
    return frozenset(cuts)


def universal_vertices(g: Graph) -> frozenset[int]:
    return frozenset(v for v in range(g.n) if g.degree(v) == g.n - 1)


def _classes(g: Graph, key) -> list[frozenset[int]]:
    buckets: dict[frozenset[int], set[int]] = {}
    for v in range(g.n):
        buckets.setdefault(key(v), set()).add(v)
    return sorted((frozenset(b) for b in buckets.values()), key=min)


def false_twin_classes(g: Graph) -> list[frozenset[int]]:
    """Equivalence classes of N(u) = N(v); singletons included."""
    return _classes(g, lambda v: g.adjacency[v])


def true_twin_classes(g: Graph) -> list[frozenset[int]]:
    """Equivalence classes of N[u] = N[v]; singletons included."""
    return _classes(g, lambda v: g.adjacency[v] | {v})


def shortest_path_avoiding(
    g: Graph,
    u: int,
    v: int,
    forbidden: Iterable[int] = (),
    rank: Sequence[int] | None = None,
) -> list[int] | None:
    """Shortest u->v path whose interior avoids ``forbidden``.

    The path lives in G[(V - forbidden) | {u, v}]. Among shortest paths the one
    with the lexicographically smallest ``rank`` sequence is returned (``rank``
    defaults to vertex ids). ``None`` when no such path exists.
    """
    check_vertex(g, u)
    check_vertex(g, v)
    if u == v:
        return [u]
    allowed = set(range(g.n)) - set(forbidden)
    allowed.update((u, v))
    dist = _bfs(g, [v], allowed)
    if u not in dist:
        return None
    order = rank if rank is not None else range(g.n)
    path = [u]
    cur = u
    while cur != v:
        step = dist[cur] - 1
        cur = min((w for w in g.adjacency[cur] if dist.get(w) == step), key=lambda w: order[w])
        path.append(cur)
    return path


def first_hop_toward(
    g: Graph,
    src: int,
    targets: Iterable[int],
    rank: Sequence[int],
    allowed: Iterable[int] | None = None,
) -> int | None:
    """Neighbor of ``src`` on a shortest path to the target set, smallest rank first.

    Returns ``src`` itself when it is already a target and ``None`` when no
    target is reachable through ``allowed`` (``src`` and targets always allowed).
    """
    targets = set(targets)
    if src in targets:
        return src
    allow = None
    if allowed is not None:
        allow = set(allowed) | targets | {src}
    dist = _bfs(g, targets, allow)
    if src not in dist:
        return None
    step = dist[src] - 1
    return min((w for w in g.adjacency[src] if dist.get(w) == step), key=lambda w: rank[w])


# ---------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Graph:
    """Parse the edge-list text format (first line ``n``, then ``u v`` lines).

    An optional ``colors c0 ... c{n-1}`` line attaches vertex colors. Blank
    lines and ``#`` comments are ignored. The graph must be connected.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((raw, line))
    if not lines:
        raise GraphError("empty graph file")
    try:
        n = int(lines[0][1])
    except ValueError:
        raise GraphError(f"first line must be the vertex count, got {lines[0][0]!r}") from None
    edges: list[tuple[int, int]] = []
    colors: list[int] | None = None
    for raw, line in lines[1:]:
        parts = line.split()
        if parts[0] == "colors":
            if colors is not None:
                raise GraphError("colors line given twice")
            try:
                colors = [int(p) for p in parts[1:]]
            except ValueError:
                raise GraphError(f"bad colors line {raw!r}") from None
            continue
        if len(parts) != 2:
            raise GraphError(f"expected 'u v', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError(f"non-integer vertex in {raw!r}") from None
    return Graph.from_edges(n, edges, colors)


def format_graph(g: Graph) -> str:
    out = [str(g.n)]
    out.extend(f"{u} {v}" for u, v in g.edges)
    if g.is_colored():
        out.append("colors " + " ".join(map(str, g.colors)))
    return "\n".join(out) + "\n"


def read_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())
