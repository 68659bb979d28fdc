"""Canonical labeling and automorphism orbits by individualization-refinement.

The search follows the classic scheme: refine the (colored) vertex partition to
an equitable one, individualize a vertex of the first smallest non-singleton
cell, refine again, and recurse until the partition is discrete. Every leaf
yields a labeling; the canonical one is the leaf with the lexicographically
smallest certificate ``(colors by label, sorted relabeled edge list)``.

Two leaves with equal certificates differ by an automorphism. Those
automorphisms prune sibling subtrees that are images of already explored ones,
and together they generate the full automorphism group, so the orbits are
exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .graph import Graph, GraphError

Certificate = tuple[tuple[int, ...], tuple[tuple[int, int], ...]]


@dataclass(frozen=True)
class CanonicalForm:
    labeling: tuple[int, ...]
    canonical_edges: tuple[tuple[int, int], ...]
    canonical_colors: tuple[int, ...]

    @property
    def certificate(self) -> Certificate:
        return self.canonical_colors, self.canonical_edges

    def hex(self) -> str:
        """Edge list as hex, two bytes per endpoint."""
        return b"".join(
            u.to_bytes(2, "big") + v.to_bytes(2, "big") for u, v in self.canonical_edges
        ).hex()


@dataclass(frozen=True)
class OrbitPartition:
    """Orbits sorted by their smallest canonical label (index = order)."""

    orbits: tuple[frozenset[int], ...]
    labeling: tuple[int, ...]

    def index_of(self, v: int) -> int:
        for i, orbit in enumerate(self.orbits):
            if v in orbit:
                return i
        raise GraphError(f"vertex {v} not covered by the orbit partition")

    def orbit_of(self, v: int) -> frozenset[int]:
        return self.orbits[self.index_of(v)]

    def min_label(self, i: int) -> int:
        return min(self.labeling[v] for v in self.orbits[i])

    def as_sets(self) -> set[frozenset[int]]:
        return set(self.orbits)

    def __len__(self) -> int:
        return len(self.orbits)


# ---------------------------------------------------------------------------
# partition refinement


def _dense_rank(keys: Sequence) -> list[int]:
    index = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [index[k] for k in keys]


def _refine(adj: Sequence[Sequence[int]], colors: list[int]) -> list[int]:
    """Coarsest equitable refinement; cell order depends only on invariants."""
    cur = colors
    k = len(set(cur))
    n = len(cur)
    while k < n:
        sigs = [(cur[v], tuple(sorted(map(cur.__getitem__, adj[v])))) for v in range(n)]
        new = _dense_rank(sigs)
        new_k = max(new) + 1
        if new_k == k:
            break
        cur, k = new, new_k
    return cur


def _individualize(colors: list[int], x: int) -> list[int]:
    return _dense_rank([(c, v != x) for v, c in enumerate(colors)])


def _target_cell(colors: list[int]) -> list[int] | None:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    best = None
    for c in sorted(cells):
        cell = cells[c]
        if len(cell) > 1 and (best is None or len(cell) < len(best)):
            best = cell
    return best


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class _Search:
    def __init__(self, g: Graph) -> None:
        self.n = g.n
        self.adj = [sorted(a) for a in g.adjacency]
        self.edges = g.edges
        self.init = list(g.colors)
        self.first: tuple[Certificate, list[int], list[int]] | None = None
        self.best: tuple[Certificate, list[int]] | None = None
        self.generators: list[list[int]] = []

    def certificate(self, lab: list[int]) -> Certificate:
        colors = [0] * self.n
        for v, c in enumerate(self.init):
            colors[lab[v]] = c
        edges = sorted((min(lab[u], lab[v]), max(lab[u], lab[v])) for u, v in self.edges)
        return tuple(colors), tuple(edges)

    def _automorphism(self, lab_a: list[int], lab_b: list[int]) -> list[int]:
        inv_b = [0] * self.n
        for v, c in enumerate(lab_b):
            inv_b[c] = v
        return [inv_b[lab_a[v]] for v in range(self.n)]

    def _add_generator(self, gamma: list[int]) -> None:
        if any(gamma[v] != v for v in range(self.n)):
            self.generators.append(gamma)

    def _stabilizer_orbits(self, prefix: list[int], uf: _UnionFind | None, seen: int) -> _UnionFind | None:
        """Fold generators found since ``seen`` that fix ``prefix`` into ``uf``."""
        for gamma in self.generators[seen:]:
            if all(gamma[p] == p for p in prefix):
                uf = uf or _UnionFind(self.n)
                for v in range(self.n):
                    uf.union(v, gamma[v])
        return uf

    def run(self) -> None:
        root = _refine(self.adj, _dense_rank(self.init))
        self._dfs(root, [])

    def _dfs(self, colors: list[int], prefix: list[int]) -> int | None:
        cell = _target_cell(colors)
        if cell is None:
            return self._leaf(colors, prefix)
        level = len(prefix)
        explored: list[int] = []
        uf: _UnionFind | None = None
        seen = 0
        for x in cell:
            if explored:
                uf = self._stabilizer_orbits(prefix, uf, seen)
                seen = len(self.generators)
                if uf is not None and any(uf.find(r) == uf.find(x) for r in explored):
                    continue
            explored.append(x)
            jump = self._dfs(_refine(self.adj, _individualize(colors, x)), prefix + [x])
            if jump is not None and jump < level:
                return jump
        return None

    def _leaf(self, lab: list[int], prefix: list[int]) -> int | None:
        cert = self.certificate(lab)
        if self.first is None:
            self.first = (cert, lab, prefix)
            self.best = (cert, lab)
            return None
        if cert == self.first[0]:
            self._add_generator(self._automorphism(self.first[1], lab))
            first_path = self.first[2]
            for i, (a, b) in enumerate(zip(first_path, prefix)):
                if a != b:
                    return i
            return len(prefix)
        assert self.best is not None
        if cert < self.best[0]:
            self.best = (cert, lab)
        elif cert == self.best[0]:
            self._add_generator(self._automorphism(self.best[1], lab))
        return None


@lru_cache(maxsize=8192)
def _analyze(g: Graph) -> tuple[CanonicalForm, tuple[frozenset[int], ...]]:
    search = _Search(g)
    search.run()
    assert search.best is not None
    cert, lab = search.best
    form = CanonicalForm(tuple(lab), cert[1], cert[0])
    uf = _UnionFind(g.n)
    for gamma in search.generators:
        for v in range(g.n):
            uf.union(v, gamma[v])
    groups: dict[int, set[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), set()).add(v)
    orbits = sorted((frozenset(s) for s in groups.values()), key=lambda o: min(lab[v] for v in o))
    return form, tuple(orbits)


def canonical_form(g: Graph) -> CanonicalForm:
    """Canonical labeling of ``g``; colors, when present, must be preserved."""
    return _analyze(g)[0]


def automorphism_orbits(g: Graph) -> OrbitPartition:
    """Exact (color-preserving) automorphism orbits in canonical order."""
    form, orbits = _analyze(g)
    return OrbitPartition(orbits, form.labeling)


def is_vertex_transitive(g: Graph) -> bool:
    return len(automorphism_orbits(g)) == 1


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    return g1.n == g2.n and canonical_form(g1).certificate == canonical_form(g2).certificate


def same_orbit(g: Graph, u: int, v: int) -> bool:
    orbits = automorphism_orbits(g)
    return orbits.index_of(u) == orbits.index_of(v)


def orbits_bruteforce(g: Graph, max_n: int = 8) -> list[frozenset[int]]:
    """Orbits by enumerating all n! bijections; a test oracle only."""
    if g.n > max_n:
        raise GraphError(f"brute-force orbits limited to n <= {max_n}, got {g.n}")
    edges = {frozenset(e) for e in g.edges}
    uf = _UnionFind(g.n)
    for perm in itertools.permutations(range(g.n)):
        if any(g.colors[v] != g.colors[perm[v]] for v in range(g.n)):
            continue
        if all(frozenset((perm[u], perm[v])) in edges for u, v in g.edges):
            for v in range(g.n):
                uf.union(v, perm[v])
    groups: dict[int, set[int]] = {}
    for v in range(g.n):
        groups.setdefault(uf.find(v), set()).add(v)
    return sorted((frozenset(s) for s in groups.values()), key=min)
