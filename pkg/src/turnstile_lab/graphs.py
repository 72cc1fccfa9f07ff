"""
Exact reference solvers: maximum bipartite matching, bipartite and general
minimum vertex cover, and validity checks.

Vertices are 1-based. Bipartite graphs keep left ids ``1..n_left`` and right
ids ``1..n_right`` in separate namespaces.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

__all__ = [
    "BipartiteGraph",
    "GeneralGraph",
    "BipartiteCover",
    "CapacityError",
    "DEFAULT_EXACT_CAP",
    "maximum_matching",
    "matching_number",
    "minimum_vertex_cover_bipartite",
    "minimum_vertex_cover_exact",
    "greedy_maximal_matching",
    "is_valid_matching",
    "is_valid_cover",
]

DEFAULT_EXACT_CAP = 64


class CapacityError(ValueError):
    """Instance too large for the exact general vertex-cover solver."""


class BipartiteGraph:
    """Simple bipartite graph backed by a dense boolean adjacency matrix."""

    __slots__ = ("adj",)

    def __init__(self, n_left: int, n_right: int, edges=()):
        self.adj = np.zeros((n_left, n_right), dtype=bool)
        for u, v in edges:
            if not (1 <= u <= n_left and 1 <= v <= n_right):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if self.adj[u - 1, v - 1]:
                raise ValueError(f"duplicate edge ({u}, {v})")
            self.adj[u - 1, v - 1] = True

    @classmethod
    def from_adjacency(cls, adj) -> "BipartiteGraph":
        g = cls.__new__(cls)
        g.adj = np.array(adj, dtype=bool)
        return g

    @property
    def n_left(self) -> int:
        return self.adj.shape[0]

    @property
    def n_right(self) -> int:
        return self.adj.shape[1]

    @property
    def edges(self) -> set[tuple[int, int]]:
        u, v = np.nonzero(self.adj)
        return set(zip((u + 1).tolist(), (v + 1).tolist()))

    def num_edges(self) -> int:
        return int(np.count_nonzero(self.adj))

    def has_edge(self, u: int, v: int) -> bool:
        return 1 <= u <= self.n_left and 1 <= v <= self.n_right and bool(self.adj[u - 1, v - 1])

    def to_text(self) -> str:
        lines = [f"{self.n_left} {self.n_right}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BipartiteGraph":
        lines = text.strip().splitlines()
        nl, nr = map(int, lines[0].split())
        return cls(nl, nr, [tuple(map(int, ln.split())) for ln in lines[1:] if ln.strip()])


class GeneralGraph:
    """Simple undirected graph on ``1..n_vertices``; self-loops allowed."""

    __slots__ = ("n_vertices", "edges")

    def __init__(self, n_vertices: int, edges=()):
        self.n_vertices = n_vertices
        seen = set()
        for u, v in edges:
            if not (1 <= u <= n_vertices and 1 <= v <= n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            e = (min(u, v), max(u, v))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        self.edges = frozenset(seen)

    def to_text(self) -> str:
        return "\n".join([str(self.n_vertices)] + [f"{u} {v}" for u, v in sorted(self.edges)]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GeneralGraph":
        lines = text.strip().splitlines()
        return cls(int(lines[0]), [tuple(map(int, ln.split())) for ln in lines[1:] if ln.strip()])

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())


@dataclass(frozen=True)
class BipartiteCover:
    left: frozenset
    right: frozenset

    def __len__(self):
        return len(self.left) + len(self.right)


def _match_right_of_left(g: BipartiteGraph) -> np.ndarray:
    # 0-based right partner of every left vertex, -1 if unmatched
    if g.n_left == 0 or g.n_right == 0:
        return np.full(g.n_left, -1)
    return maximum_bipartite_matching(csr_matrix(g.adj), perm_type="column")


def maximum_matching(g: BipartiteGraph) -> list[tuple[int, int]]:
    """Maximum-cardinality matching as sorted 1-based (left, right) pairs."""
    partner = _match_right_of_left(g)
    left = np.nonzero(partner >= 0)[0]
    return [(int(u) + 1, int(partner[u]) + 1) for u in left]


def matching_number(g: BipartiteGraph) -> int:
    return int(np.count_nonzero(_match_right_of_left(g) >= 0))


def minimum_vertex_cover_bipartite(g: BipartiteGraph) -> BipartiteCover:
    """Minimum cover via König's construction from a maximum matching."""
    partner = _match_right_of_left(g)
    owner = np.full(g.n_right, -1)
    matched = np.nonzero(partner >= 0)[0]
    owner[partner[matched]] = matched

    # alternating reachability from unmatched left vertices
    seen_l = partner < 0
    seen_r = np.zeros(g.n_right, dtype=bool)
    queue = deque(np.nonzero(seen_l)[0].tolist())
    while queue:
        u = queue.popleft()
        for v in np.nonzero(g.adj[u] & ~seen_r)[0]:
            seen_r[v] = True
            w = owner[v]
            if w >= 0 and not seen_l[w]:
                seen_l[w] = True
                queue.append(int(w))
    left = frozenset((np.nonzero(~seen_l)[0] + 1).tolist())
    right = frozenset((np.nonzero(seen_r)[0] + 1).tolist())
    return BipartiteCover(left, right)


def greedy_maximal_matching(g: GeneralGraph) -> list[tuple[int, int]]:
    """Maximal matching scanning edges in sorted order; self-loops skipped."""
    used = set()
    out = []
    for u, v in sorted(g.edges):
        if u != v and u not in used and v not in used:
            used.update((u, v))
            out.append((u, v))
    return out


def _matching_lower_bound(adj: list[int], alive: int) -> int:
    used = 0
    size = 0
    rest = alive
    while rest:
        u = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        if used >> u & 1:
            continue
        nbrs = adj[u] & alive & ~used & ~(1 << u)
        if nbrs:
            v = (nbrs & -nbrs).bit_length() - 1
            used |= (1 << u) | (1 << v)
            size += 1
    return size


def minimum_vertex_cover_exact(g: GeneralGraph, cap: int = DEFAULT_EXACT_CAP) -> frozenset[int]:
    """Minimum vertex cover of a general graph by branch and bound.

    Branches on a maximum-degree vertex (lowest id on ties): either it joins
    the cover, or all of its neighbours do. A greedy matching gives the lower
    bound. Self-loop vertices are put in the cover up front.
    """
    if g.n_vertices > cap:
        raise CapacityError(f"{g.n_vertices} vertices exceeds exact-solver cap {cap}")
    n = g.n_vertices
    adj = [0] * n
    forced = 0
    for u, v in g.edges:
        if u == v:
            forced |= 1 << (u - 1)
        else:
            adj[u - 1] |= 1 << (v - 1)
            adj[v - 1] |= 1 << (u - 1)

    full = (1 << n) - 1
    start_alive = full & ~forced
    # the greedy 2-approximation seeds the incumbent
    seed_cover = forced
    for u, v in greedy_maximal_matching(g):
        seed_cover |= (1 << (u - 1)) | (1 << (v - 1))
    best = [bin(seed_cover).count("1"), seed_cover]

    def search(alive: int, chosen: int, size: int):
        # pick max-degree vertex among alive
        top, top_deg = -1, 0
        rest = alive
        while rest:
            u = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            d = bin(adj[u] & alive).count("1")
            if d > top_deg:
                top, top_deg = u, d
        if top_deg == 0:
            if size < best[0]:
                best[0], best[1] = size, chosen
            return
        if size + _matching_lower_bound(adj, alive) >= best[0]:
            return
        bit = 1 << top
        search(alive & ~bit, chosen | bit, size + 1)
        nbrs = adj[top] & alive
        k = bin(nbrs).count("1")
        if size + k < best[0]:
            search(alive & ~nbrs & ~bit, chosen | nbrs, size + k)

    search(start_alive, forced, bin(forced).count("1"))
    cover = best[1]
    return frozenset(i + 1 for i in range(n) if cover >> i & 1)


def is_valid_matching(g, matching) -> bool:
    """True iff every pair is an edge of ``g`` and no vertex is reused."""
    seen_l, seen_r = set(), set()
    for u, v in matching:
        if isinstance(g, BipartiteGraph):
            if not g.has_edge(u, v) or u in seen_l or v in seen_r:
                return False
            seen_l.add(u)
            seen_r.add(v)
        else:
            if u == v or (min(u, v), max(u, v)) not in g.edges or u in seen_l or v in seen_l:
                return False
            seen_l.update((u, v))
    return True


def is_valid_cover(g, cover) -> bool:
    """True iff every edge of ``g`` has an endpoint in ``cover``."""
    if isinstance(g, BipartiteGraph):
        if not isinstance(cover, BipartiteCover):
            raise TypeError("bipartite graphs take a BipartiteCover")
        rows = np.zeros(g.n_left, dtype=bool)
        cols = np.zeros(g.n_right, dtype=bool)
        rows[[u - 1 for u in cover.left]] = True
        cols[[v - 1 for v in cover.right]] = True
        uncovered = g.adj & ~rows[:, None] & ~cols[None, :]
        return not uncovered.any()
    cover = set(cover)
    return all(u in cover or v in cover for u, v in g.edges)
