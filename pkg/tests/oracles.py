"""Exhaustive reference computations, deliberately naive and independent of the package."""

from itertools import combinations


def brute_matching_size(edges):
    """Largest set of pairwise disjoint edges, by exhaustive recursion over edges."""
    edges = sorted(set(edges))

    def best(i, used_l, used_r):
        if i == len(edges):
            return 0
        u, v = edges[i]
        skip = best(i + 1, used_l, used_r)
        if u in used_l or v in used_r:
            return skip
        return max(skip, 1 + best(i + 1, used_l | {u}, used_r | {v}))

    return best(0, frozenset(), frozenset())


def brute_vertex_cover_size(vertices, edges):
    """Smallest subset of ``vertices`` touching every edge (self-loops included)."""
    vertices = sorted(vertices)
    for size in range(len(vertices) + 1):
        for cand in combinations(vertices, size):
            s = set(cand)
            if all(u in s or v in s for u, v in edges):
                return size
    raise AssertionError("unreachable")


def brute_bipartite_cover_size(n_left, n_right, edges):
    verts = [("L", u) for u in range(1, n_left + 1)] + [("R", v) for v in range(1, n_right + 1)]
    return brute_vertex_cover_size(verts, [(("L", u), ("R", v)) for u, v in edges])


def petersen_edges():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return [(a + 1, b + 1) for a, b in outer + spokes + inner]
