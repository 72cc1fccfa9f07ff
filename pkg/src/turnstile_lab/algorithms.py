"""
Streaming algorithms implementing :class:`~turnstile_lab.stream.StreamingAlgorithm`.

``StoreAll``          exact edge bitmap, outputs a maximum matching
``StoreAllCover``     exact edge bitmap, outputs a minimum vertex cover
``SubsampleMatching`` keeps each edge with probability p (a deliberately lossy matcher)
``GroupContractionVC`` counts edges between vertex groups and covers whole groups
``FullCover``         outputs every vertex; a trivially valid, useless cover
"""

from __future__ import annotations

import math
import struct
from functools import partial

import numpy as np

from .graphs import (
    DEFAULT_EXACT_CAP,
    BipartiteCover,
    BipartiteGraph,
    GeneralGraph,
    greedy_maximal_matching,
    maximum_matching,
    minimum_vertex_cover_bipartite,
    minimum_vertex_cover_exact,
)
from .stream import (
    DELETE,
    INSERT,
    EdgeUpdate,
    GraphStream,
    StreamingAlgorithm,
    StreamViolation,
    Violation,
)

__all__ = [
    "StoreAll",
    "StoreAllCover",
    "SubsampleMatching",
    "GroupContractionVC",
    "FullCover",
    "GroupPartition",
    "counter_width",
    "make_algorithm",
    "parse_params",
    "ALGORITHMS",
]


def _single_sign(stream: GraphStream) -> bool:
    return len(stream) > 0 and bool((stream.sign == stream.sign[0]).all())


class _BitmapState(StreamingAlgorithm):
    """Shared n-by-n bitmap of present bipartite edges."""

    def __init__(self, n: int):
        super().__init__(n, bipartite=True)
        self.bits = np.zeros((n, n), dtype=bool)

    def _keep(self, u, v) -> np.ndarray | bool:
        return True

    def process(self, update: EdgeUpdate, index: int = 1) -> None:
        u, v, sign = update
        self._check_endpoints(u, v, sign, index)
        if not self._keep(u, v):
            return
        present = self.bits[u - 1, v - 1]
        if sign == INSERT:
            if present:
                raise StreamViolation(Violation(index, "duplicate-insert", EdgeUpdate(u, v, sign)))
            self.bits[u - 1, v - 1] = True
        else:
            if not present:
                raise StreamViolation(Violation(index, "delete-absent", EdgeUpdate(u, v, sign)))
            self.bits[u - 1, v - 1] = False

    def process_stream(self, stream: GraphStream) -> None:
        if (stream.n, stream.bipartite) != (self.n, self.bipartite):
            raise ValueError("stream universe does not match the algorithm")
        if not _single_sign(stream):
            for idx, up in enumerate(stream, start=1):
                self.process(up, idx)
            return
        u, v = stream.u, stream.v
        ok = (u >= 1) & (u <= self.n) & (v >= 1) & (v <= self.n)
        if ok.all():
            keep = np.broadcast_to(self._keep(u, v), u.shape)
            flat = (u[keep] - 1) * self.n + (v[keep] - 1)
            cur = self.bits.reshape(-1)
            want_present = stream.sign[0] == DELETE
            if len(np.unique(flat)) == len(flat) and (cur[flat] == want_present).all():
                cur[flat] = not want_present
                return
        # slow path reports the exact offending update
        for idx, up in enumerate(stream, start=1):
            self.process(up, idx)

    def surviving_graph(self) -> BipartiteGraph:
        return BipartiteGraph.from_adjacency(self.bits)

    def _params(self) -> bytes:
        return b""

    def _encode_body(self):
        if not self.bits.any():
            return None
        return np.packbits(self.bits, axis=None).tobytes()

    def _decode_body(self, body):
        if body is None:
            self.bits = np.zeros((self.n, self.n), dtype=bool)
            return
        flat = np.unpackbits(np.frombuffer(body, dtype=np.uint8), count=self.n * self.n)
        self.bits = flat.reshape(self.n, self.n).astype(bool)


class StoreAll(_BitmapState):
    """Keeps the whole bipartite edge set; extract gives a maximum matching.

    Snapshot size is the 6-byte header alone while the graph is empty, and
    header plus an n*n-bit bitmap (rounded up to whole bytes) otherwise.
    """

    algorithm_id = "storeall"
    code = 1

    def extract(self) -> list[tuple[int, int]]:
        return maximum_matching(self.surviving_graph())


class StoreAllCover(_BitmapState):
    """Exact bitmap like :class:`StoreAll` but extracts a minimum vertex cover."""

    algorithm_id = "storeall-vc"
    code = 4

    def extract(self) -> BipartiteCover:
        return minimum_vertex_cover_bipartite(self.surviving_graph())


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser
    x = x.astype(np.uint64)
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        x = x ^ (x >> np.uint64(31))
    return x


class SubsampleMatching(_BitmapState):
    """Retains each edge with probability ``p``, decided by a seeded hash of
    the edge, so an insert and its later delete agree. Deletes of edges that
    were never retained are ignored.
    """

    algorithm_id = "subsample"
    code = 2

    def __init__(self, n: int, p: float, seed: int):
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        super().__init__(n)
        self.p = float(p)
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF

    def _keep(self, u, v):
        key = (np.asarray(u, dtype=np.uint64) - np.uint64(1)) * np.uint64(self.n) + (
            np.asarray(v, dtype=np.uint64) - np.uint64(1)
        )
        with np.errstate(over="ignore"):
            h = _mix64(key + _mix64(np.uint64(self.seed) + np.uint64(0x9E3779B97F4A7C15)))
        unit = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return unit < self.p

    def process(self, update: EdgeUpdate, index: int = 1) -> None:
        u, v, sign = update
        self._check_endpoints(u, v, sign, index)
        if not self._keep(u, v):
            return
        if sign == DELETE and not self.bits[u - 1, v - 1]:
            raise StreamViolation(Violation(index, "delete-absent", EdgeUpdate(u, v, sign)))
        if sign == INSERT and self.bits[u - 1, v - 1]:
            raise StreamViolation(Violation(index, "duplicate-insert", EdgeUpdate(u, v, sign)))
        self.bits[u - 1, v - 1] = sign == INSERT

    def retained_edges(self) -> set[tuple[int, int]]:
        return self.surviving_graph().edges

    def extract(self) -> list[tuple[int, int]]:
        return maximum_matching(self.surviving_graph())

    def _params(self) -> bytes:
        return struct.pack("<dQ", self.p, self.seed)


def _ceil_power(n: int, e: float) -> int:
    # ceil(n**e) robust to 64**0.5 == 8.000000000000002 style rounding
    val = n**e
    r = round(val)
    return r if math.isclose(val, r, rel_tol=1e-9, abs_tol=1e-9) else math.ceil(val)


class GroupPartition:
    """Contiguous partition of ``1..n`` into ``ceil(n^(1-eps))`` groups.

    Sizes differ by at most one, larger groups first, so every group has at
    most ``ceil(n^eps)`` vertices.
    """

    def __init__(self, n: int, epsilon: float):
        if not 0.0 < epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        self.n = n
        self.epsilon = float(epsilon)
        self.g = min(n, _ceil_power(n, 1.0 - epsilon))
        self.max_size = _ceil_power(n, epsilon)
        sizes = np.full(self.g, n // self.g)
        sizes[: n % self.g] += 1
        self.sizes = sizes
        self.starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        self.group_of = np.repeat(np.arange(self.g), sizes)  # 0-based group per 0-based vertex

    @property
    def groups(self) -> list[range]:
        """Groups as ranges of 1-based vertex ids."""
        return [range(s + 1, s + z + 1) for s, z in zip(self.starts.tolist(), self.sizes.tolist())]

    def members(self, group_ids) -> frozenset[int]:
        grs = self.groups
        return frozenset(v for gid in group_ids for v in grs[gid])


def counter_width(n: int) -> int:
    """Bits per pair counter: enough for any count in ``0..n^2``."""
    return max(1, math.ceil(math.log2(n * n + 1)))


def _pack_fixed(values: np.ndarray, width: int) -> np.ndarray:
    # each value as `width` bits, MSB first
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)


def _unpack_fixed(bits: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return (bits.reshape(-1, width).astype(np.int64) << shifts).sum(axis=1)


class GroupContractionVC(StreamingAlgorithm):
    """Deterministic vertex-cover algorithm over contracted vertex groups.

    Vertices are split into contiguous groups (see :class:`GroupPartition`) and
    only the number of present edges between every pair of groups is kept.
    ``extract`` covers the contracted support graph optimally and returns the
    union of the chosen groups, so its size is at most ``ceil(n^eps)`` times
    the optimum and every surviving edge is covered.

    General streams contract ``1..n`` into ``g`` groups; a nonzero diagonal
    counter is a self-loop that forces its group into the cover. Ties go to
    the lowest group id. Above ``exact_cap`` groups the contracted cover falls
    back to the endpoints of a greedy maximal matching (``self.exact`` is then
    False). Bipartite streams partition each side separately and cover the
    contracted bipartite graph exactly with König's theorem, so no cap applies.

    Snapshot body: a presence bit for every counter (upper triangle with
    diagonal, row-major, for general streams; g x g for bipartite), then one
    ``counter_width(n)``-bit value for each nonzero counter, in the same order,
    padded to whole bytes. The body is omitted while every counter is zero.
    """

    algorithm_id = "group-contraction"
    code = 3

    def __init__(self, n: int, epsilon: float, bipartite: bool = False, exact_cap: int = DEFAULT_EXACT_CAP):
        super().__init__(n, bipartite)
        self.partition = GroupPartition(n, epsilon)
        self.exact_cap = int(exact_cap)
        g = self.partition.g
        self.counts = np.zeros((g, g), dtype=np.int64)
        self.width = counter_width(n)

    @property
    def epsilon(self) -> float:
        return self.partition.epsilon

    @property
    def exact(self) -> bool:
        return self.bipartite or self.partition.g <= self.exact_cap

    def _cells(self, u, v):
        gu = self.partition.group_of[np.asarray(u) - 1]
        gv = self.partition.group_of[np.asarray(v) - 1]
        if self.bipartite:
            return gu, gv
        return np.minimum(gu, gv), np.maximum(gu, gv)

    def process(self, update: EdgeUpdate, index: int = 1) -> None:
        u, v, sign = update
        self._check_endpoints(u, v, sign, index)
        a, b = (int(c) for c in self._cells(u, v))
        if sign == DELETE and self.counts[a, b] == 0:
            raise StreamViolation(Violation(index, "delete-absent", EdgeUpdate(u, v, sign)))
        self.counts[a, b] += sign

    def process_stream(self, stream: GraphStream) -> None:
        if (stream.n, stream.bipartite) != (self.n, self.bipartite):
            raise ValueError("stream universe does not match the algorithm")
        if _single_sign(stream):
            u, v = stream.u, stream.v
            ok = (u >= 1) & (u <= self.n) & (v >= 1) & (v <= self.n)
            if not self.bipartite:
                ok &= u != v
            if ok.all():
                a, b = self._cells(u, v)
                trial = self.counts.copy()
                np.add.at(trial, (a, b), int(stream.sign[0]))
                # a run of deletes underflows at some prefix iff it ends negative
                if (trial >= 0).all():
                    self.counts = trial
                    return
        for idx, up in enumerate(stream, start=1):
            self.process(up, idx)

    def _pair_mask(self) -> np.ndarray:
        g = self.partition.g
        if self.bipartite:
            return np.ones((g, g), dtype=bool)
        return np.triu(np.ones((g, g), dtype=bool))

    def contracted_graph(self):
        """Support graph of the counters (groups are 1-based vertices)."""
        g = self.partition.g
        if self.bipartite:
            return BipartiteGraph.from_adjacency(self.counts > 0)
        a, b = np.nonzero(np.triu(self.counts) > 0)
        return GeneralGraph(g, zip((a + 1).tolist(), (b + 1).tolist()))

    def extract(self):
        h = self.contracted_graph()
        if self.bipartite:
            cov = minimum_vertex_cover_bipartite(h)
            return BipartiteCover(
                self.partition.members(i - 1 for i in sorted(cov.left)),
                self.partition.members(j - 1 for j in sorted(cov.right)),
            )
        if self.exact:
            chosen = minimum_vertex_cover_exact(h, cap=self.exact_cap)
        else:
            chosen = {u for u, v in h.edges if u == v}
            for u, v in greedy_maximal_matching(h):
                chosen.update((u, v))
        return self.partition.members(i - 1 for i in sorted(chosen))

    def _params(self) -> bytes:
        return struct.pack("<dH", self.epsilon, self.exact_cap)

    def _encode_body(self):
        vals = self.counts[self._pair_mask()]
        if not vals.any():
            return None
        present = vals > 0
        bits = np.concatenate([present.astype(np.uint8), _pack_fixed(vals[present], self.width)])
        return np.packbits(bits).tobytes()

    def _decode_body(self, body):
        g = self.partition.g
        self.counts = np.zeros((g, g), dtype=np.int64)
        if body is None:
            return
        mask = self._pair_mask()
        n_pairs = int(mask.sum())
        raw = np.unpackbits(np.frombuffer(body, dtype=np.uint8))
        present = raw[:n_pairs].astype(bool)
        k = int(present.sum())
        vals = np.zeros(n_pairs, dtype=np.int64)
        vals[present] = _unpack_fixed(raw[n_pairs : n_pairs + k * self.width], self.width)
        self.counts[mask] = vals

    def space_bound_bits(self, slack: float = 1.1) -> float:
        """``slack * g^2 * counter_width(n)`` plus header, the accounting ceiling."""
        header = len(self._header(True)) * 8
        return slack * self.partition.g**2 * self.width + header


class FullCover(StreamingAlgorithm):
    """Keeps nothing and reports every vertex as the cover."""

    algorithm_id = "full-cover"
    code = 5

    def process(self, update: EdgeUpdate, index: int = 1) -> None:
        self._check_endpoints(update.u, update.v, update.sign, index)

    def extract(self):
        everyone = frozenset(range(1, self.n + 1))
        return BipartiteCover(everyone, everyone) if self.bipartite else everyone

    def _params(self) -> bytes:
        return b""

    def _encode_body(self):
        return None

    def _decode_body(self, body):
        pass


ALGORITHMS = {
    cls.algorithm_id: cls for cls in (StoreAll, StoreAllCover, SubsampleMatching, GroupContractionVC, FullCover)
}


def parse_params(items) -> dict:
    """``["epsilon=0.5", "seed=3"]`` -> ``{"epsilon": 0.5, "seed": 3}``."""
    out = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        try:
            val = int(raw)
        except ValueError:
            val = float(raw)
        out[key.strip()] = val
    return out


def make_algorithm(name: str, **params):
    """Factory ``n -> algorithm`` for a named algorithm and its parameters.

    Cover algorithms are built in bipartite mode, which is what the
    reductions feed them.
    """
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}")
    cls = ALGORITHMS[name]
    if cls is GroupContractionVC:
        params.setdefault("bipartite", True)
    if cls is FullCover:
        params.setdefault("bipartite", True)
    return partial(cls, **params)
