"""
Turning an insertion-deletion matching algorithm into a protocol for
Augmented Bi-Index.

Per run, public randomness fixes a mask ``X`` and permutations ``P``. Alice
streams the edges of ``permute(A ^ X, P)`` into the algorithm and sends its
snapshot. Bob knows the window, so he knows which of those edges lie in the
window; he deletes all of them except the ones on the diagonal through the
corner, extracts a matching, trims it to exactly ``tau`` edges, and looks for
the permuted corner edge. Each hit claims ``A[x, y] = 1 - X[x, y]``; the
majority of claims (ties go to 1) is the answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bind import BIndInstance, BobView, OneWayProtocol
from .graphs import BipartiteGraph
from .matrix import (
    BitMatrix,
    PermutationPair,
    derive_rng,
    permute,
    random_matrix,
    random_permutations,
    xor_mask,
)
from .stream import GraphStream, Snapshot

__all__ = [
    "MatchRunConfig",
    "RunRandomness",
    "MatchRunArtifacts",
    "ClaimTally",
    "BindResult",
    "MatchingProtocol",
    "sample_run",
    "alice_encode",
    "window_edges",
    "bob_run",
    "bob_artifacts",
    "trim",
    "decide",
    "solve_bind",
    "unpermuted_deletions",
    "claim_prob_bounds",
    "asymptotic_parameters",
]


@dataclass(frozen=True)
class MatchRunConfig:
    n: int
    k: int
    C: float = 1.0
    runs: int | None = None  # defaults to ceil(100 * C)
    tau: int = field(init=False)

    def __post_init__(self):
        if self.k < 1 or self.n - self.k < 1:
            raise ValueError(f"need 1 <= k and n - k >= 1 (n={self.n}, k={self.k})")
        if self.C < 1:
            raise ValueError("C must be >= 1")
        if self.runs is None:
            object.__setattr__(self, "runs", math.ceil(100 * self.C))
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        tau = math.floor(0.99 * self.k / (2 * self.C))
        if tau < 1:
            raise ValueError(f"trim target floor(0.99 k / 2C) = {tau} < 1")
        object.__setattr__(self, "tau", tau)


def asymptotic_parameters(n: int, epsilon: float) -> tuple[float, int]:
    """``(C, k)`` with ``C = n^eps`` and ``k = n - ceil(n^(1-eps) / 40)``."""
    return n**epsilon, n - math.ceil(n ** (1 - epsilon) / 40)


@dataclass(frozen=True, eq=False)
class RunRandomness:
    X: BitMatrix
    P: PermutationPair


def sample_run(n: int, seed: int, run_index: int) -> RunRandomness:
    """Public randomness of one run, identical for both parties."""
    X = random_matrix(n, derive_rng(seed, run_index, "mask"))
    P = random_permutations(n, derive_rng(seed, run_index, "perm"))
    return RunRandomness(X, P)


def alice_encode(A: BitMatrix, cfg, run_index: int, alg, seed: int, randomness: RunRandomness | None = None) -> Snapshot:
    """Stream the edges of the masked, permuted matrix in random order; return the snapshot.

    ``alg`` is a factory ``n -> StreamingAlgorithm``. ``randomness`` overrides
    the shared sample (test hook).
    """
    if A.n != cfg.n:
        raise ValueError("matrix size does not match config")
    rnd = randomness or sample_run(cfg.n, seed, run_index)
    Ap = permute(xor_mask(A, rnd.X), rnd.P)
    rows, cols = np.nonzero(Ap.bits)
    order = derive_rng(seed, run_index, "alice-order").permutation(len(rows))
    inst = alg(cfg.n)
    inst.process_stream(GraphStream.inserts(cfg.n, rows[order] + 1, cols[order] + 1))
    return inst.snapshot()


def window_edges(view: BobView, rnd: RunRandomness):
    """Edges of the permuted graph Bob can see inside the window.

    Returns ``(rows, cols, on_diagonal)`` as 0-based arrays: every 1 entry of
    ``(A ^ X)`` at a window position other than the corner, relabelled by the
    permutations, and whether it sits on the diagonal through the corner.
    """
    k, x0, y0 = view.k, view.x - 1, view.y - 1
    Xw = rnd.X.bits[x0 : x0 + k, y0 : y0 + k]
    live = view.window ^ Xw
    live[0, 0] = False
    a, b = np.nonzero(live)
    return rnd.P.rows[x0 + a], rnd.P.cols[y0 + b], a == b


@dataclass(frozen=True, eq=False)
class MatchRunArtifacts:
    X: BitMatrix
    P: PermutationPair
    E_S: set
    E_diag: set
    E_del: set
    M_prime: list
    M: list
    Q: int
    x_bit: int  # X[x, y] of this run

    @property
    def claim(self) -> int | None:
        return 1 - self.x_bit if self.Q else None


def trim(M_prime, tau: int, rng: np.random.Generator) -> list:
    """Empty below ``tau`` edges, otherwise a uniform ``tau``-subset."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if len(M_prime) < tau:
        return []
    pick = np.sort(rng.choice(len(M_prime), size=tau, replace=False))
    return [M_prime[i] for i in pick]


def bob_artifacts(view: BobView, cfg, run_index: int, snapshot: Snapshot, alg, seed: int,
                  randomness: RunRandomness | None = None) -> MatchRunArtifacts:
    if (view.n, view.k) != (cfg.n, cfg.k):
        raise ValueError("view does not match config")
    rnd = randomness or sample_run(cfg.n, seed, run_index)
    rows, cols, diag = window_edges(view, rnd)
    drows, dcols = rows[~diag], cols[~diag]
    order = derive_rng(seed, run_index, "bob-order").permutation(len(drows))
    inst = alg(cfg.n)
    inst.restore(snapshot)
    inst.process_stream(GraphStream.deletes(cfg.n, drows[order] + 1, dcols[order] + 1))
    m_prime = list(inst.extract())
    m = trim(m_prime, cfg.tau, derive_rng(seed, run_index, "trim"))
    target = (rnd.P.sigma1(view.x), rnd.P.sigma2(view.y))
    as_set = lambda r, c: set(zip((r + 1).tolist(), (c + 1).tolist()))  # noqa: E731
    return MatchRunArtifacts(
        X=rnd.X,
        P=rnd.P,
        E_S=as_set(rows, cols),
        E_diag=as_set(rows[diag], cols[diag]),
        E_del=as_set(drows, dcols),
        M_prime=m_prime,
        M=m,
        Q=int(target in set(m)),
        x_bit=rnd.X[view.x, view.y],
    )


def bob_run(view: BobView, cfg, run_index: int, snapshot: Snapshot, alg, seed: int,
            randomness: RunRandomness | None = None) -> tuple[int, int | None]:
    """``(Q, claimed bit or None)`` for one run."""
    art = bob_artifacts(view, cfg, run_index, snapshot, alg, seed, randomness)
    return art.Q, art.claim


@dataclass
class ClaimTally:
    p0: int = 0
    p1: int = 0

    @property
    def p(self) -> int:
        return self.p0 + self.p1

    def add(self, claim: int | None) -> None:
        if claim == 0:
            self.p0 += 1
        elif claim == 1:
            self.p1 += 1


def decide(tally: ClaimTally) -> int:
    return 1 if tally.p1 >= tally.p0 else 0


@dataclass(frozen=True)
class BindResult:
    answer: object  # 0, 1 or FAIL
    total_bits: int
    max_run_bits: int
    detail: object = None


def solve_bind(instance: BIndInstance, cfg: MatchRunConfig, alg, seed: int) -> BindResult:
    """Full protocol over ``cfg.runs`` runs; ``detail`` holds the claim tally."""
    if (instance.n, instance.k) != (cfg.n, cfg.k):
        raise ValueError("instance does not match config")
    view = instance.bob_side()
    tally = ClaimTally()
    bits = []
    for r in range(1, cfg.runs + 1):
        snap = alice_encode(instance.A, cfg, r, alg, seed)
        bits.append(snap.bit_length)
        _, claim = bob_run(view, cfg, r, snap, alg, seed)
        tally.add(claim)
    return BindResult(decide(tally), sum(bits), max(bits), tally)


class MatchingProtocol(OneWayProtocol):
    """The reduction packaged as a one-way protocol; the message is the list of snapshots."""

    protocol_id = "matching"

    def __init__(self, cfg: MatchRunConfig, alg):
        self.cfg = cfg
        self.alg = alg

    def alice(self, A, seed):
        return [alice_encode(A, self.cfg, r, self.alg, seed) for r in range(1, self.cfg.runs + 1)]

    def bob(self, view, message, seed):
        tally = ClaimTally()
        for r, snap in enumerate(message, start=1):
            tally.add(bob_run(view, self.cfg, r, snap, self.alg, seed)[1])
        return decide(tally)

    def message_bits(self, message):
        return sum(s.bit_length for s in message)


def unpermuted_deletions(A: BitMatrix, X: BitMatrix, x: int, y: int, k: int) -> set[tuple[int, int]]:
    """Window positions of ``A ^ X`` holding a 1 and off the corner diagonal."""
    B = A.bits ^ X.bits
    out = set()
    for a in range(k):
        for b in range(k):
            if a != b and B[x - 1 + a, y - 1 + b]:
                out.add((x + a, y + b))
    return out


def survivor_graph(Ap: BitMatrix, deleted) -> BipartiteGraph:
    adj = Ap.bits.copy()
    for i, j in deleted:
        adj[i - 1, j - 1] = False
    return BipartiteGraph.from_adjacency(adj)


def claim_prob_bounds(C: float, n: int, k: int) -> tuple[float, float]:
    """Lower and upper bound on the per-run claim probability."""
    if k <= 0:
        raise ValueError("k must be positive")
    hi = 0.99 / (2 * C)
    return hi - 2 * (n - k) / k, hi
