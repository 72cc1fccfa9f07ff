"""
Turning an insertion-deletion vertex-cover algorithm into a protocol for
Augmented Bi-Index.

Alice behaves exactly as in the matching reduction. Bob deletes every window
edge he can see, including the diagonal, and extracts a cover. If the permuted
corner edge is left uncovered in some run, that edge cannot exist, so
``A[x, y] = X[x, y]`` for that run's mask. If every run covers it, Bob fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bind import FAIL, BIndInstance, BobView, OneWayProtocol
from .matching_reduction import BindResult, RunRandomness, alice_encode, sample_run, window_edges
from .matrix import BitMatrix, PermutationPair, derive_rng
from .stream import GraphStream, Snapshot

__all__ = [
    "VCRunConfig",
    "VCRunArtifacts",
    "VCProtocol",
    "bob_run_vc",
    "decide_vc",
    "cover_bound",
    "cover_prob_bound",
    "solve_bind_vc",
]


@dataclass(frozen=True)
class VCRunConfig:
    n: int
    k: int
    C: float = 1.0
    runs: int = 40

    def __post_init__(self):
        if self.k < 1 or self.n - self.k < 1:
            raise ValueError(f"need 1 <= k and n - k >= 1 (n={self.n}, k={self.k})")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True, eq=False)
class VCRunArtifacts:
    X: BitMatrix
    P: PermutationPair
    E_S: set
    cover: object  # BipartiteCover
    Q: int
    x_bit: int


def bob_run_vc(view: BobView, cfg, run_index: int, snapshot: Snapshot, alg, seed: int,
               randomness: RunRandomness | None = None) -> VCRunArtifacts:
    if (view.n, view.k) != (cfg.n, cfg.k):
        raise ValueError("view does not match config")
    rnd = randomness or sample_run(cfg.n, seed, run_index)
    rows, cols, _ = window_edges(view, rnd)
    order = derive_rng(seed, run_index, "bob-order").permutation(len(rows))
    inst = alg(cfg.n)
    inst.restore(snapshot)
    inst.process_stream(GraphStream.deletes(cfg.n, rows[order] + 1, cols[order] + 1))
    cover = inst.extract()
    q = int(rnd.P.sigma1(view.x) in cover.left or rnd.P.sigma2(view.y) in cover.right)
    return VCRunArtifacts(
        X=rnd.X,
        P=rnd.P,
        E_S=set(zip((rows + 1).tolist(), (cols + 1).tolist())),
        cover=cover,
        Q=q,
        x_bit=rnd.X[view.x, view.y],
    )


def decide_vc(runs) -> object:
    """Mask bit of the lowest-index run with Q = 0, else ``FAIL``.

    ``runs`` holds artifacts or ``(Q, x_bit)`` pairs.
    """
    for r in runs:
        q, xb = (r.Q, r.x_bit) if isinstance(r, VCRunArtifacts) else r
        if q == 0:
            return xb
    return FAIL


def cover_bound(n: int, k: int) -> int:
    if k > n:
        raise ValueError("k must not exceed n")
    return 2 * (n - k) + 1


def cover_prob_bound(C: float, n: int, k: int) -> float:
    if k <= 0:
        raise ValueError("k must be positive")
    return 3 * C * cover_bound(n, k) / k


def solve_bind_vc(instance: BIndInstance, cfg: VCRunConfig, alg, seed: int) -> BindResult:
    """``detail`` holds the per-run ``(Q, x_bit)`` pairs."""
    if (instance.n, instance.k) != (cfg.n, cfg.k):
        raise ValueError("instance does not match config")
    view = instance.bob_side()
    outcomes, bits = [], []
    for r in range(1, cfg.runs + 1):
        snap = alice_encode(instance.A, cfg, r, alg, seed)
        bits.append(snap.bit_length)
        art = bob_run_vc(view, cfg, r, snap, alg, seed)
        outcomes.append((art.Q, art.x_bit))
    return BindResult(decide_vc(outcomes), sum(bits), max(bits), outcomes)


class VCProtocol(OneWayProtocol):
    protocol_id = "vc"

    def __init__(self, cfg: VCRunConfig, alg):
        self.cfg = cfg
        self.alg = alg

    def alice(self, A, seed):
        return [alice_encode(A, self.cfg, r, self.alg, seed) for r in range(1, self.cfg.runs + 1)]

    def bob(self, view, message, seed):
        outs = [bob_run_vc(view, self.cfg, r, s, self.alg, seed) for r, s in enumerate(message, start=1)]
        return decide_vc(outs)

    def message_bits(self, message):
        return sum(s.bit_length for s in message)


def permuted_diagonal_zeros(rnd: RunRandomness, A: BitMatrix, x: int, y: int, k: int) -> int:
    """Zeros of the permuted matrix on the permuted corner diagonal (length k)."""
    q = np.arange(k)
    B = A.bits ^ rnd.X.bits
    return int(k - np.count_nonzero(B[x - 1 + q, y - 1 + q]))
