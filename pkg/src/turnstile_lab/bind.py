"""
Augmented Index and Augmented Bi-Index instances, the packing of one into the
other, and a generic evaluator for one-way protocols.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matrix import BitMatrix, IndexWindow, derive_rng, random_matrix, window_indices

__all__ = [
    "FAIL",
    "IndInstance",
    "BIndInstance",
    "BobView",
    "OneWayProtocol",
    "VerbatimProtocol",
    "ConstantProtocol",
    "ProtocolStats",
    "pack_ind_to_bind",
    "index_to_position",
    "bob_view_from_suffix",
    "verify_suffix_sufficiency",
    "evaluate_protocol",
    "sample_packed_instance",
    "sample_uniform_instance",
]


class Outcome(enum.Enum):
    FAIL = "fail"

    def __repr__(self):
        return "FAIL"


FAIL = Outcome.FAIL


@dataclass(frozen=True, eq=False)
class IndInstance:
    """Bit vector ``V`` (length m) and Bob's 1-based index ``ell``."""

    V: np.ndarray
    ell: int

    def __post_init__(self):
        v = np.asarray(self.V).astype(bool)
        v.setflags(write=False)
        object.__setattr__(self, "V", v)
        if not 1 <= self.ell <= len(v):
            raise ValueError(f"index {self.ell} outside [1, {len(v)}]")

    @property
    def m(self) -> int:
        return len(self.V)

    @property
    def suffix(self) -> np.ndarray:
        """``(V_{ell+1}, ..., V_m)``."""
        return self.V[self.ell :]

    @property
    def answer(self) -> int:
        return int(self.V[self.ell - 1])


@dataclass(frozen=True, eq=False)
class BobView:
    """What Bob holds: the corner (x, y), k, and the k-by-k window bits.

    ``window[a, b]`` is the entry at row ``x + a``, column ``y + b``; the
    corner ``window[0, 0]`` is unknown to Bob and always stored as 0.
    """

    n: int
    k: int
    x: int
    y: int
    window: np.ndarray

    def __post_init__(self):
        IndexWindow(self.n, self.k, self.x, self.y)
        w = np.array(self.window, dtype=bool)
        if w.shape != (self.k, self.k):
            raise ValueError("window must be k-by-k")
        w[0, 0] = False
        w.setflags(write=False)
        object.__setattr__(self, "window", w)

    @classmethod
    def from_mapping(cls, n: int, k: int, x: int, y: int, mapping) -> "BobView":
        expected = window_indices(IndexWindow(n, k, x, y))
        if set(mapping) != expected:
            raise ValueError("view domain must be exactly S(x, y)")
        w = np.zeros((k, k), dtype=bool)
        for (i, j), b in mapping.items():
            w[i - x, j - y] = bool(b)
        return cls(n, k, x, y, w)

    def as_mapping(self) -> dict[tuple[int, int], int]:
        return {
            (self.x + a, self.y + b): int(self.window[a, b])
            for a in range(self.k)
            for b in range(self.k)
            if (a, b) != (0, 0)
        }


@dataclass(frozen=True, eq=False)
class BIndInstance:
    """Alice's matrix ``A`` and Bob's corner ``(x, y)`` with window size ``k``."""

    A: BitMatrix
    k: int
    x: int
    y: int

    def __post_init__(self):
        IndexWindow(self.A.n, self.k, self.x, self.y)

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def answer(self) -> int:
        return self.A[self.x, self.y]

    def bob_side(self) -> BobView:
        w = self.A.bits[self.x - 1 : self.x - 1 + self.k, self.y - 1 : self.y - 1 + self.k]
        return BobView(self.n, self.k, self.x, self.y, w)

    @property
    def bob_view(self) -> dict[tuple[int, int], int]:
        return self.bob_side().as_mapping()


def index_to_position(ell: int, side: int) -> tuple[int, int]:
    """The unique (x, y) in [side]^2 with ell = y + side*(x-1)."""
    q, r = divmod(ell - 1, side)
    return q + 1, r + 1


def _linear(i: int, j: int, side: int, order: str) -> int:
    return j + side * (i - 1) if order == "row" else i + side * (j - 1)


def pack_ind_to_bind(inst: IndInstance, n: int, k: int, order: str = "row") -> BIndInstance:
    """Lay ``V`` into the top-left (n-k)-square of an otherwise zero matrix.

    ``order="row"`` is the lexicographic layout. ``"column"`` lays ``V`` out
    column-major while Bob still locates ``ell`` with the row rule; it exists
    to show that a misplaced layout breaks Bob's reconstruction.
    """
    side = n - k
    if side < 1 or k < 1:
        raise ValueError("need 1 <= k < n")
    if inst.m != side * side:
        raise ValueError(f"vector length {inst.m} != (n-k)^2 = {side * side}")
    block = inst.V.reshape(side, side)
    if order == "column":
        block = block.T
    elif order != "row":
        raise ValueError(f"unknown order {order!r}")
    A = np.zeros((n, n), dtype=bool)
    A[:side, :side] = block
    x, y = index_to_position(inst.ell, side)
    return BIndInstance(BitMatrix(A), k, x, y)


def bob_view_from_suffix(suffix, ell: int, n: int, k: int, order: str = "row") -> BobView:
    """Rebuild Bob's window from the suffix ``V_{>ell}`` alone.

    Raises ValueError when the window needs a bit at or before ``ell``.
    """
    side = n - k
    suffix = np.asarray(suffix, dtype=bool)
    x, y = index_to_position(ell, side)
    w = np.zeros((k, k), dtype=bool)
    for a in range(k):
        for b in range(k):
            i, j = x + a, y + b
            if (a, b) == (0, 0) or i > side or j > side:
                continue
            pos = _linear(i, j, side, order)
            if pos <= ell:
                raise ValueError(f"window entry ({i}, {j}) needs V_{pos}, not in the suffix after {ell}")
            w[a, b] = suffix[pos - ell - 1]
    return BobView(n, k, x, y, w)


def verify_suffix_sufficiency(inst: IndInstance, n: int, k: int, order: str = "row") -> bool:
    """True iff every window entry inside the packed region lies after ``ell``."""
    side = n - k
    x, y = index_to_position(inst.ell, side)
    for i in range(x, min(x + k, side + 1)):
        for j in range(y, min(y + k, side + 1)):
            if (i, j) != (x, y) and _linear(i, j, side, order) <= inst.ell:
                return False
    return True


class OneWayProtocol:
    """Alice speaks once, Bob answers with a bit or ``FAIL``.

    Both sides receive the same shared ``seed`` as public randomness.
    """

    protocol_id = "abstract"

    def alice(self, A: BitMatrix, seed: int):
        raise NotImplementedError

    def bob(self, view: BobView, message, seed: int):
        raise NotImplementedError

    def message_bits(self, message) -> int:
        return 8 * len(message)


class VerbatimProtocol(OneWayProtocol):
    """Alice ships the whole matrix."""

    protocol_id = "verbatim"

    def alice(self, A, seed):
        return A.packed()

    def bob(self, view, message, seed):
        bits = np.unpackbits(np.frombuffer(message, dtype=np.uint8), count=view.n * view.n)
        return int(bits[(view.x - 1) * view.n + view.y - 1])

    def message_bits(self, message):
        return len(message) * 8


class ConstantProtocol(OneWayProtocol):
    """Alice sends nothing; Bob always answers ``bit``."""

    protocol_id = "constant"

    def __init__(self, bit: int = 1):
        self.bit = bit

    def alice(self, A, seed):
        return b""

    def bob(self, view, message, seed):
        return self.bit


@dataclass(frozen=True)
class ProtocolStats:
    trials: int
    successes: int
    fails: int
    mean_bits: float
    max_bits: int
    wrong: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials


def sample_packed_instance(n: int, k: int, rng: np.random.Generator) -> BIndInstance:
    """Uniform ``V`` of length (n-k)^2 and uniform ``ell``, packed."""
    m = (n - k) ** 2
    inst = IndInstance(rng.integers(0, 2, m).astype(bool), int(rng.integers(1, m + 1)))
    return pack_ind_to_bind(inst, n, k)


def sample_uniform_instance(n: int, k: int, rng: np.random.Generator) -> BIndInstance:
    """Uniform matrix and uniform corner in [n-k]^2."""
    x, y = (int(v) for v in rng.integers(1, n - k + 1, 2))
    return BIndInstance(random_matrix(n, rng), k, x, y)


def evaluate_protocol(
    protocol: OneWayProtocol,
    sample: Callable[[np.random.Generator], BIndInstance],
    trials: int,
    seed: int,
    workers: int = 1,
    on_trial: Callable | None = None,
) -> ProtocolStats:
    """Run ``protocol`` on ``trials`` fresh instances.

    Trial ``t`` draws its instance from ``derive_rng(seed, t, "instance")`` and
    uses ``seed * 1_000_003 + t`` as the protocol's shared seed. ``on_trial``
    receives ``(t, answer, truth, bits)`` in trial order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")

    def one(t):
        inst = sample(derive_rng(seed, t, "instance"))
        shared = seed * 1_000_003 + t
        msg = protocol.alice(inst.A, shared)
        ans = protocol.bob(inst.bob_side(), msg, shared)
        return ans, inst.answer, protocol.message_bits(msg)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(t) for t in range(trials)]

    successes = fails = wrong = 0
    bits = []
    for t, (ans, truth, b) in enumerate(results):
        if on_trial is not None:
            on_trial(t, ans, truth, b)
        bits.append(b)
        if ans is FAIL:
            fails += 1
        elif ans == truth:
            successes += 1
        else:
            wrong += 1
    return ProtocolStats(trials, successes, fails, float(np.mean(bits)), int(max(bits)), wrong)
