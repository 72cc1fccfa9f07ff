"""
Insertion-deletion graph streams, the streaming-algorithm contract and the
snapshot format used as the one-way message.

A stream is either bipartite (``u`` a left id, ``v`` a right id, both in
``1..n``) or general (``u != v`` in ``1..n``, unordered).
"""

from __future__ import annotations

import struct
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, ClassVar, NamedTuple

import numpy as np

__all__ = [
    "INSERT",
    "DELETE",
    "EdgeUpdate",
    "GraphStream",
    "Violation",
    "StreamViolation",
    "SnapshotMismatch",
    "Snapshot",
    "StreamingAlgorithm",
    "validate_stream",
    "run_stream",
    "run_split",
    "measure_space",
    "HEADER_BYTES",
    "SNAPSHOT_FILE_MAGIC",
]

INSERT = 1
DELETE = -1


class EdgeUpdate(NamedTuple):
    u: int
    v: int
    sign: int  # INSERT or DELETE


@dataclass(frozen=True, eq=False)
class GraphStream:
    """Ordered edge updates over a fixed vertex universe, stored columnwise."""

    n: int
    u: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    v: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    sign: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int8))
    bipartite: bool = True

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.int64)
        v = np.asarray(self.v, dtype=np.int64)
        s = np.asarray(self.sign, dtype=np.int8)
        if not (u.shape == v.shape == s.shape) or u.ndim != 1:
            raise ValueError("u, v, sign must be equal-length vectors")
        if not np.isin(s, (INSERT, DELETE)).all():
            raise ValueError("sign must be +1 or -1")
        for name, arr in (("u", u), ("v", v), ("sign", s)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_updates(cls, n: int, updates, bipartite: bool = True) -> "GraphStream":
        updates = [EdgeUpdate(*up) for up in updates]
        return cls(
            n,
            np.array([up.u for up in updates], dtype=np.int64),
            np.array([up.v for up in updates], dtype=np.int64),
            np.array([up.sign for up in updates], dtype=np.int8),
            bipartite,
        )

    @classmethod
    def inserts(cls, n: int, u, v, bipartite: bool = True) -> "GraphStream":
        u = np.asarray(u, dtype=np.int64)
        return cls(n, u, v, np.full(len(u), INSERT, dtype=np.int8), bipartite)

    @classmethod
    def deletes(cls, n: int, u, v, bipartite: bool = True) -> "GraphStream":
        u = np.asarray(u, dtype=np.int64)
        return cls(n, u, v, np.full(len(u), DELETE, dtype=np.int8), bipartite)

    def __len__(self):
        return len(self.u)

    def __iter__(self):
        for a, b, s in zip(self.u.tolist(), self.v.tolist(), self.sign.tolist()):
            yield EdgeUpdate(a, b, s)

    def __getitem__(self, sl: slice) -> "GraphStream":
        if not isinstance(sl, slice):
            raise TypeError("streams slice into streams; iterate for single updates")
        return GraphStream(self.n, self.u[sl], self.v[sl], self.sign[sl], self.bipartite)

    def __add__(self, other: "GraphStream") -> "GraphStream":
        if (self.n, self.bipartite) != (other.n, other.bipartite):
            raise ValueError("cannot concatenate streams over different universes")
        return GraphStream(
            self.n,
            np.concatenate([self.u, other.u]),
            np.concatenate([self.v, other.v]),
            np.concatenate([self.sign, other.sign]),
            self.bipartite,
        )

    def surviving_edges(self) -> set[tuple[int, int]]:
        """Edge set after replaying the stream (assumes it validates)."""
        present = set()
        for up in self:
            e = edge_key(up.u, up.v, self.bipartite)
            if up.sign == INSERT:
                present.add(e)
            else:
                present.discard(e)
        return present

    # text format: "n m", then m lines "+ u v" / "- u v"
    def to_text(self) -> str:
        lines = [f"{self.n} {len(self)}"]
        lines += [f"{'+' if s == INSERT else '-'} {a} {b}" for a, b, s in self]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, bipartite: bool = True) -> "GraphStream":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        n, m = map(int, lines[0].split())
        if len(lines) - 1 != m:
            raise ValueError(f"header declares {m} updates, found {len(lines) - 1}")
        ups = []
        for ln in lines[1:]:
            op, a, b = ln.split()
            if op not in "+-":
                raise ValueError(f"bad update line {ln!r}")
            ups.append((int(a), int(b), INSERT if op == "+" else DELETE))
        return cls.from_updates(n, ups, bipartite)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path, bipartite: bool = True) -> "GraphStream":
        return cls.from_text(Path(path).read_text(), bipartite)


def edge_key(u: int, v: int, bipartite: bool) -> tuple[int, int]:
    return (u, v) if bipartite else (min(u, v), max(u, v))


@dataclass(frozen=True)
class Violation:
    index: int  # 1-based position of the offending update
    kind: str  # "delete-absent", "duplicate-insert" or "endpoint-out-of-range"
    update: EdgeUpdate


class StreamViolation(ValueError):
    def __init__(self, violation: Violation):
        super().__init__(f"{violation.kind} at update {violation.index}: {violation.update}")
        self.violation = violation


class SnapshotMismatch(ValueError):
    """Snapshot does not belong to this algorithm/configuration."""


def validate_stream(stream: GraphStream) -> Violation | None:
    """First strict-turnstile violation, or None when every prefix is simple."""
    present = set()
    for idx, up in enumerate(stream, start=1):
        in_range = 1 <= up.u <= stream.n and 1 <= up.v <= stream.n
        if not in_range or (not stream.bipartite and up.u == up.v):
            return Violation(idx, "endpoint-out-of-range", up)
        e = edge_key(up.u, up.v, stream.bipartite)
        if up.sign == INSERT:
            if e in present:
                return Violation(idx, "duplicate-insert", up)
            present.add(e)
        else:
            if e not in present:
                return Violation(idx, "delete-absent", up)
            present.remove(e)
    return None


# Snapshot payload header: algorithm code (u8), flags (u8), n (u32), little-endian.
_HEADER = struct.Struct("<BBI")
HEADER_BYTES = _HEADER.size
FLAG_BIPARTITE = 1
FLAG_BODY = 2

# Snapshot file header: magic (8), version (u16), algorithm code (u8), reserved (u8), payload length (u32).
SNAPSHOT_FILE_MAGIC = b"TSLSNAP\x00"
SNAPSHOT_FILE_VERSION = 1
_FILE_HEADER = struct.Struct("<8sHBBI")


@dataclass(frozen=True)
class Snapshot:
    algorithm_id: str
    payload: bytes

    @property
    def bit_length(self) -> int:
        return 8 * len(self.payload)

    def to_bytes(self) -> bytes:
        code = StreamingAlgorithm.registry_code(self.algorithm_id)
        head = _FILE_HEADER.pack(SNAPSHOT_FILE_MAGIC, SNAPSHOT_FILE_VERSION, code, 0, len(self.payload))
        return head + self.payload

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Snapshot":
        magic, version, code, _, length = _FILE_HEADER.unpack_from(raw)
        if magic != SNAPSHOT_FILE_MAGIC or version != SNAPSHOT_FILE_VERSION:
            raise ValueError("not a snapshot file")
        payload = raw[_FILE_HEADER.size :]
        if len(payload) != length:
            raise ValueError("truncated snapshot file")
        return cls(StreamingAlgorithm.registry_id(code), payload)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "Snapshot":
        return cls.from_bytes(Path(path).read_bytes())


def measure_space(snapshot: Snapshot) -> int:
    """Message size in bits: eight times the payload byte length."""
    return snapshot.bit_length


class StreamingAlgorithm(ABC):
    """Contract shared by every shipped streaming algorithm.

    Subclasses implement ``process``, ``extract``, ``_params``, ``_encode_body``
    and ``_decode_body``. Any randomness is fixed by parameters given at
    construction, so processing is deterministic and the encoded parameters
    suffice to rebuild an equivalent instance.
    """

    algorithm_id: ClassVar[str]
    code: ClassVar[int]
    _registry: ClassVar[dict[int, type]] = {}

    def __init_subclass__(cls, **kw):
        super().__init_subclass__(**kw)
        if "code" in cls.__dict__:
            if cls.code in StreamingAlgorithm._registry:
                raise TypeError(f"duplicate algorithm code {cls.code}")
            StreamingAlgorithm._registry[cls.code] = cls

    @staticmethod
    def registry_code(algorithm_id: str) -> int:
        for code, cls in StreamingAlgorithm._registry.items():
            if cls.algorithm_id == algorithm_id:
                return code
        raise KeyError(algorithm_id)

    @staticmethod
    def registry_id(code: int) -> str:
        return StreamingAlgorithm._registry[code].algorithm_id

    def __init__(self, n: int, bipartite: bool = True):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.bipartite = bipartite

    def _check_endpoints(self, u: int, v: int, sign: int, index: int = 1):
        if not (1 <= u <= self.n and 1 <= v <= self.n) or (not self.bipartite and u == v):
            raise StreamViolation(Violation(index, "endpoint-out-of-range", EdgeUpdate(u, v, sign)))

    @abstractmethod
    def process(self, update: EdgeUpdate) -> None: ...

    def process_stream(self, stream: GraphStream) -> None:
        """Feed every update in order. Subclasses may vectorise single-sign runs."""
        if (stream.n, stream.bipartite) != (self.n, self.bipartite):
            raise ValueError("stream universe does not match the algorithm")
        for up in stream:
            self.process(up)

    @abstractmethod
    def extract(self): ...

    @abstractmethod
    def _params(self) -> bytes: ...

    @abstractmethod
    def _encode_body(self) -> bytes | None:
        """Body bytes, or None when the state is the empty initial state."""

    @abstractmethod
    def _decode_body(self, body: bytes | None) -> None: ...

    def _header(self, has_body: bool) -> bytes:
        flags = (FLAG_BIPARTITE if self.bipartite else 0) | (FLAG_BODY if has_body else 0)
        return _HEADER.pack(self.code, flags, self.n) + self._params()

    def snapshot(self) -> Snapshot:
        body = self._encode_body()
        return Snapshot(self.algorithm_id, self._header(body is not None) + (body or b""))

    def restore(self, snapshot: Snapshot) -> None:
        if snapshot.algorithm_id != self.algorithm_id:
            raise SnapshotMismatch(f"snapshot of {snapshot.algorithm_id!r} given to {self.algorithm_id!r}")
        params = self._params()
        fixed = HEADER_BYTES + len(params)
        code, flags, n = _HEADER.unpack_from(snapshot.payload)
        expected = self._header(bool(flags & FLAG_BODY))
        if snapshot.payload[:fixed] != expected:
            raise SnapshotMismatch("snapshot header does not match this instance's configuration")
        self._decode_body(snapshot.payload[fixed:] if flags & FLAG_BODY else None)


AlgorithmFactory = Callable[[], StreamingAlgorithm]


def run_stream(make_alg: AlgorithmFactory, stream: GraphStream):
    alg = make_alg()
    alg.process_stream(stream)
    return alg.extract()


def run_split(make_alg: AlgorithmFactory, prefix: GraphStream, suffix: GraphStream):
    """Alice runs ``prefix``, hands her snapshot to Bob, who runs ``suffix``.

    Returns ``(snapshot, output)``.
    """
    bad = validate_stream(prefix + suffix)
    if bad is not None:
        raise StreamViolation(bad)
    alice = make_alg()
    alice.process_stream(prefix)
    snap = alice.snapshot()
    bob = make_alg()
    bob.restore(snap)
    bob.process_stream(suffix)
    return snap, bob.extract()
