"""
Binary matrices, XOR masks, row/column permutations and the index window.

Public indices are 1-based (rows ``i``, columns ``j`` in ``1..n``); storage is a
0-based boolean numpy array.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "BitMatrix",
    "PermutationPair",
    "IndexWindow",
    "derive_rng",
    "xor_mask",
    "permute",
    "window_indices",
    "diagonal_indices",
    "graph_of",
    "random_matrix",
    "random_permutations",
]


def derive_rng(seed: int, run_index: int = 0, tag: str = "") -> np.random.Generator:
    """Generator fully determined by ``(seed, run_index, tag)``.

    Both parties of a protocol call this with the same triple to share
    randomness without communicating.
    """
    key = (int(run_index), zlib.crc32(tag.encode()))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


class BitMatrix:
    """Immutable n-by-n 0/1 matrix."""

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.array(bits)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
        if arr.dtype != bool:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("matrix entries must be 0 or 1")
            arr = arr.astype(bool)
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, n: int) -> "BitMatrix":
        return cls(np.zeros((n, n), dtype=bool))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=bool))

    @property
    def n(self) -> int:
        return self._bits.shape[0]

    @property
    def bits(self) -> np.ndarray:
        """Read-only 0-based boolean view."""
        return self._bits

    def __getitem__(self, ij) -> int:
        i, j = ij
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"({i}, {j}) outside [1, {self.n}]^2")
        return int(self._bits[i - 1, j - 1])

    def popcount(self) -> int:
        return int(np.count_nonzero(self._bits))

    def packed(self) -> bytes:
        """Row-major bit packing, MSB first."""
        return np.packbits(self._bits, axis=None).tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self):
        return hash((self.n, self.packed()))

    def __repr__(self):
        return f"BitMatrix(n={self.n}, popcount={self.popcount()})"

    # fixture text format: "n" then n lines of '0'/'1'
    def to_text(self) -> str:
        rows = ["".join("1" if b else "0" for b in row) for row in self._bits]
        return "\n".join([str(self.n), *rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines()]
        n = int(lines[0])
        rows = lines[1:]
        if len(rows) != n or any(len(r) != n or set(r) - {"0", "1"} for r in rows):
            raise ValueError("malformed matrix text")
        return cls(np.array([[c == "1" for c in r] for r in rows], dtype=bool))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "BitMatrix":
        return cls.from_text(Path(path).read_text())


def _check_bijection(image: np.ndarray, n: int) -> np.ndarray:
    image = np.asarray(image, dtype=np.int64)
    if image.shape != (n,) or not np.array_equal(np.sort(image), np.arange(n)):
        raise ValueError("map is not a bijection on [n]")
    return image


@dataclass(frozen=True, eq=False)
class PermutationPair:
    """Row map ``sigma1`` and column map ``sigma2``, stored as 0-based images.

    ``rows[i - 1] == sigma1(i) - 1``.
    """

    rows: np.ndarray
    cols: np.ndarray

    def __post_init__(self):
        n = len(self.rows)
        r = _check_bijection(self.rows, n)
        c = _check_bijection(self.cols, n)
        r.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "PermutationPair":
        return cls(np.arange(n), np.arange(n))

    @classmethod
    def from_images(cls, sigma1, sigma2) -> "PermutationPair":
        """Build from 1-based images of ``1..n``."""
        return cls(np.asarray(sigma1) - 1, np.asarray(sigma2) - 1)

    def sigma1(self, i: int) -> int:
        return int(self.rows[i - 1]) + 1

    def sigma2(self, j: int) -> int:
        return int(self.cols[j - 1]) + 1

    def inverse(self) -> "PermutationPair":
        return PermutationPair(np.argsort(self.rows), np.argsort(self.cols))

    def __eq__(self, other):
        if not isinstance(other, PermutationPair):
            return NotImplemented
        return np.array_equal(self.rows, other.rows) and np.array_equal(self.cols, other.cols)

    @staticmethod
    def image_to_text(image) -> str:
        return " ".join(str(int(v) + 1) for v in image) + "\n"

    @staticmethod
    def image_from_text(text: str) -> np.ndarray:
        vals = np.array([int(t) for t in text.split()], dtype=np.int64) - 1
        return _check_bijection(vals, len(vals))


@dataclass(frozen=True)
class IndexWindow:
    """The k-by-k window with top-left corner (x, y), 1-based."""

    n: int
    k: int
    x: int
    y: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        if not (1 <= self.x <= self.n - self.k and 1 <= self.y <= self.n - self.k):
            raise ValueError(f"(x, y)=({self.x}, {self.y}) outside [n-k]^2 = [{self.n - self.k}]^2")

    def mask(self) -> np.ndarray:
        """Boolean n-by-n mask of S(x, y) (0-based storage)."""
        m = np.zeros((self.n, self.n), dtype=bool)
        m[self.x - 1 : self.x - 1 + self.k, self.y - 1 : self.y - 1 + self.k] = True
        m[self.x - 1, self.y - 1] = False
        return m


def xor_mask(A: BitMatrix, X: BitMatrix) -> BitMatrix:
    if A.n != X.n:
        raise ValueError(f"dimension mismatch: {A.n} vs {X.n}")
    return BitMatrix(A.bits ^ X.bits)


def permute(B: BitMatrix, P: PermutationPair) -> BitMatrix:
    """Matrix R with R[sigma1(i), sigma2(j)] = B[i, j]."""
    if P.n != B.n:
        raise ValueError(f"permutation size {P.n} does not match matrix size {B.n}")
    out = np.empty_like(B.bits)
    out[np.ix_(P.rows, P.cols)] = B.bits
    return BitMatrix(out)


def window_indices(w: IndexWindow) -> set[tuple[int, int]]:
    return {
        (i, j)
        for i in range(w.x, w.x + w.k)
        for j in range(w.y, w.y + w.k)
        if (i, j) != (w.x, w.y)
    }


def diagonal_indices(x: int, y: int, k: int) -> list[tuple[int, int]]:
    return [(x + q, y + q) for q in range(k)]


def graph_of(B: BitMatrix) -> set[tuple[int, int]]:
    """Bipartite edges (row i, column j), 1-based, for every 1 entry."""
    rows, cols = np.nonzero(B.bits)
    return set(zip((rows + 1).tolist(), (cols + 1).tolist()))


def random_matrix(n: int, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix(rng.integers(0, 2, size=(n, n), dtype=np.uint8).astype(bool))


def random_permutations(n: int, rng: np.random.Generator) -> PermutationPair:
    return PermutationPair(rng.permutation(n), rng.permutation(n))
