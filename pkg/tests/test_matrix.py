import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turnstile_lab.matrix import (
    BitMatrix,
    IndexWindow,
    PermutationPair,
    derive_rng,
    diagonal_indices,
    graph_of,
    permute,
    random_matrix,
    random_permutations,
    window_indices,
    xor_mask,
)


@st.composite
def matrices(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    return BitMatrix(np.array(bits).reshape(n, n))


@st.composite
def matrix_and_perms(draw):
    B = draw(matrices())
    r = draw(st.permutations(range(B.n)))
    c = draw(st.permutations(range(B.n)))
    return B, PermutationPair(np.array(r), np.array(c))


def test_xor_with_self_is_zero():
    A = random_matrix(6, derive_rng(1))
    assert xor_mask(A, A) == BitMatrix.zeros(6)


def test_xor_with_zero_is_identity():
    A = random_matrix(6, derive_rng(2))
    assert xor_mask(A, BitMatrix.zeros(6)) == A


def test_xor_small_example():
    A = BitMatrix([[1, 0], [0, 1]])
    X = BitMatrix([[1, 1], [0, 0]])
    assert xor_mask(A, X) == BitMatrix([[0, 1], [0, 1]])


def test_xor_dimension_mismatch():
    with pytest.raises(ValueError):
        xor_mask(BitMatrix.zeros(2), BitMatrix.zeros(3))


def test_xor_marginals_uniform():
    A = BitMatrix(np.tri(5, dtype=bool))
    rng = derive_rng(3)
    total = np.zeros((5, 5))
    samples = 10_000
    for _ in range(samples):
        total += xor_mask(A, random_matrix(5, rng)).bits
    assert np.all(np.abs(total / samples - 0.5) <= 0.02)


def test_permute_identity():
    B = random_matrix(5, derive_rng(4))
    assert permute(B, PermutationPair.identity(5)) == B


def test_permute_swaps_rows():
    B = BitMatrix([[1, 1], [0, 1]])
    P = PermutationPair.from_images([2, 1], [1, 2])
    assert permute(B, P) == BitMatrix([[0, 1], [1, 1]])


def test_permute_places_entries():
    B = random_matrix(7, derive_rng(5))
    P = random_permutations(7, derive_rng(6))
    R = permute(B, P)
    for i in range(1, 8):
        for j in range(1, 8):
            assert R[P.sigma1(i), P.sigma2(j)] == B[i, j]


def test_permute_rejects_non_bijection():
    with pytest.raises(ValueError):
        PermutationPair(np.array([0, 0]), np.array([0, 1]))


@given(matrix_and_perms())
def test_permute_inverse_round_trip(bp):
    B, P = bp
    assert permute(permute(B, P), P.inverse()) == B


@given(matrix_and_perms())
def test_permute_preserves_line_sums(bp):
    B, P = bp
    R = permute(B, P)
    assert sorted(R.bits.sum(1)) == sorted(B.bits.sum(1))
    assert sorted(R.bits.sum(0)) == sorted(B.bits.sum(0))


@given(matrices())
def test_graph_of_has_popcount_edges(B):
    assert len(graph_of(B)) == B.popcount()


def test_graph_of_examples():
    assert graph_of(BitMatrix.identity(3)) == {(1, 1), (2, 2), (3, 3)}
    assert graph_of(BitMatrix.zeros(3)) == set()
    assert len(graph_of(BitMatrix(np.ones((2, 2), dtype=bool)))) == 4


def test_window_k1_empty():
    assert window_indices(IndexWindow(5, 1, 2, 3)) == set()


def test_window_small():
    assert window_indices(IndexWindow(5, 2, 1, 1)) == {(1, 2), (2, 1), (2, 2)}


def test_window_figure_size():
    w = window_indices(IndexWindow(9, 4, 3, 3))
    assert len(w) == 15
    assert w == {(i, j) for i in range(3, 7) for j in range(3, 7)} - {(3, 3)}


@pytest.mark.parametrize("n,k", [(4, 1), (6, 3), (10, 7)])
def test_window_size_and_mask(n, k):
    for x in range(1, n - k + 1):
        for y in range(1, n - k + 1):
            w = IndexWindow(n, k, x, y)
            idx = window_indices(w)
            assert len(idx) == k * k - 1
            rows, cols = np.nonzero(w.mask())
            assert set(zip((rows + 1).tolist(), (cols + 1).tolist())) == idx


@pytest.mark.parametrize("args", [(5, 6, 1, 1), (5, 2, 0, 1), (5, 2, 4, 1), (5, 5, 1, 1)])
def test_window_invalid(args):
    with pytest.raises(ValueError):
        IndexWindow(*args)


def test_diagonal():
    assert diagonal_indices(4, 2, 1) == [(4, 2)]
    assert diagonal_indices(1, 1, 3) == [(1, 1), (2, 2), (3, 3)]
    k = 5
    w = IndexWindow(12, k, 2, 4)
    assert len(set(diagonal_indices(2, 4, k)) & window_indices(w)) == k - 1


def test_text_round_trip(tmp_path):
    B = random_matrix(6, derive_rng(7))
    B.save(tmp_path / "m.txt")
    assert BitMatrix.load(tmp_path / "m.txt") == B
    assert B.to_text().splitlines()[0] == "6"
    P = random_permutations(6, derive_rng(8))
    assert np.array_equal(PermutationPair.image_from_text(PermutationPair.image_to_text(P.rows)), P.rows)


def test_one_based_access_bounds():
    B = BitMatrix.identity(3)
    assert B[1, 1] == 1 and B[1, 2] == 0
    with pytest.raises(IndexError):
        B[0, 1]


def test_derived_rng_is_replayable_and_tagged():
    a = derive_rng(9, 3, "mask").integers(0, 2**32, 4)
    b = derive_rng(9, 3, "mask").integers(0, 2**32, 4)
    c = derive_rng(9, 3, "perm").integers(0, 2**32, 4)
    d = derive_rng(9, 4, "mask").integers(0, 2**32, 4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c) and not np.array_equal(a, d)


def test_matrix_immutable():
    B = BitMatrix.identity(2)
    with pytest.raises(ValueError):
        B.bits[0, 0] = False
