import math
from functools import partial

import numpy as np
import pytest

from turnstile_lab.algorithms import GroupContractionVC, StoreAll, SubsampleMatching
from turnstile_lab.bind import BIndInstance, sample_uniform_instance
from turnstile_lab.graphs import matching_number
from turnstile_lab.harness import verify_iso
from turnstile_lab.matching_reduction import (
    ClaimTally,
    MatchRunArtifacts,
    MatchRunConfig,
    RunRandomness,
    alice_encode,
    bob_artifacts,
    bob_run,
    claim_prob_bounds,
    decide,
    sample_run,
    solve_bind,
    survivor_graph,
    asymptotic_parameters,
    trim,
    unpermuted_deletions,
)
from turnstile_lab.matrix import BitMatrix, PermutationPair, derive_rng, permute, random_matrix, xor_mask
from turnstile_lab.stream import HEADER_BYTES, SnapshotMismatch


def test_config():
    cfg = MatchRunConfig(256, 240, 1.0)
    assert cfg.runs == 100 and cfg.tau == 118
    assert MatchRunConfig(256, 240, 2.5).runs == 250
    with pytest.raises(ValueError):
        MatchRunConfig(10, 10)
    with pytest.raises(ValueError):
        MatchRunConfig(10, 2, 2.0)  # tau = floor(0.495) = 0


def test_alice_mask_equal_to_input_streams_nothing():
    A = random_matrix(8, derive_rng(1))
    cfg = MatchRunConfig(8, 4)
    snap = alice_encode(A, cfg, 1, StoreAll, 0, RunRandomness(A, PermutationPair.identity(8)))
    assert snap.bit_length == 8 * HEADER_BYTES
    assert snap.payload == StoreAll(8).snapshot().payload


def test_alice_all_ones_identity():
    cfg = MatchRunConfig(4, 3)
    ones = BitMatrix(np.ones((4, 4), dtype=bool))
    snap = alice_encode(ones, cfg, 1, StoreAll, 0, RunRandomness(BitMatrix.zeros(4), PermutationPair.identity(4)))
    alg = StoreAll(4)
    alg.restore(snap)
    assert alg.bits.sum() == 16


def test_alice_deterministic():
    A = random_matrix(16, derive_rng(2))
    cfg = MatchRunConfig(16, 10)
    assert alice_encode(A, cfg, 3, StoreAll, 9) == alice_encode(A, cfg, 3, StoreAll, 9)
    assert alice_encode(A, cfg, 3, StoreAll, 9) != alice_encode(A, cfg, 4, StoreAll, 9)


def test_bob_edge_sets():
    n, k = 20, 12
    inst = sample_uniform_instance(n, k, derive_rng(3))
    cfg = MatchRunConfig(n, k)
    snap = alice_encode(inst.A, cfg, 1, StoreAll, 5)
    art = bob_artifacts(inst.bob_side(), cfg, 1, snap, StoreAll, 5)
    rnd = sample_run(n, 5, 1)
    Ap = permute(xor_mask(inst.A, rnd.X), rnd.P)
    # E_S: permuted positions of window 1s
    expect_S = {
        (rnd.P.sigma1(i), rnd.P.sigma2(j))
        for i in range(inst.x, inst.x + k)
        for j in range(inst.y, inst.y + k)
        if (i, j) != (inst.x, inst.y) and Ap[rnd.P.sigma1(i), rnd.P.sigma2(j)]
    }
    expect_diag = {
        (rnd.P.sigma1(inst.x + q), rnd.P.sigma2(inst.y + q)) for q in range(1, k)
    } & expect_S
    assert art.E_S == expect_S
    assert art.E_diag == expect_diag
    assert art.E_del == expect_S - expect_diag
    assert len(art.M) in (0, cfg.tau)


def test_bob_exact_diagonal_gives_full_trim():
    n, k = 40, 32
    cfg = MatchRunConfig(n, k)
    A = np.zeros((n, n), dtype=bool)
    x = y = 3
    A[x - 1 + np.arange(k), y - 1 + np.arange(k)] = True
    inst = BIndInstance(BitMatrix(A), k, x, y)
    rnd = RunRandomness(BitMatrix.zeros(n), sample_run(n, 1, 1).P)
    snap = alice_encode(inst.A, cfg, 1, StoreAll, 1, rnd)
    art = bob_artifacts(inst.bob_side(), cfg, 1, snap, StoreAll, 1, rnd)
    assert len(art.M_prime) == k >= cfg.tau
    assert len(art.M) == cfg.tau


def test_bob_rejects_mismatched_snapshot():
    inst = sample_uniform_instance(12, 6, derive_rng(4))
    cfg = MatchRunConfig(12, 6)
    snap = alice_encode(inst.A, cfg, 1, StoreAll, 0)
    with pytest.raises(SnapshotMismatch):
        bob_run(inst.bob_side(), cfg, 1, snap, partial(SubsampleMatching, p=1.0, seed=0), 0)


def test_trim():
    rng = derive_rng(5)
    m = [(i, i) for i in range(1, 6)]
    assert trim(m[:4], 5, rng) == []
    assert trim(m, 5, rng) == m
    counts = np.zeros(10)
    big = [(i, i) for i in range(10)]
    for _ in range(10_000):
        for u, _ in trim(big, 5, rng):
            counts[u] += 1
    assert np.all(np.abs(counts / 10_000 - 0.5) <= 0.02)


def test_claim_negates_mask_bit():
    art = MatchRunArtifacts(None, None, set(), set(), set(), [], [], Q=1, x_bit=1)
    assert art.claim == 0
    assert MatchRunArtifacts(None, None, set(), set(), set(), [], [], Q=0, x_bit=1).claim is None


@pytest.mark.parametrize("p0,p1,out", [(2, 3, 1), (0, 0, 1), (5, 1, 0)])
def test_decide(p0, p1, out):
    assert decide(ClaimTally(p0, p1)) == out


def test_subsample_zero_always_answers_one():
    n, k = 24, 16
    cfg = MatchRunConfig(n, k, runs=5)
    alg = partial(SubsampleMatching, p=0.0, seed=1)
    right = 0
    for t in range(40):
        inst = sample_uniform_instance(n, k, derive_rng(6, t))
        res = solve_bind(inst, cfg, alg, t)
        assert res.answer == 1 and res.detail.p == 0
        right += res.answer == inst.answer
    assert 0.25 <= right / 40 <= 0.75


def test_message_bits_accounting():
    inst = sample_uniform_instance(32, 24, derive_rng(7))
    cfg = MatchRunConfig(32, 24, runs=6)
    res = solve_bind(inst, cfg, StoreAll, 3)
    assert res.total_bits <= cfg.runs * res.max_run_bits


def test_exact_algorithm_claims_are_correct():
    n, k = 64, 56
    cfg = MatchRunConfig(n, k, runs=1)
    claims = 0
    for t in range(150):
        inst = sample_uniform_instance(n, k, derive_rng(8, t))
        snap = alice_encode(inst.A, cfg, 1, StoreAll, t)
        q, claim = bob_run(inst.bob_side(), cfg, 1, snap, StoreAll, t)
        if q:
            claims += 1
            assert claim == inst.answer
    assert claims > 0


def test_unpermuted_deletions_examples():
    n, k, x, y = 8, 3, 2, 2
    A = random_matrix(n, derive_rng(9))
    assert unpermuted_deletions(A, A, x, y, k) == set()
    ones = BitMatrix(np.ones((n, n), dtype=bool))
    F = unpermuted_deletions(ones, BitMatrix.zeros(n), x, y, k)
    assert len(F) == k * k - 1 - (k - 1) == 6


def test_isomorphism_random():
    assert verify_iso(24, 16, 60, 10)[0].passed
    assert verify_iso(40, 20, 40, 11)[0].passed


def test_claim_prob_bounds():
    lo, hi = claim_prob_bounds(1, 256, 240)
    assert lo == pytest.approx(0.361667, abs=1e-6) and hi == pytest.approx(0.495)
    assert claim_prob_bounds(3, 50, 50) == (0.99 / 6, 0.99 / 6)
    for n in (10**4, 10**6, 10**8):
        for eps in (0.1, 0.25, 0.5):
            C = n**eps
            k = n - n ** (1 - eps) / 40
            assert claim_prob_bounds(C, n, k)[0] >= 2 / (5 * n**eps)


def test_asymptotic_parameters():
    C, k = asymptotic_parameters(256, 0.25)
    assert C == pytest.approx(4.0) and k == 256 - math.ceil(64 / 40)
