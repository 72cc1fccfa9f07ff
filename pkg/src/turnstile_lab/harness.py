"""
Verification campaigns, protocol trials, space curves and fixture generation.

Every campaign returns a list of :class:`ReportRow` and is a pure function of
its arguments (including the seed).
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from functools import partial
from pathlib import Path

import numpy as np

from .algorithms import GroupContractionVC, StoreAll, make_algorithm
from .bind import (
    FAIL,
    IndInstance,
    evaluate_protocol,
    pack_ind_to_bind,
    sample_packed_instance,
    sample_uniform_instance,
)
from .graphs import GeneralGraph, matching_number, minimum_vertex_cover_bipartite
from .matching_reduction import (
    MatchingProtocol,
    MatchRunConfig,
    alice_encode,
    bob_artifacts,
    claim_prob_bounds,
    sample_run,
    survivor_graph,
    unpermuted_deletions,
    window_edges,
)
from .matrix import BitMatrix, derive_rng, permute, random_matrix, xor_mask
from .stream import GraphStream, validate_stream
from .vc_reduction import (
    VCProtocol,
    VCRunConfig,
    bob_run_vc,
    cover_bound,
    cover_prob_bound,
    permuted_diagonal_zeros,
)

__all__ = [
    "ReportRow",
    "RATE_TOLERANCE",
    "verify_matching_size",
    "verify_claim_rate",
    "verify_iso",
    "verify_vc_size",
    "verify_cover_rate",
    "verify_diag_zeros",
    "VERIFIERS",
    "run_protocol",
    "dense_random_stream",
    "space_curve",
    "generate_fixtures",
    "write_rows",
    "all_pass",
]

RATE_TOLERANCE = 0.05


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    params: str
    metric: str
    observed: float
    bound: float
    margin: float  # positive means inside the bound
    passed: bool


def _fmt(**kw) -> str:
    return ";".join(f"{k}={v}" for k, v in kw.items())


def _at_most(exp, params, metric, observed, bound) -> ReportRow:
    return ReportRow(exp, params, metric, float(observed), float(bound), float(bound - observed), observed <= bound)


def _at_least(exp, params, metric, observed, bound) -> ReportRow:
    return ReportRow(exp, params, metric, float(observed), float(bound), float(observed - bound), observed >= bound)


def all_pass(rows) -> bool:
    return all(r.passed for r in rows)


def write_rows(rows, path, fields=None) -> None:
    """Write dataclass rows (or dicts) to ``path`` in the given order."""
    rows = [asdict(r) if not isinstance(r, dict) else r for r in rows]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields or list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def _check_window(n, k):
    if k < 1 or n - k < 1:
        raise ValueError(f"need 1 <= k and n - k >= 1 (n={n}, k={k})")


def _trial(n, k, seed, t):
    """Uniform instance plus the shared randomness of its first run."""
    inst = sample_uniform_instance(n, k, derive_rng(seed, t, "instance"))
    return inst, sample_run(n, seed, t)


def _permuted(inst, rnd) -> BitMatrix:
    return permute(xor_mask(inst.A, rnd.X), rnd.P)


def matching_sizes(n: int, k: int, trials: int, seed: int) -> np.ndarray:
    """Matching number of the survivor graph (window deletions applied) per trial."""
    _check_window(n, k)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        inst, rnd = _trial(n, k, seed, t)
        rows, cols, diag = window_edges(inst.bob_side(), rnd)
        adj = _permuted(inst, rnd).bits.copy()
        adj[rows[~diag], cols[~diag]] = False
        out[t] = matching_number(survivor_graph(BitMatrix(adj), ()))
    return out


def verify_matching_size(n, k, trials, seed, lo_frac=0.95, hi_frac=1.05, quantile=0.99, **_):
    """Fraction of trials with the matching number inside the relaxed window."""
    mu = matching_sizes(n, k, trials, seed)
    lo, hi = lo_frac * k / 2, hi_frac * k / 2 + 2 * (n - k)
    inside = float(np.mean((mu >= lo) & (mu <= hi)))
    p = _fmt(n=n, k=k, trials=trials, seed=seed, window=f"[{lo:g},{hi:g}]")
    return [
        _at_least("matching-size", p, "fraction_in_window", inside, quantile),
        ReportRow("matching-size", p, "min_mu", float(mu.min()), lo, float(mu.min() - lo), True),
        ReportRow("matching-size", p, "max_mu", float(mu.max()), hi, float(hi - mu.max()), True),
    ]


def verify_claim_rate(n, k, C=1.0, trials=2000, seed=0, alg=StoreAll, tolerance=RATE_TOLERANCE, **_):
    """Empirical claim probability of single runs against the closed-form bounds.

    Each trial is one run on a fresh uniform instance. With an exact
    algorithm every claim must be correct.
    """
    cfg = MatchRunConfig(n, k, C, runs=1)
    q = claims_ok = nonempty = 0
    for t in range(trials):
        inst = sample_uniform_instance(n, k, derive_rng(seed, t, "instance"))
        snap = alice_encode(inst.A, cfg, 1, alg, seed + t)
        art = bob_artifacts(inst.bob_side(), cfg, 1, snap, alg, seed + t)
        nonempty += bool(art.M)
        if art.Q:
            q += 1
            claims_ok += art.claim == inst.answer
    lo, hi = claim_prob_bounds(C, n, k)
    rate = q / trials
    p = _fmt(n=n, k=k, C=C, trials=trials, seed=seed, tau=cfg.tau)
    return [
        _at_least("claim-rate", p, "claim_rate_vs_lower", rate, lo - tolerance),
        _at_most("claim-rate", p, "claim_rate_vs_upper", rate, hi + tolerance),
        _at_least("claim-rate", p, "correct_claim_fraction", claims_ok / q if q else 1.0, 1.0),
        ReportRow("claim-rate", p, "nonempty_M_fraction", nonempty / trials, 0.0, nonempty / trials, True),
    ]


def verify_iso(n, k, trials, seed, **_):
    """Matching number of the permuted survivor graph equals the unpermuted one."""
    _check_window(n, k)
    mism = 0
    for t in range(trials):
        inst, rnd = _trial(n, k, seed, t)
        rows, cols, diag = window_edges(inst.bob_side(), rnd)
        e_del = set(zip((rows[~diag] + 1).tolist(), (cols[~diag] + 1).tolist()))
        lhs = matching_number(survivor_graph(_permuted(inst, rnd), e_del))
        G = xor_mask(inst.A, rnd.X)
        F = unpermuted_deletions(inst.A, rnd.X, inst.x, inst.y, k)
        rhs = matching_number(survivor_graph(G, F))
        mism += lhs != rhs
    p = _fmt(n=n, k=k, trials=trials, seed=seed)
    return [_at_most("iso", p, "mismatches", mism, 0)]


def cover_sizes(n, k, trials, seed) -> np.ndarray:
    _check_window(n, k)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        inst, rnd = _trial(n, k, seed, t)
        rows, cols, _ = window_edges(inst.bob_side(), rnd)
        adj = _permuted(inst, rnd).bits.copy()
        adj[rows, cols] = False
        out[t] = len(minimum_vertex_cover_bipartite(survivor_graph(BitMatrix(adj), ())))
    return out


def verify_vc_size(n, k, trials, seed, **_):
    sizes = cover_sizes(n, k, trials, seed)
    bound = cover_bound(n, k)
    p = _fmt(n=n, k=k, trials=trials, seed=seed)
    return [_at_most("vc-size", p, "max_min_cover", int(sizes.max()), bound)]


def cover_rate_counts(n, k, trials, seed, alg):
    """``(runs with absent corner edge, of which covered, wrong-bit runs)``."""
    cfg = VCRunConfig(n, k, runs=1)
    absent = covered = wrong = 0
    for t in range(trials):
        inst = sample_uniform_instance(n, k, derive_rng(seed, t, "instance"))
        snap = alice_encode(inst.A, cfg, 1, alg, seed + t)
        art = bob_run_vc(inst.bob_side(), cfg, 1, snap, alg, seed + t)
        edge_present = inst.answer ^ art.x_bit
        if not edge_present:
            absent += 1
            covered += art.Q
        elif art.Q == 0:
            wrong += 1
    return absent, covered, wrong


def verify_cover_rate(n, k, C, trials, seed, alg=None, epsilon=None, tolerance=RATE_TOLERANCE, **_):
    """Pr[Q = 1 | corner edge absent] against the closed-form bound."""
    if alg is None:
        eps = epsilon if epsilon is not None else math.log(C, n)
        alg = partial(GroupContractionVC, epsilon=eps, bipartite=True)
    absent, covered, wrong = cover_rate_counts(n, k, trials, seed, alg)
    rate = covered / absent if absent else 0.0
    bound = cover_prob_bound(C, n, k)
    p = _fmt(n=n, k=k, C=C, trials=trials, seed=seed, conditioned_runs=absent)
    return [
        _at_most("cover-rate", p, "conditional_cover_rate", rate, bound + tolerance),
        _at_most("cover-rate", p, "uncovered_present_edges", wrong, 0),
    ]


def diag_zero_counts(n, k, trials, seed) -> np.ndarray:
    _check_window(n, k)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        inst, rnd = _trial(n, k, seed, t)
        out[t] = permuted_diagonal_zeros(rnd, inst.A, inst.x, inst.y, k)
    return out


def verify_diag_zeros(n, k, trials, seed, frac=0.95, quantile=0.99, **_):
    zeros = diag_zero_counts(n, k, trials, seed)
    need = frac * k / 2
    ok = float(np.mean(zeros >= need))
    p = _fmt(n=n, k=k, trials=trials, seed=seed, need=need)
    return [_at_least("diag-zeros", p, "fraction_with_enough_zeros", ok, quantile)]


VERIFIERS = {
    "matching-size": verify_matching_size,
    "claim-rate": verify_claim_rate,
    "iso": verify_iso,
    "vc-size": verify_vc_size,
    "cover-rate": verify_cover_rate,
    "diag-zeros": verify_diag_zeros,
}


def run_protocol(kind, n, k, trials, seed, alg, C=1.0, runs=None, min_success=0.9, workers=1,
                 sampler=sample_packed_instance, trial_rows=None):
    """End-to-end protocol trials. ``trial_rows`` (a list) receives one dict per trial."""
    if kind == "matching":
        proto = MatchingProtocol(MatchRunConfig(n, k, C, runs), alg)
        runs = proto.cfg.runs
    elif kind == "vc":
        proto = VCProtocol(VCRunConfig(n, k, C, runs if runs is not None else 40), alg)
        runs = proto.cfg.runs
    else:
        raise ValueError(f"unknown protocol kind {kind!r}")

    def record(t, ans, truth, bits):
        if trial_rows is not None:
            trial_rows.append({
                "trial": t,
                "answer": "fail" if ans is FAIL else ans,
                "truth": truth,
                "correct": int(ans is not FAIL and ans == truth),
                "total_bits": bits,
            })

    stats = evaluate_protocol(proto, lambda rng: sampler(n, k, rng), trials, seed, workers, record)
    p = _fmt(kind=kind, n=n, k=k, C=C, runs=runs, trials=trials, seed=seed)
    rows = [
        _at_least(f"protocol-{kind}", p, "success_rate", stats.success_rate, min_success),
        ReportRow(f"protocol-{kind}", p, "wrong_bits", stats.wrong, 0.0, -float(stats.wrong), True),
        ReportRow(f"protocol-{kind}", p, "fail_rate", stats.fails / trials, 1.0, 1 - stats.fails / trials, True),
        ReportRow(f"protocol-{kind}", p, "mean_bits", stats.mean_bits, stats.max_bits, 0.0, True),
        ReportRow(f"protocol-{kind}", p, "max_bits", stats.max_bits, stats.max_bits, 0.0, True),
    ]
    return rows, stats


def dense_random_stream(n, seed, bipartite=True, density=0.5, delete_frac=0.25) -> GraphStream:
    """Insert each possible edge with probability ``density`` in random order,
    then delete a random ``delete_frac`` of them in random order."""
    rng = derive_rng(seed, n, "dense-stream")
    if bipartite:
        u, v = np.nonzero(rng.random((n, n)) < density)
    else:
        iu, iv = np.triu_indices(n, 1)
        pick = rng.random(len(iu)) < density
        u, v = iu[pick], iv[pick]
    order = rng.permutation(len(u))
    u, v = u[order] + 1, v[order] + 1
    drop = rng.permutation(len(u))[: int(delete_frac * len(u))]
    return GraphStream.inserts(n, u, v, bipartite) + GraphStream.deletes(n, u[drop], v[drop], bipartite)


def space_curve(alg_name, ns, seed, expected_slope=None, slope_tol=None, **params):
    """Snapshot bits after a dense random stream, for each n, with a log-log fit.

    Returns ``(points, rows)``; ``points`` is a list of ``(n, bits)``.
    """
    if alg_name == "group-contraction":
        params.setdefault("bipartite", False)
    make = make_algorithm(alg_name, **params)
    points = []
    for n in ns:
        alg = make(n)
        alg.process_stream(dense_random_stream(n, seed, bipartite=alg.bipartite))
        points.append((n, alg.snapshot().bit_length))
    xs, ys = np.log([p[0] for p in points]), np.log([p[1] for p in points])
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(points) > 1 else 0.0
    if expected_slope is None:
        expected_slope = 2 - 2 * params["epsilon"] if alg_name == "group-contraction" else 2.0
    if slope_tol is None:
        slope_tol = 0.3 if alg_name == "group-contraction" else 0.1
    p = _fmt(alg=alg_name, ns="/".join(map(str, ns)), seed=seed, **params)
    dev = abs(slope - expected_slope)
    rows = [ReportRow("space-curve", p, "loglog_slope", slope, expected_slope, slope_tol - dev, dev <= slope_tol)]
    return points, rows


def generate_fixtures(kind, out_dir, seed, n=8, k=4, m=25) -> list[Path]:
    """Deterministic fixtures in the documented text formats."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = derive_rng(seed, 0, f"gen-{kind}")
    if kind == "ind":
        V = rng.integers(0, 2, m)
        ell = int(rng.integers(1, m + 1))
        path = out / "ind.txt"
        path.write_text(f"{m} {ell}\n{''.join(map(str, V.tolist()))}\n")
        return [path]
    if kind == "bind":
        _check_window(n, k)
        side = n - k
        inst = IndInstance(rng.integers(0, 2, side * side), int(rng.integers(1, side * side + 1)))
        b = pack_ind_to_bind(inst, n, k)
        mpath, qpath, vpath = out / "bind_matrix.txt", out / "bind_query.txt", out / "bind_vector.txt"
        b.A.save(mpath)
        qpath.write_text(f"{n} {k} {b.x} {b.y}\n")
        vpath.write_text(f"{inst.m} {inst.ell}\n{''.join('1' if v else '0' for v in inst.V)}\n")
        return [mpath, qpath, vpath]
    if kind == "stream":
        s = dense_random_stream(n, seed, bipartite=True)
        assert validate_stream(s) is None
        path = out / "stream.txt"
        s.save(path)
        return [path]
    if kind == "graph":
        A = random_matrix(n, rng)
        iu, iv = np.nonzero(np.triu(A.bits, 1))
        g = GeneralGraph(n, zip((iu + 1).tolist(), (iv + 1).tolist()))
        path = out / "graph.txt"
        g.save(path)
        return [path]
    raise ValueError(f"unknown fixture kind {kind!r}")


def read_ind_fixture(path) -> IndInstance:
    head, bits = Path(path).read_text().split("\n")[:2]
    m, ell = map(int, head.split())
    V = np.array([c == "1" for c in bits.strip()], dtype=bool)
    if len(V) != m:
        raise ValueError("length mismatch in Ind fixture")
    return IndInstance(V, ell)

