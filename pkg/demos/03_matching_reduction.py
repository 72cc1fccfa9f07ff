"""A matching algorithm answers a bi-index query.

Each run masks Alice's matrix with a shared random matrix, relabels rows and
columns, and streams the resulting bipartite graph. Bob deletes the window
edges he knows about, keeps the diagonal through his corner, trims the output
matching, and checks whether the relabelled corner edge survived. A hit means
the masked corner bit is 1.
"""

import numpy as np

from turnstile_lab.algorithms import StoreAll, SubsampleMatching
from turnstile_lab.bind import sample_uniform_instance
from turnstile_lab.matching_reduction import MatchRunConfig, claim_prob_bounds, solve_bind
from turnstile_lab.matrix import derive_rng
from functools import partial

n, k = 96, 88
cfg = MatchRunConfig(n, k, C=1.0, runs=30)
print(f"n={n} k={k} trim target tau={cfg.tau}")
lo, hi = claim_prob_bounds(cfg.C, n, k)
print(f"per-run claim probability should sit in [{lo:.3f}, {hi:.3f}]")

exact = []
for t in range(10):
    inst = sample_uniform_instance(n, k, derive_rng(1, t))
    res = solve_bind(inst, cfg, StoreAll, seed=t)
    exact.append(res.answer == inst.answer)
    print(f"trial {t}: truth {inst.answer} answer {res.answer} "
          f"claims p0={res.detail.p0} p1={res.detail.p1} bits={res.total_bits}")
print("exact algorithm accuracy:", np.mean(exact))

# An algorithm that forgets every edge gives Bob nothing, so he guesses 1.
blind = partial(SubsampleMatching, p=0.0, seed=0)
res = solve_bind(inst, cfg, blind, seed=0)
print("blind algorithm answer:", res.answer, "with", res.detail.p, "claims")
