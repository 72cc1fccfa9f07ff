"""Random strict-turnstile streams for tests."""

import numpy as np

from turnstile_lab.stream import DELETE, INSERT, GraphStream


def random_dynamic_stream(n, length, rng, bipartite=True, p_insert=0.65):
    present = []
    ups = []
    while len(ups) < length:
        if present and (rng.random() > p_insert):
            e = present.pop(int(rng.integers(len(present))))
            ups.append((*e, DELETE))
            continue
        u, v = (int(t) for t in rng.integers(1, n + 1, 2))
        if not bipartite:
            if u == v:
                continue
            u, v = min(u, v), max(u, v)
        if (u, v) in present:
            continue
        present.append((u, v))
        ups.append((u, v, INSERT))
    return GraphStream.from_updates(n, ups, bipartite)
