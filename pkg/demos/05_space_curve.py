"""How snapshot size grows with n.

Storing the adjacency bitmap costs about n^2 bits. Group contraction keeps one
counter per pair of groups; with n^(1-eps) groups that is roughly n^(2-2eps)
counters. The fitted log-log slopes show the difference.
"""

from turnstile_lab.harness import space_curve

ns = [64, 128, 256, 512]
for name, params in [("storeall", {}), ("group-contraction", {"epsilon": 0.5}), ("group-contraction", {"epsilon": 0.25})]:
    points, rows = space_curve(name, ns, seed=0, **params)
    label = name + "".join(f" {k}={v}" for k, v in params.items() if k != "bipartite")
    print(f"{label:32s} slope {rows[0].observed:.3f} (expected {rows[0].bound:.2f})")
    for n, bits in points:
        print(f"    n={n:4d}  {bits:9d} bits")
