"""Packing an index instance into a bi-index instance.

Alice holds a bit vector; Bob holds a position and every bit after it. Laying
the vector row by row into the top-left corner of a matrix means the window
Bob needs lies entirely after his position, so he can rebuild it himself.
"""

import numpy as np

from turnstile_lab.bind import IndInstance, bob_view_from_suffix, pack_ind_to_bind

n, k = 9, 4
side = n - k
rng = np.random.default_rng(0)

V = rng.integers(0, 2, side * side)
ell = 12
inst = IndInstance(V, ell)
packed = pack_ind_to_bind(inst, n, k)

print("vector      :", "".join(map(str, V)))
print(f"position    : {ell} -> corner ({packed.x}, {packed.y})")
print("matrix:")
print(packed.A.to_text())

# Bob rebuilds his window from the suffix alone and gets the same view.
view = bob_view_from_suffix(inst.suffix, ell, n, k)
print("suffix view matches the matrix view:", np.array_equal(view.window, packed.bob_side().window))
print("answer bit A[x, y] =", packed.answer, "and V_ell =", inst.answer)

# A column-major layout with the same corner rule breaks the reconstruction.
try:
    bob_view_from_suffix(inst.suffix, ell, n, k, order="column")
except ValueError as exc:
    print("column-major layout:", exc)
