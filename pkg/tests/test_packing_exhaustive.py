import numpy as np

from turnstile_lab.bind import IndInstance, bob_view_from_suffix, pack_ind_to_bind


def packing_sweep(ns=range(4, 13), seed=0):
    """Mismatch count over every (n, k, ell): suffix-built view vs full-matrix view, and A[x,y] vs V_ell."""
    rng = np.random.default_rng(seed)
    bad = checked = 0
    for n in ns:
        for k in range(1, n):
            m = (n - k) ** 2
            V = rng.integers(0, 2, m).astype(bool)
            for ell in range(1, m + 1):
                inst = IndInstance(V, ell)
                b = pack_ind_to_bind(inst, n, k)
                view = bob_view_from_suffix(inst.suffix, ell, n, k)
                full = b.bob_side()
                ok = np.array_equal(view.window, full.window) and (view.x, view.y) == (full.x, full.y)
                ok &= b.answer == inst.answer
                # unpack: top-left region read row-major gives V back
                ok &= np.array_equal(b.A.bits[: n - k, : n - k].reshape(-1), V)
                bad += not ok
                checked += 1
    return bad, checked


def test_packing_small_sweep():
    bad, checked = packing_sweep(range(2, 8))
    assert checked > 0 and bad == 0
