"""Strict-turnstile streams and the snapshot Alice sends.

An algorithm's whole state is its snapshot. Cutting a stream anywhere, running
the prefix, serializing, restoring and running the suffix gives the same answer
as one pass over the whole stream.
"""

from functools import partial

from turnstile_lab.algorithms import StoreAll
from turnstile_lab.stream import DELETE, INSERT, GraphStream, Snapshot, run_split, run_stream, validate_stream

n = 4
stream = GraphStream.from_updates(n, [
    (1, 1, INSERT), (1, 2, INSERT), (2, 2, INSERT), (3, 3, INSERT),
    (1, 1, DELETE), (4, 1, INSERT), (2, 2, DELETE), (2, 1, INSERT),
])
print(stream.to_text())
print("valid:", validate_stream(stream) is None)

make = partial(StoreAll, n)
whole = run_stream(make, stream)
print("matching from one pass:", whole)

for cut in (0, 3, 8):
    snap, out = run_split(make, stream[:cut], stream[cut:])
    wire = snap.to_bytes()
    assert Snapshot.from_bytes(wire) == snap
    print(f"cut at {cut}: snapshot {snap.bit_length} bits, output {out}")

bad = stream + GraphStream.from_updates(n, [(3, 4, DELETE)])
print("deleting an absent edge:", validate_stream(bad))
