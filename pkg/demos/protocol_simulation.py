"""Exact finite-block runs of measure, bin, decode and hash."""

import numpy as np

from qconf import DimProfile, Instrument, MultipartiteState, ProtocolSpec, example_ghz, key_rate_cq, purify, run_protocol

mixed = 0.9 * example_ghz(2).matrix + 0.1 * np.eye(4) / 4
st = purify(MultipartiteState(mixed, DimProfile([2, 2])), env_label="E")
basis = [Instrument.basis(lab, 2) for lab in st.party_labels]

# asymptotically about 0.21 bits per copy; at small n the figures are far from that
print(key_rate_cq(st, basis).to_dict())

# reliability 1 with secrecy 0.5 means the hash sent every decoded string to the same key
# sweep the block length and the number of bins player 1 reveals; player 2 stays silent
for n in (1, 2, 3, 4):
    for bins in sorted({1, 2, 2**n}):
        spec = ProtocolSpec(basis, n, [bins, 1], key_size=2, hash_seed=11)
        rep = run_protocol(st, spec)
        print(f"n={n} bins={bins:2d}: reliability {rep.reliability:.4f}  secrecy {rep.secrecy:.4f}  "
              f"transcript {rep.transcript_rate_bits:.2f} bits/copy")

# ML is optimal for classical side information; the pretty good measurement need not be on the same instance
for decoder in ("ML", "PGM"):
    spec = ProtocolSpec(basis, 3, [2, 1], key_size=2, hash_seed=11, decoder=decoder)
    print(decoder, run_protocol(st, spec).to_dict()["reliability"])

# same seed, same numbers
spec = ProtocolSpec(basis, 2, [4, 2], key_size=3, hash_seed=5)
print(run_protocol(st, spec).to_dict() == run_protocol(st, spec).to_dict())
