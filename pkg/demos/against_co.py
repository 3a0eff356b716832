"""A state where broadcasting everything wastes key, and a direct protocol that does not."""

import math

import numpy as np

from qconf import Instrument, against_co_local_information, direct_against_co_protocol, example_against_co, key_rate_c
from qconf.linalg import qft, random_unitary

d, k = 2, 2
st = example_against_co(d, k)
print("dims:", st.profile.dims, "eve:", st.eve_label)

# measure every register in its computational basis and do full omniscience
meas = [Instrument.basis(lab, st.profile.dims[st.profile.index(lab)]) for lab in st.party_labels]
print("omniscience route:", key_rate_c(st, meas).raw)

# broadcasting only the labels keeps log2 d secret bits
for d in (2, 4):
    rep = direct_against_co_protocol(d, 2, [np.eye(d), qft(d)])
    print(f"d={d}: reliability {rep.reliability}, secrecy {rep.secrecy:.1e}, key {rep.achieved_key_bits} bits")

# a player measuring its pair in any single basis learns at most half of log2 d
for d in (2, 4):
    rng = np.random.default_rng(d)
    best = max(against_co_local_information(d, random_unitary(d, rng)) for _ in range(50))
    print(f"d={d}: max I(Y;X) over 50 random bases = {best:.3f} (half of log2 d = {0.5 * math.log2(d)})")
