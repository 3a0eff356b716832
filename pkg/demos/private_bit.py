"""Private bits: key registers whose secrecy is held up by a shield."""

import numpy as np

from qconf import default_pbit, example_pbit, key_rate_cq
from qconf.families import PbitShieldError
from qconf.states import Instrument

pb = default_pbit()
print("profile:", pb.profile.labels, pb.profile.dims)

# measure only the key register of each player; the shield stays quantum
key_only = [Instrument.from_povm(lab, [np.kron(np.diag(e), np.eye(2)) for e in np.eye(2)]) for lab in ("A1", "A2")]
print("key rate:", key_rate_cq(pb, key_only).raw)

# flipping Eve's half of a GHZ shield still leaves her marginal maximally mixed
ghz = np.zeros(8)
ghz[0] = ghz[7] = 2**-0.5
flip_eve = np.kron(np.eye(4), [[0, 1], [1, 0]])
ok = example_pbit(2, ghz, [2, 2], 2, [np.eye(8), flip_eve])
print("accepted, key rate:", key_rate_cq(ok, key_only).raw)

# a product shield with Eve's qubit flipped tells her the key, so it is rejected
zero = np.zeros(2)
zero[0] = 1
try:
    example_pbit(2, zero, [1], 2, [np.eye(2), [[0, 1], [1, 0]]])
except PbitShieldError as err:
    print("rejected:", err, "deviation", err.deviation)
