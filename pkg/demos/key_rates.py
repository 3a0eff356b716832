"""Conference key rates of measured states, with and without quantum side information."""

import numpy as np

from qconf import DimProfile, Instrument, MultipartiteState, example_ghz, key_rate_c, key_rate_cq, purify


def basis_for(state):
    return [Instrument.basis(lab, state.profile.dims[state.profile.index(lab)]) for lab in state.party_labels]


# GHZ3 measured in the computational basis: one shared random bit, nothing to broadcast
ghz = example_ghz(3)
rep = key_rate_cq(ghz, basis_for(ghz))
print("GHZ3:", rep.raw, "bits, CO total", rep.r_co)

# a classically correlated pair whose bits are copied to Eve: no key
rho = np.zeros((8, 8))
rho[0, 0] = rho[7, 7] = 0.5
copy = MultipartiteState(rho, DimProfile([2, 2, 2], ["A1", "A2", "E"]), eve_index=2)
print("Eve holds a copy:", key_rate_c(copy, basis_for(copy)).raw)

# noisy EPR pair with Eve holding the purification
for noise in (0.0, 0.05, 0.1, 0.2):
    mixed = (1 - noise) * example_ghz(2).matrix + noise * np.eye(4) / 4
    st = purify(MultipartiteState(mixed, DimProfile([2, 2])), env_label="E")
    rep = key_rate_cq(st, basis_for(st))
    print(f"noise {noise:4.2f}: S(X|E) = {rep.witness['S(X|E)']:.4f}, CO = {rep.r_co:.4f}, rate = {rep.raw:+.4f}")

# the rate region itself: which subsets bind at the optimum
st = purify(MultipartiteState(0.9 * example_ghz(2).matrix + 0.1 * np.eye(4) / 4, DimProfile([2, 2])), env_label="E")
rep = key_rate_cq(st, basis_for(st))
print("optimal CO rates:", rep.optimal_rates)
for c in rep.binding_constraints:
    print("  binding:", sorted(c.subset), round(c.bound, 4))
