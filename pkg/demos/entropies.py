"""Entropies, conditional entropies and distances on a few small states."""

import numpy as np

from qconf import DimProfile, example_ghz, random_state, fidelity, trace_distance, von_neumann_entropy
from qconf.linalg import coherent_information, conditional_entropy, partial_trace

ghz = example_ghz(3)
rho, prof = ghz.matrix, ghz.profile
print("parties:", prof.labels, "dims:", prof.dims)

# the whole state is pure, every single party is maximally mixed
print("S(A1A2A3) =", round(von_neumann_entropy(rho), 12))
for k in range(3):
    print(f"S(A{k + 1})    =", round(von_neumann_entropy(partial_trace(rho, prof, [k])), 12))

# tracing one party out leaves a classically correlated pair
pair = partial_trace(rho, prof, [0, 2])
print(np.round(pair.real, 3))

# conditioning on the other two parties gives a negative value
print("S(A1|A2A3) =", conditional_entropy(rho, prof, [0], [1, 2]))
print("I(A1>A2A3) =", coherent_information(rho, prof, [0], [1, 2]))

# trace distance against fidelity for a noisy copy
noisy = 0.8 * rho + 0.2 * np.eye(8) / 8
f, t = fidelity(rho, noisy), trace_distance(rho, noisy)
print(f"F = {f:.4f}, T = {t:.4f}, 1 - F = {1 - f:.4f} <= T <= sqrt(1 - F^2) = {np.sqrt(1 - f * f):.4f}")

# same numbers through the state object, with a cache
st = random_state(DimProfile([2, 3], ["A", "B"]), rank=2, seed=1)
print("S(A), S(B), S(AB):", [round(st.entropy(p), 4) for p in ([0], [1], [0, 1])])
