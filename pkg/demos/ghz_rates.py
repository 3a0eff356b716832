"""GHZ distillation rates: measurement based, combing, and spanning trees."""

import numpy as np

from qconf import (
    DimProfile,
    EdgeWeightGraph,
    Instrument,
    MultipartiteState,
    combing_ghz_rate,
    eoa_lower_bound,
    example_ghz,
    ghz_rate_c,
    ghz_rate_cq,
    min_cut_coherent_information,
    tree_ghz_rate,
    tree_ghz_rate_from_state,
)
from qconf.linalg import projector

ghz = example_ghz(3)
basis = [Instrument.basis(lab, 2) for lab in ghz.party_labels]
print("measure-and-broadcast, cq :", ghz_rate_cq(ghz, basis).raw)
print("measure-and-broadcast, c  :", ghz_rate_c(ghz, basis).raw)

res = combing_ghz_rate(ghz)
print("combing:", res.to_dict())

# pairwise entanglement available between each two parties with help from the third
for i, j in [(0, 1), (0, 2), (1, 2)]:
    print(f"  pair {i}{j}: min-cut {min_cut_coherent_information(ghz, i, j):.3f}, EoA bound {eoa_lower_bound(ghz, i, j):.3f}")
print("tree route:", tree_ghz_rate_from_state(ghz).to_dict())

# a weighted triangle where the best tree avoids the weak edge
g = EdgeWeightGraph(3, {(0, 1): 2, (0, 2): 2, (1, 2): 1})
print("weighted triangle:", tree_ghz_rate(g).to_dict())

# an EPR pair between A1 and A2 with an unentangled A3: no GHZ by any route
v = np.zeros(8)
v[0] = v[6] = 2**-0.5
spect = MultipartiteState(projector(v), DimProfile([2, 2, 2]))
print("EPR + spectator, combing:", combing_ghz_rate(spect).rate, " tree:", tree_ghz_rate_from_state(spect).rate)
