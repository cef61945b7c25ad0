"""
Several vertex types, irreducible and reducible
===============================================

With types, the offspring means are M_X[i, j] = p_ij q_j (forward) and
M_Y[i, j] = p_ji q_j (backward).  When the type digraph D_P is not strongly
connected, the prediction is the largest per-class sum.
"""

import numpy as np

from giantscc import compute_scc, giant_fraction, mean_matrices, sample_digraph, spectral_radius, validate_model
from giantscc.branching import is_irreducible

n = 60_000

# %%
# An asymmetric two-type model: forward and backward survival differ by type.
model = validate_model([0.3, 0.7], [[0.5, 4.0], [1.0, 1.2]])
mx, my = mean_matrices(model)
rho, res = giant_fraction(model)
print("forward survival ", np.round(res.rho_x, 4))
print("backward survival", np.round(res.rho_y, 4))
print(f"Perron root {spectral_radius(mx):.4f} (same for M_Y: {spectral_radius(my):.4f})")
g = sample_digraph(model.spec(n), 1)
print(f"predicted {rho:.4f}, observed {compute_scc(g).n1 / n:.4f}")

# %%
# A reducible model: the types never communicate, so each class has its own
# giant candidate and only the supercritical one matters.
red = validate_model([0.5, 0.5], [[3.0, 0.0], [0.0, 0.5]])
rho, res = giant_fraction(red)
print("irreducible:", is_irreducible(red))
for types, r in res.type_scc_rho:
    print(f"  class {types}: rho_m = {r:.4f}")
print(f"predicted {rho:.4f}, observed {compute_scc(sample_digraph(red.spec(n), 2)).n1 / n:.4f}")
