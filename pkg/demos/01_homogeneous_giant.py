"""
The giant strongly connected component of D(n, c/n)
====================================================

Every ordered pair of vertices is an arc with probability c/n.  For c > 1 a
strongly connected component holding a fraction rho^2 of the vertices
appears, where rho solves rho = 1 - exp(-c rho).
"""

import numpy as np

from giantscc import compute_scc, giant_fraction, sample_digraph, validate_model

# %%
# The analytic prediction comes from the forward and backward branching
# processes; in the homogeneous case they coincide.
model = validate_model([1.0], [[2.0]])
rho, detail = giant_fraction(model)
print(f"survival probability {detail.rho_x[0]:.6f}, predicted giant fraction {rho:.6f}")

# %%
# Sample a few digraphs and compare the largest component with the prediction.
n = 50_000
for seed in range(3):
    g = sample_digraph(model.spec(n), seed)
    s = compute_scc(g)
    print(f"seed {seed}: {g.arc_count} arcs, N1/n = {s.n1 / n:.4f}, N2 = {s.n2}")

# %%
# Sweeping c through 1 shows the phase transition: below 1 every component is
# tiny, above 1 the largest one grows linearly in n.
for c in (0.5, 0.9, 1.1, 1.5, 2.0, 3.0):
    m = validate_model([1.0], [[c]])
    frac = compute_scc(sample_digraph(m.spec(n), 7)).n1 / n
    print(f"c={c:3.1f}  predicted {giant_fraction(m)[0]:.4f}  observed {frac:.4f}")
