"""
Counting big vertices instead of components
===========================================

A vertex is big when truncated forward and backward explorations both
collect at least omega = ceil(ln n) vertices.  The fraction of big vertices
estimates the giant fraction without computing any component.
"""

from giantscc import big_fraction, compute_scc, default_omega, giant_fraction, sample_digraph, validate_model
from giantscc.exploration import big_fraction_estimate

model = validate_model([1.0], [[2.0]])
rho, _ = giant_fraction(model)
for n in (1_000, 10_000, 100_000):
    g = sample_digraph(model.spec(n), 3)
    w = default_omega(n)
    print(f"n={n:7d} omega={w:2d}  |B|/n={big_fraction(g, w):.4f}  N1/n={compute_scc(g).n1 / n:.4f}  rho={rho:.4f}")

# %%
# The estimate shrinks as omega grows, but only slowly once omega is past the
# sizes of the small components.
g = sample_digraph(model.spec(100_000), 4)
for w in (2, 5, 12, 50, 200):
    print(f"omega={w:4d}  |B|/n={big_fraction(g, w):.4f}")

# %%
# For very large graphs a vertex subsample gives an interval estimate.
est = big_fraction_estimate(g, 12, subsample=5_000, seed=1)
print(f"subsample: {est.fraction:.4f} in [{est.ci_low:.4f}, {est.ci_high:.4f}]")
