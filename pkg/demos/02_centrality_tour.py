"""Tour of the electrical centrality measures derived from the diagonal."""

import numpy as np

import lapdiag as ld

g = ld.generate_test_graph("erdos_renyi", 200, seed=9, p=0.04)
print(f"graph: n={g.n}, m={g.m}")

est = ld.approx_diag(g, ld.ApproxParams(eps=0.3, seed=1))

closeness = ld.electrical_closeness(est).values
betweenness = ld.nrwb(est).values
print("\ntop five vertices by electrical closeness:")
for v in np.argsort(-closeness)[:5]:
    print(f"  vertex {v:>3}: closeness {closeness[v]:.4f}, "
          f"random-walk betweenness {betweenness[v]:.4f}, degree {g.degree(v)}")

print(f"\nKirchhoff index (n * trace): {ld.kirchhoff_index(est):.1f}")
exact = ld.exact_diag_estimate(g)
print(f"exact value for reference  : {ld.kirchhoff_index(exact):.1f}")

# per-edge effective resistances from tree-inclusion frequencies
scores = ld.spanning_edge_resistance(g, eps=0.1, seed=4)
print(f"\nspanning-edge resistance over {scores.provenance['q']} trees")
print(f"Foster check sum w(e)*r(e) = {scores.values.sum():.3f} "
      f"(combinatorial identity: n-1 = {g.n - 1})")

# Kirchhoff edge centrality: damage to total resistance when an edge decays
theta = 0.5
kec = ld.kirchhoff_edge_centrality(g, theta=theta, oracle_mode=True)
worst = np.argsort(-kec.values)[:3]
print(f"\nmost critical edges at theta={theta}:")
for e in worst:
    u, v = g.edge_array[e]
    print(f"  ({u}, {v}): Kirchhoff-index increase {kec.values[e]:.3f}")
