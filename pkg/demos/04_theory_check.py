"""
Where a two-channel SGNN must fail
==================================

In an unbalanced triangle two endpoints of the negative edge have
identical 2-hop ego-trees, so the network gives them identical
embeddings no matter the weights.
"""

import numpy as np

from csg.sgnn import SgnnModel, forward
from csg.wl_check import (build_ego_tree, canonical_encoding, check_adequacy, ego_tree_isomorphic,
                          signed_wl, verify_theorems)
from csg.signed_graph import SignedGraph

# i=0, j=1, k=2, with the i-j edge negative
tri = SignedGraph(3, [(0, 1, -1), (0, 2, 1), (1, 2, 1)])
trees = [build_ego_tree(tri, v, 2) for v in range(3)]
print("tau_i:", canonical_encoding(trees[0]))
print("tau_i ~ tau_j:", ego_tree_isomorphic(trees[0], trees[1])[0])
print("tau_i ~ tau_k:", ego_tree_isomorphic(trees[0], trees[2])[0])
print("WL label pairs after 2 rounds:", signed_wl(tri, 2).at(2))

# featureless nodes share one input vector
X = np.tile(np.random.default_rng(0).uniform(-1, 1, 8), (3, 1))
H = forward(tri, SgnnModel.init(8, hidden=8, head_hidden=0, seed=3), X)
print("|H_i - H_j| =", np.linalg.norm(H[0] - H[1]))
rep = check_adequacy(tri, H)
print("inadequate nodes:", sorted(rep.inadequate_nodes), "edges:", sorted(rep.inadequate_edges))

# the full harness over the 3/4/5/6-cycle fixtures
print()
print(verify_theorems(draws=10).to_text())
