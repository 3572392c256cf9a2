"""
Matching one synthetic P3P instance
===================================

Ten 3D points are seen by one camera, and the image list is shuffled.
Every sampled 4-tuple of candidate correspondences gives two overlapping
P3P quartics in the depth ratio b/a.  Correct tuples give quartics with a
common root, so their resultant is tiny and their affinity is close to one.
"""

import numpy as np

from polymatch.matching import accuracy, assignment, discretize, power_iteration_sparse
from polymatch.sim import ExperimentConfig, generate_instance
from polymatch.tensor import build_tensor, edge_resultants, sample_hyperedges

cfg = ExperimentConfig(kind="p3p", instances=1)
inst = generate_instance(cfg, np.random.default_rng(3))
print("true column of each point:", inst.ground_truth)

# a correct 4-tuple and the same tuple with its last column swapped
good = np.stack([np.arange(4), inst.ground_truth[:4]], axis=-1)
bad = good.copy()
bad[-1, 1] = inst.ground_truth[4]
r = edge_resultants("p3p", inst, np.stack([good, bad]))
print(f"resultant, correct tuple: {r[0]:.2e}   one wrong: {r[1]:.2e}")

# random tuples: only a handful of the 20000 are fully correct
edges = sample_hyperedges(*inst.shape, 4, 20000, seed=3)
exact = np.all(inst.ground_truth[edges[..., 0]] == edges[..., 1], axis=1)
print("fully correct tuples sampled:", int(exact.sum()))

H = build_tensor("p3p", inst, edges)
print("stored entries:", len(H), " with affinity > 0.5:", int(np.sum(H.values > 0.5)))

X = power_iteration_sparse(H)
hard = discretize(X)
print("recovered columns:          ", assignment(hard))
print("accuracy:", accuracy(hard, inst.ground_truth, inst.n_inliers))
