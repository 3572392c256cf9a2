"""
Resultants as a shared-root detector
====================================

Two polynomials share a root exactly when their Sylvester matrix is
singular.  On unit-norm coefficients the bottom-right entry of the QR
factor (or the smallest singular value) measures how close they are.
"""

import numpy as np

from polymatch.polynomials import normalize, resultant_magnitude, sylvester

# (x - 1)(x - 2) and (x - 1)(x + 1) share x = 1
p = [1.0, -3.0, 2.0]
q = [1.0, 0.0, -1.0]
print("Sylvester matrix:\n", sylvester(normalize(p), normalize(q)))
print("shared root   ->", resultant_magnitude(p, q))

# x^2 + 1 and x^2 - 1 have no root in common
print("coprime       ->", resultant_magnitude([1, 0, 1], [1, 0, -1]))

# the measure is smooth: moving one root away from the other grows it
for eps in (0.0, 1e-6, 1e-3, 1e-1):
    r = resultant_magnitude(np.poly([1.0, 2.0]), np.poly([1.0 + eps, -1.0]))
    s = resultant_magnitude(np.poly([1.0, 2.0]), np.poly([1.0 + eps, -1.0]), backend="svd")
    print(f"root gap {eps:7.0e}:  qr {r:.3e}   svd {s:.3e}")
