"""Young symmetrizers and the curvature symmetry class.

The square tableau with two boxes per column carves out, through the
composite AS, the space of quadrilinear forms with the symmetries of a
curvature tensor: pair antisymmetries plus the cyclic (first-kind Bianchi)
identity.  Membership is a finite list of exact identities.
"""

import itertools
from fractions import Fraction

from projdyn.exactlin import Tensor, basis_tensor
from projdyn.young import (
    YoungTableau,
    antisymmetrize_A,
    check_imAS,
    imAS_basis,
    symmetrize_S,
    young_scalar,
)

square = YoungTableau.from_columns([2, 2])
print("Tableau with columns [2, 2]:", square, "rows:", square.rows)
print("Its scalar: A S A S = lambda * A S with lambda =", young_scalar(square))

print()
print("Apply S then A to a basis 4-tensor:")
t = basis_tensor(3, (0, 1, 0, 2))
image = antisymmetrize_A(square, symmetrize_S(square, t))
print(f"  AS(e_0102) has {len(image.entries)} terms; in the class?",
      check_imAS(square, image))

print()
print("The curvature form of a metric b, R(u,v;w,x) = b(u,w)b(v,x) - b(u,x)b(v,w):")
b = [[2, 1, 0], [1, 1, 0], [0, 0, 3]]
entries = {}
for u, v, w, x in itertools.product(range(3), repeat=4):
    val = b[u][w] * b[v][x] - b[u][x] * b[v][w]
    if val:
        entries[(u, v, w, x)] = Fraction(val)
riemann = Tensor(3, 4, entries)
print("  satisfies the column identities?", check_imAS(square, riemann))

print()
print("A fully antisymmetric 4-form fails: its cyclic sum is 3 * itself.")
vol_entries = {}
for perm in itertools.permutations(range(4)):
    sign, p = 1, list(perm)
    for i in range(4):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    vol_entries[perm] = Fraction(sign)
vol = Tensor(4, 4, vol_entries)
print("  in the class?", check_imAS(square, vol))

print()
print("Dimensions of the class over small spaces (rank of the AS image):")
for dim in (3, 4, 5):
    print(f"  dim {dim}: {len(imAS_basis(square, dim))}")
