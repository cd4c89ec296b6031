"""First integrals of free motion are polynomials in the impulsion bivector.

Homogenizing a screen-level integral produces a polynomial invariant under
the shear v -> v + c q; conversely every such bi-homogeneous polynomial is
a polynomial in the Plucker coordinates q_i v_j - q_j v_i.  The operator
gdot differentiates a candidate integral along a projective force field,
exactly, including fields with an inverse-square profile.
"""

from fractions import Fraction

from projdyn import screens as sc
from projdyn.polynomials import Poly
from projdyn.polyintegrals import (
    BiHomogeneousPoly,
    dim_Pbb,
    exchange_value,
    gdot,
    homogenize_polynomial,
    plucker,
    vvar,
)

flat = sc.flat_screen(3)
print("Homogenize the flat kinetic energy (ambient dimension 3):")
T = (vvar(0, 3) ** 2 + vvar(1, 3) ** 2).scale(Fraction(1, 2))
R = homogenize_polynomial(T, flat)
print("  R(q, v) =", R)
print("  This is (p02^2 + p12^2)/2 in impulsion coordinates:",
      R == (plucker(3, 0, 2) ** 2 + plucker(3, 1, 2) ** 2).scale(Fraction(1, 2)))

print()
print("The exchange identity: R(v, q) = (-1)^b R(q, v) with b = 2 here.")
q = [Fraction(1), Fraction(2), Fraction(1)]
v = [Fraction(-1), Fraction(1), Fraction(0)]
print("  R(q, v), R(v, q) =", exchange_value(R, 3, q, v))

print()
print("The antisymmetric carrier reproduces the polynomial on its diagonal:")
form = BiHomogeneousPoly.from_poly(R, 3).antisymmetric()
print("  diagonal == R?", form.diagonal_poly() == R)

print()
print("Conservation along the Kepler field (attracting center on the flat screen):")
force = sc.kepler_force(1.0, [0.0, 0.0, 1.0])
L = plucker(3, 0, 1)
print("  angular momentum p01: gdot =", gdot(L, force).is_zero() and "0 (conserved)")
L_off = plucker(3, 0, 2)
print("  the component p02 is not conserved:", not gdot(L_off, force).is_zero())

print()
print("Dimension of the degree-b integrals over an n-dimensional screen:")
for n, b in [(2, 1), (2, 2), (3, 2), (3, 3)]:
    print(f"  n={n}, b={b}: {dim_Pbb(n, b)}")
