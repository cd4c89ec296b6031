"""Is a quadratic first integral the Hamiltonian for some screen?

The end-to-end test: homogenize the velocity-quadratic leading term,
polarize into a curvature-type form, quotient out its kernel (a cylindric
reduction), and classify.  A quadric verdict means the integral becomes
the Hamiltonian after projecting the dynamics onto that quadric; a
hyperplane verdict keeps (or moves to) an affine screen.
"""

from fractions import Fraction

from projdyn import compat as cp
from projdyn import screens as sc
from projdyn.polyintegrals import ScreenIntegral, qvar, vvar

flat3 = sc.flat_screen(3)

print("1. The oscillator integral T = v0 v1 on the plane:")
rep = cp.hamiltonian_test(ScreenIntegral(flat3, vvar(0, 3) * vvar(1, 3)))
print("   verdict:", rep.verdict, "| phi:", rep.witnesses["phi"])
print("   g on the tangent plane (the polarized form of v0 v1):", rep.witnesses["g"])
print("   so v0 v1 + x0 x1 is conserved by the oscillator, as the energy of the")
print("   pre-Lagrangian v0 v1 - x0 x1:")
Z = cp.SecondOrderSystem.oscillator(2)
L = cp.yvar(0, 2) * cp.yvar(1, 2) - cp.xvar(0, 2) * cp.xvar(1, 2)
print("   E =", cp.energy_integral(L, Z))

print()
print("2. A spherical kinetic term fed with the flat reference screen:")
x0, x1 = qvar(0, 3), qvar(1, 3)
w0, w1 = vvar(0, 3), vvar(1, 3)
T = (x0 * w1 - x1 * w0) ** 2 + w0 ** 2 + w1 ** 2
rep = cp.hamiltonian_test(ScreenIntegral(flat3, T))
print("   verdict:", rep.verdict, "(the integral becomes the Hamiltonian after")
print("   changing to the quadric screen)", "| g:", rep.witnesses["g"])

print()
print("3. A term that is not the leading part of any first integral:")
rep = cp.hamiltonian_test(ScreenIntegral(flat3, x0 * w0 * w1))
print("   verdict:", rep.verdict, "| reason:", rep.witnesses["reason"])

print()
print("4. A degenerate direction triggers the cylindric reduction:")
rep = cp.hamiltonian_test(ScreenIntegral(sc.flat_screen(4), vvar(0, 4) * vvar(1, 4)))
print("   verdict:", rep.verdict, "| kernel:", rep.kernel_basis)
print("   inner verdict:", rep.inner.verdict, "| inner g:", rep.inner.witnesses["g"])

print()
print("5. The presymplectic route recovers the potential completing T to a")
print("   pre-Lagrangian:")
T_kin = (cp.yvar(0, 2) ** 2 + cp.yvar(1, 2) ** 2).scale(Fraction(1, 2))
ok, U = cp.presymplectic_check(T_kin, Z)
print("   accepted?", ok, "| recovered potential U =", U)
