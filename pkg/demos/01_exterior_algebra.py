"""Exact exterior algebra: wedges, supports, and decomposability.

Everything here runs over exact rationals, so rank decisions and support
computations carry no rounding risk.
"""

from fractions import Fraction

from projdyn.exactlin import (
    Multivector,
    is_decomposable,
    multivector_rank,
    support,
    vector,
    wedge,
    wedge_power,
)

print("A bivector built from two vectors is decomposable by construction:")
x = vector(4, [1, 2, 0, Fraction(1, 3)])
y = vector(4, [0, 1, -1, 2])
pi = wedge(x, y)
print("  x ^ y =", dict(pi.coords))
print("  decomposable?", is_decomposable(pi))
print("  its support recovers span{x, y}:")
for v in support(pi):
    print("   ", v)

print()
print("The sum of two independent planes is not decomposable:")
sigma = Multivector(4, 2, {(0, 1): 1, (2, 3): 1})
print("  sigma = e0^e1 + e2^e3, sigma ^ sigma =", dict(wedge(sigma, sigma).coords))
print("  decomposable?", is_decomposable(sigma), " rank:", multivector_rank(sigma))

print()
print("Wedge powers detect the rank: the largest nonvanishing power of a")
print("bivector of rank 2m is the m-th.")
for m in (1, 2):
    print(f"  sigma^{m} nonzero?", not wedge_power(sigma, m).is_zero())

print()
print("The support of a power can only shrink, and at full rank it matches:")
print("  supp(sigma^2):", support(wedge_power(sigma, 2)))
print("  supp(sigma)  :", support(sigma))
