"""projdyn: projective dynamics and the algebra of its first integrals.

The package splits into an exact half and a numerical half.  The exact half
(`exactlin`, `young`, `polyintegrals`, `curvclass`, `compat`) works over
rational scalars throughout, because the rank/kernel/classification decisions
it makes are brittle under rounding.  The numerical half (`screens`) integrates
motion on screens in double precision and talks to the exact half only through
tolerance-tagged comparisons.
"""

from projdyn import exactlin, young, polynomials, polyintegrals, screens, curvclass, compat

__all__ = [
    "exactlin",
    "young",
    "polynomials",
    "polyintegrals",
    "screens",
    "curvclass",
    "compat",
]

__version__ = "0.1.0"
