"""torsion-lab: exact-arithmetic toolkit for elliptic-curve torsion.

Division polynomials, torsion subgroups over Q and quadratic fields,
genus-zero torsion-family certification, Frobenius statistics, and
height-ordered censuses — all in exact rational / quadratic-field
arithmetic, no floating point in any mathematical path.
"""

__version__ = "0.1.0"
