"""
Convexity can fail without self-similarity
==========================================

For self-similar generations the projected length sequence is convex, and
everything in 02_certificate.py leans on that.  It is tempting to hope the
same holds for the r-neighborhood measures |E(b^-n)| of an arbitrary set
E.  It does not, and a one-dimensional example already breaks it.

Take E = {0, 1/4, 1/2, ..., 100}, the quarter-integer lattice, and measure
its b^-n neighborhoods with b = 4.  At n = 0 the balls merge into one long
interval; at n = 1 they barely touch; from n = 2 on they are disjoint and
the measure just scales by 1/4.  The kink at n = 1 kills convexity.
"""

from fractions import Fraction

from favardlab import (
    check_convexity,
    neighborhood_sequence,
    section_lattice,
    seesaw_builder,
)

###############################################################################
# The lattice sequence, exactly.

seq = neighborhood_sequence(section_lattice(), 4, 4)
print("n   |E(4^-n)|")
for n, m in seq:
    print(f"{n}   {str(m):>8}  = {float(m):.5f}")

rep = check_convexity([m for _, m in seq])
print(f"\nconvex: {rep.convex}, first violation at k = {rep.first_violation}")
for k, margin in rep.margins:
    sign = "ok " if margin >= 0 else "BAD"
    print(f"  k={k}: second difference {str(margin):>8}  {sign}")

###############################################################################
# Worse is possible: superimposing lattices of very different spacings
# makes the margins alternate in sign, a seesaw.  Stage (c, s, e) drops
# 2e+1 points with spacing s around center c.

result = seesaw_builder([(0, Fraction(1, 4), 5), (20, Fraction(1, 64), 3)],
                        base=4, n_max=5)
print("\nseesaw of spacings 1/4 and 1/64, base 4:")
print("n   measure")
for n, m in result.sequence:
    print(f"{n}   {m}")
signs = ["+" if m >= 0 else "-" for _, m in result.convexity.margins]
print(f"second-difference signs: {' '.join(signs)}")
print(f"overlap warnings: {list(result.overlaps) or 'none'}")
