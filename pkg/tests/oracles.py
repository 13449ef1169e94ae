"""Independent reference implementations used to check the package.

Everything here is deliberately naive and self-contained: plain Fraction
arithmetic, quadratic algorithms, no imports from the package under test.
The package must agree with these on small instances.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product


def union_measure(pairs) -> Fraction:
    """Measure of a union of closed intervals by elementary segments.

    Collects all endpoints, cuts the line into elementary segments, and
    adds up each segment that is covered by some input interval (checked
    at the segment midpoint).
    """
    pairs = [(Fraction(a), Fraction(b)) for a, b in pairs if Fraction(a) < Fraction(b)]
    if not pairs:
        return Fraction(0)
    cuts = sorted({x for ab in pairs for x in ab})
    total = Fraction(0)
    for left, right in zip(cuts, cuts[1:]):
        mid = (left + right) / 2
        if any(a <= mid <= b for a, b in pairs):
            total += right - left
    return total


def union_components(pairs) -> list:
    """Connected components of a union of closed intervals (touching glues)."""
    pairs = sorted((Fraction(a), Fraction(b)) for a, b in pairs
                   if Fraction(a) < Fraction(b))
    out = []
    for a, b in pairs:
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def cylinder_generation(maps, base, n) -> list:
    """Generation n by brute-force enumeration of all map compositions.

    maps: list of (ratio, offset) Fractions acting as x -> ratio*x + offset;
    base: (lo, hi).  Returns the merged component list.  Exponential in n.
    """
    lo, hi = Fraction(base[0]), Fraction(base[1])
    pieces = []
    for word in product(range(len(maps)), repeat=n):
        a, b = lo, hi
        for idx in reversed(word):
            r, c = maps[idx]
            a, b = r * a + c, r * b + c
        pieces.append((a, b))
    return union_components(pieces)


def project_point(chart, slope, x, y) -> Fraction:
    if chart == "x":
        return Fraction(x) + Fraction(slope) * Fraction(y)
    return Fraction(y) + Fraction(slope) * Fraction(x)


def project_square_ifs(maps2d, base2d, chart, slope):
    """Project planar homotheties (ratio, (dx, dy)) through a chart."""
    x0, y0, x1, y1 = (Fraction(v) for v in base2d)
    corners = [project_point(chart, slope, x, y)
               for x in (x0, x1) for y in (y0, y1)]
    maps1d = [(Fraction(r), project_point(chart, slope, dx, dy))
              for r, (dx, dy) in maps2d]
    return maps1d, (min(corners), max(corners))


def neighborhood_measure(points, radius) -> Fraction:
    """Exact measure of the union of [p - r, p + r]."""
    r = Fraction(radius)
    return union_measure([(Fraction(p) - r, Fraction(p) + r) for p in points])


def second_difference_margins(values) -> list:
    """(k, v[k-1] + v[k+1] - 2*v[k]) for interior k, exact."""
    vals = [Fraction(v) for v in values]
    return [(k, vals[k - 1] + vals[k + 1] - 2 * vals[k])
            for k in range(1, len(vals) - 1)]


def expand_components(pairs, radius) -> list:
    """Components of the union after growing every interval by radius."""
    r = Fraction(radius)
    grown = [(Fraction(a) - r, Fraction(b) + r) for a, b in pairs]
    return union_components(grown)
