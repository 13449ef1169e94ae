"""Directions, sheared projections, and exact projected generations.

A direction is held as an exact rational slope in one of two charts:

* chart ``x``, slope t with |t| <= 1: functional p(x, y) = x + t*y,
  covering angles in [-pi/4, pi/4];
* chart ``y``, slope u with |u| <= 1: functional p(x, y) = y + u*x,
  covering angles in [pi/4, 3*pi/4].

Together the charts span a half period of directions (projected length has
period pi).  The sheared length equals the true projected length divided by
``scale = 1/sqrt(1 + slope^2)``, the single irrational factor in play; all
interval geometry happens on the sheared side in rational arithmetic.

Projecting a planar homothety system gives a 1D affine system
``T_i(x) = r_i x + p(beta_i)`` acting on the projection of the base
rectangle.  Generation n is computed by mapping the current *merged*
interval set through every map and renormalizing, which is exponentially
cheaper than enumerating cylinders whenever images overlap.  The engine
tracks one shared integer denominator so each step is pure integer work,
vectorized through int64 arrays when magnitudes allow and falling back to
Python integers otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, Union

import numpy as np

from .errors import SizeCapExceeded
from .ifs import IFS2D
from .intervals import (
    FloatIntervalSet,
    IntervalSet,
    MERGE_EPSILON,
    _INT64_SAFE,
    _lcm,
    _merge_scaled,
    merge_float_arrays,
    merge_int64_arrays,
    rational_str,
    to_fraction,
)

DEFAULT_MAX_COUNT = 50_000_000
DEFAULT_SLOPE_DENOMINATOR = 10 ** 6

_QUARTER_PI = math.pi / 4


@dataclass(frozen=True)
class Direction:
    """An exact direction: chart ('x' or 'y') plus rational slope in [-1, 1]."""

    chart: Literal["x", "y"]
    slope: Fraction

    def __post_init__(self):
        if self.chart not in ("x", "y"):
            raise ValueError(f"chart must be 'x' or 'y', got {self.chart!r}")
        object.__setattr__(self, "slope", to_fraction(self.slope))
        if abs(self.slope) > 1:
            raise ValueError(
                f"|slope| must be <= 1 within a chart, got {self.slope}; "
                "switch charts for steeper directions"
            )

    @property
    def angle(self) -> float:
        """Angle in radians within [-pi/4, 3*pi/4]."""
        a = math.atan(float(self.slope))
        return a if self.chart == "x" else math.pi / 2 - a

    @property
    def scale(self) -> float:
        """True projected length per unit of sheared length, in (0, 1]."""
        return 1.0 / math.sqrt(1.0 + float(self.slope) ** 2)

    @property
    def shear_norm_sq(self) -> Fraction:
        """Exact 1 + slope^2 = 1/scale^2, for squared-length certificates."""
        return 1 + self.slope * self.slope

    def functional(self, bx: Fraction, by: Fraction) -> Fraction:
        """Sheared coordinate of the point (bx, by)."""
        if self.chart == "x":
            return bx + self.slope * by
        return by + self.slope * bx

    @classmethod
    def from_slope(cls, slope, chart: str = "x") -> "Direction":
        return cls(chart, to_fraction(slope))

    @classmethod
    def from_angle(cls, theta: float,
                   max_denominator: int = DEFAULT_SLOPE_DENOMINATOR) -> "Direction":
        """Snap an angle to the nearest rational-slope direction.

        The angle is reduced mod pi into [-pi/4, 3pi/4); the tangent (or
        cotangent) is approximated by its best rational with denominator at
        most ``max_denominator`` (continued fractions).
        """
        t = math.fmod(theta, math.pi)
        if t < -_QUARTER_PI:
            t += math.pi
        elif t >= 3 * _QUARTER_PI:
            t -= math.pi
        if -_QUARTER_PI <= t <= _QUARTER_PI:
            slope = Fraction(math.tan(t)).limit_denominator(max_denominator)
            return cls("x", min(max(slope, Fraction(-1)), Fraction(1)))
        slope = Fraction(math.tan(math.pi / 2 - t)).limit_denominator(max_denominator)
        return cls("y", min(max(slope, Fraction(-1)), Fraction(1)))

    def label(self) -> str:
        return f"{self.chart}:{rational_str(self.slope)}"


@dataclass(frozen=True)
class ProjectedIFS1D:
    """The line system T_i(x) = ratio_i * x + offset_i on a base interval."""

    maps: tuple[tuple[Fraction, Fraction], ...]
    base: tuple[Fraction, Fraction]


def project_ifs(ifs: IFS2D, d: Direction) -> ProjectedIFS1D:
    """Project a planar system through the direction's chart functional."""
    maps = tuple((m.ratio, d.functional(m.translation[0], m.translation[1]))
                 for m in ifs.maps)
    x0, y0, x1, y1 = ifs.base
    corners = [d.functional(x, y) for x in (x0, x1) for y in (y0, y1)]
    return ProjectedIFS1D(maps, (min(corners), max(corners)))


@dataclass(frozen=True)
class GenerationSet:
    """Generation n of a projected system, in sheared coordinates."""

    n: int
    direction: Direction
    set: Union[IntervalSet, FloatIntervalSet]

    @property
    def sheared_measure(self):
        return self.set.measure

    def true_measure(self) -> float:
        return float(self.set.measure) * self.direction.scale


class _ExactEngine:
    """Iterates E_{n+1} = union T_i(E_n) over scaled-integer interval sets."""

    def __init__(self, proj: ProjectedIFS1D, max_count: int = DEFAULT_MAX_COUNT):
        self.max_count = max_count
        lo, hi = proj.base
        den = _lcm(lo.denominator, hi.denominator)
        self.den = den
        self.lo: Union[list, np.ndarray] = [lo.numerator * (den // lo.denominator)]
        self.hi: Union[list, np.ndarray] = [hi.numerator * (den // hi.denominator)]
        self.maps = [(r.numerator, r.denominator, c.numerator, c.denominator)
                     for r, c in proj.maps]
        self.ratio_lcm = 1
        self.offset_lcm = 1
        for _, q, _, b in self.maps:
            self.ratio_lcm = _lcm(self.ratio_lcm, q)
            self.offset_lcm = _lcm(self.offset_lcm, b)
        self.n = 0

    def _coefficients(self) -> tuple[int, list[tuple[int, int]]]:
        den = self.den
        new_den = _lcm(den * self.ratio_lcm, self.offset_lcm)
        coeffs = []
        for p, q, a, b in self.maps:
            coeffs.append((p * (new_den // (q * den)), a * (new_den // b)))
        return new_den, coeffs

    def _extreme(self) -> int:
        if isinstance(self.lo, np.ndarray):
            if self.lo.size == 0:
                return 0
            return max(abs(int(self.lo[0])), abs(int(self.hi[-1])))
        if not self.lo:
            return 0
        return max(abs(self.lo[0]), abs(self.hi[-1]))

    def step(self) -> None:
        new_den, coeffs = self._coefficients()
        xmax = self._extreme()
        fits = new_den < _INT64_SAFE and all(
            abs(a) * xmax + abs(c) < _INT64_SAFE for a, c in coeffs
        )
        if fits:
            if not isinstance(self.lo, np.ndarray):
                lo = np.array(self.lo, dtype=np.int64)
                hi = np.array(self.hi, dtype=np.int64)
            else:
                lo, hi = self.lo, self.hi
            parts_lo = [a * lo + c for a, c in coeffs]
            parts_hi = [a * hi + c for a, c in coeffs]
            mlo, mhi = merge_int64_arrays(np.concatenate(parts_lo),
                                          np.concatenate(parts_hi))
            keep = mhi > mlo
            self.lo, self.hi = mlo[keep], mhi[keep]
        else:
            if isinstance(self.lo, np.ndarray):
                self.lo = [int(v) for v in self.lo]
                self.hi = [int(v) for v in self.hi]
            pairs = []
            for a, c in coeffs:
                pairs.extend((a * x + c, a * y + c) for x, y in zip(self.lo, self.hi))
            mlo, mhi = _merge_scaled(pairs)
            self.lo = [x for x, y in zip(mlo, mhi) if y > x]
            self.hi = [y for x, y in zip(mlo, mhi) if y > x]
        self.den = new_den
        self.n += 1
        if self.count > self.max_count:
            raise SizeCapExceeded(
                f"merged interval count {self.count} exceeds cap {self.max_count} "
                f"at generation {self.n}"
            )

    @property
    def count(self) -> int:
        return len(self.lo) if isinstance(self.lo, list) else int(self.lo.size)

    @property
    def measure(self) -> Fraction:
        if isinstance(self.lo, np.ndarray):
            if self.lo.size == 0:
                return Fraction(0)
            total = int(np.sum(self.hi - self.lo, dtype=np.int64))
        else:
            total = sum(b - a for a, b in zip(self.lo, self.hi))
        return Fraction(total, self.den)

    def snapshot(self) -> IntervalSet:
        if isinstance(self.lo, np.ndarray):
            lo = [int(v) for v in self.lo]
            hi = [int(v) for v in self.hi]
        else:
            lo, hi = list(self.lo), list(self.hi)
        return IntervalSet.from_scaled(self.den, lo, hi, canonical=True)


class _FloatEngine:
    """Float-backend twin of :class:`_ExactEngine`."""

    def __init__(self, proj: ProjectedIFS1D, max_count: int = DEFAULT_MAX_COUNT,
                 merge_eps: float = MERGE_EPSILON):
        self.max_count = max_count
        self.eps = merge_eps
        self.lo = np.array([float(proj.base[0])], dtype=np.float64)
        self.hi = np.array([float(proj.base[1])], dtype=np.float64)
        self.maps = [(float(r), float(c)) for r, c in proj.maps]
        self.n = 0

    def step(self) -> None:
        parts_lo = [r * self.lo + c for r, c in self.maps]
        parts_hi = [r * self.hi + c for r, c in self.maps]
        mlo, mhi = merge_float_arrays(np.concatenate(parts_lo),
                                      np.concatenate(parts_hi), self.eps)
        keep = mhi > mlo
        self.lo, self.hi = mlo[keep], mhi[keep]
        self.n += 1
        if self.count > self.max_count:
            raise SizeCapExceeded(
                f"merged interval count {self.count} exceeds cap {self.max_count} "
                f"at generation {self.n}"
            )

    @property
    def count(self) -> int:
        return int(self.lo.size)

    @property
    def measure(self) -> float:
        return float(np.sum(self.hi - self.lo))

    def snapshot(self) -> FloatIntervalSet:
        return FloatIntervalSet._trusted(self.lo.copy(), self.hi.copy(), self.eps)


def _engine(proj: ProjectedIFS1D, backend: str, max_count: int):
    if backend == "exact":
        return _ExactEngine(proj, max_count)
    if backend == "float":
        return _FloatEngine(proj, max_count)
    raise ValueError(f"unknown backend {backend!r}")


def generation(proj: ProjectedIFS1D, n: int, direction: Direction,
               backend: str = "exact",
               max_count: int = DEFAULT_MAX_COUNT) -> GenerationSet:
    """Generation n of the projected system as a canonical interval set."""
    if n < 0:
        raise ValueError("generation index must be >= 0")
    eng = _engine(proj, backend, max_count)
    for _ in range(n):
        eng.step()
    return GenerationSet(n, direction, eng.snapshot())


def iter_generations(proj: ProjectedIFS1D, n_max: int, direction: Direction,
                     backend: str = "exact",
                     max_count: int = DEFAULT_MAX_COUNT) -> Iterator[GenerationSet]:
    """Yield generations 0..n_max, reusing the merged set between steps."""
    if n_max < 0:
        raise ValueError("generation index must be >= 0")
    eng = _engine(proj, backend, max_count)
    yield GenerationSet(0, direction, eng.snapshot())
    for k in range(1, n_max + 1):
        eng.step()
        yield GenerationSet(k, direction, eng.snapshot())


def sheared_measures(proj: ProjectedIFS1D, n_max: int, backend: str = "exact",
                     max_count: int = DEFAULT_MAX_COUNT) -> list:
    """Measures of generations 0..n_max without materializing the sets."""
    eng = _engine(proj, backend, max_count)
    values = [eng.measure]
    for _ in range(n_max):
        eng.step()
        values.append(eng.measure)
    return values


def alpha_parts(ifs: IFS2D, d: Direction, n: int,
                max_count: int = DEFAULT_MAX_COUNT) -> tuple[Fraction, float]:
    """Exact sheared projected length of generation n, plus the scale factor.

    The true projected length is ``float(sheared) * scale``; keeping the two
    apart lets certificates stay in rational arithmetic.
    """
    proj = project_ifs(ifs, d)
    values = sheared_measures(proj, n, backend="exact", max_count=max_count)
    return values[n], d.scale


def alpha(ifs: IFS2D, d: Direction, n: int, backend: str = "exact",
          max_count: int = DEFAULT_MAX_COUNT) -> float:
    """True projected length of generation n in direction d."""
    proj = project_ifs(ifs, d)
    values = sheared_measures(proj, n, backend=backend, max_count=max_count)
    return float(values[n]) * d.scale
