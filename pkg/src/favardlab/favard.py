"""Alpha sequences, convexity checks, Favard quadrature, and certificates.

For a direction theta let alpha_n(theta) be the length of the projection of
generation n.  Everything here rests on two elementary facts:

* the sequence n -> alpha_n(theta) is nonincreasing (generations are nested);
* when the contraction ratios sum to 1 and every projected image of the base
  stays inside the base, the sequence is convex: consecutive differences
  d_k = alpha_{k-1} - alpha_k are nonincreasing.

Convexity is scale-invariant, so it is checked on the exact sheared values.
Iterating it gives the certified lower bound alpha_n >= alpha_0 - n*d_1,
which near a tiling slope (d_1 = 0) keeps alpha_n bounded away from zero and
yields an explicit lower bound on the Favard length of generation n.

Favard length here means the integral of projected length over a full turn,
twice the integral over any half period.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import PreconditionError
from .ifs import IFS2D, validate
from .intervals import to_fraction
from .projection import (
    DEFAULT_MAX_COUNT,
    DEFAULT_SLOPE_DENOMINATOR,
    Direction,
    project_ifs,
    sheared_measures,
)

SPECIAL_SLOPE = Fraction(1, 2)

_QUARTER_PI = math.pi / 4


def _parallel_map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@dataclass(frozen=True)
class AlphaSequence:
    """Sheared projected lengths of generations 0..N in one direction.

    True lengths are ``value * scale``; convexity and monotonicity are
    unaffected by the positive factor, so they are tested on the sheared
    values directly (exactly, when the backend is exact).
    """

    direction: Direction
    values: tuple
    scale: float

    def true_values(self) -> list[float]:
        return [float(v) * self.scale for v in self.values]

    def __len__(self) -> int:
        return len(self.values)


def alpha_sequence(ifs: IFS2D, d: Direction, n_max: int, backend: str = "exact",
                   max_count: int = DEFAULT_MAX_COUNT) -> AlphaSequence:
    """Compute alpha_0 .. alpha_{n_max}, reusing the merged set per step."""
    proj = project_ifs(ifs, d)
    values = sheared_measures(proj, n_max, backend=backend, max_count=max_count)
    return AlphaSequence(d, tuple(values), d.scale)


@dataclass(frozen=True)
class ConvexityReport:
    values: tuple
    margins: tuple          # (k, (v[k-1] + v[k+1]) - 2*v[k]) for interior k
    diffs: tuple            # d_k = v[k-1] - v[k], k = 1..N
    convex: bool
    diffs_nonincreasing: bool
    nonincreasing: bool
    first_violation: Optional[int]
    exact: bool


def check_convexity(seq: Union[AlphaSequence, Sequence]) -> ConvexityReport:
    """Second-difference report for an alpha sequence or plain scalar list.

    Margins are (v[k-1] + v[k+1]) - 2*v[k]; the sequence is convex when all
    are >= 0, equivalently when the difference sequence is nonincreasing.
    Non-float inputs are promoted to Fraction so verdicts are exact.
    """
    raw = seq.values if isinstance(seq, AlphaSequence) else tuple(seq)
    if len(raw) < 3:
        raise ValueError("need at least 3 values for a second-difference check")
    if any(isinstance(v, float) for v in raw):
        vals = tuple(float(v) for v in raw)
        exact = False
    else:
        vals = tuple(to_fraction(v) for v in raw)
        exact = True
    margins = tuple((k, (vals[k - 1] + vals[k + 1]) - 2 * vals[k])
                    for k in range(1, len(vals) - 1))
    diffs = tuple(vals[k - 1] - vals[k] for k in range(1, len(vals)))
    first = next((k for k, m in margins if m < 0), None)
    convex = first is None
    dec = all(diffs[i + 1] <= diffs[i] for i in range(len(diffs) - 1))
    mono = all(d >= 0 for d in diffs)
    return ConvexityReport(vals, margins, diffs, convex, dec, mono, first, exact)


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-6
    panel_order: int = 16
    initial_panels: int = 4
    max_refinements: int = 6
    backend: str = "float"
    max_denominator: int = DEFAULT_SLOPE_DENOMINATOR
    threads: int = 0


@dataclass(frozen=True)
class FavardEstimate:
    n: int
    value: float
    error: float
    status: str             # "converged" or "unconverged"
    nodes: int              # evaluations in the final pass
    panels: int

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _alpha_at_angle(ifs: IFS2D, n: int, theta: float, backend: str,
                    max_denominator: int, max_count: int) -> float:
    d = Direction.from_angle(theta, max_denominator)
    proj = project_ifs(ifs, d)
    vals = sheared_measures(proj, n, backend=backend, max_count=max_count)
    return float(vals[n]) * d.scale


def _panel_nodes(lo: float, hi: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def favard(ifs: IFS2D, n: int, quad: Optional[QuadratureConfig] = None,
           max_count: int = DEFAULT_MAX_COUNT) -> FavardEstimate:
    """Estimate the full-turn Favard length of generation n by quadrature.

    The integrand has period pi, so the result is twice the half-period
    integral; with dihedral symmetry the integrand additionally has period
    pi/2 and is symmetric about pi/4, shrinking the domain to [0, pi/4].
    Panels double until two successive composite Gauss-Legendre estimates
    agree to quad.tol; the last delta is reported as the error bar.
    """
    quad = quad or QuadratureConfig()
    if ifs.dihedral_symmetry:
        lo, hi, factor = 0.0, _QUARTER_PI, 8.0
    else:
        lo, hi, factor = -_QUARTER_PI, 3 * _QUARTER_PI, 2.0

    def evaluate(panels: int) -> float:
        nodes, weights = _panel_nodes(lo, hi, panels, quad.panel_order)
        values = _parallel_map(
            lambda th: _alpha_at_angle(ifs, n, th, quad.backend,
                                       quad.max_denominator, max_count),
            nodes.tolist(), quad.threads)
        return factor * float(np.dot(weights, np.array(values)))

    panels = quad.initial_panels
    est = evaluate(panels)
    delta = math.inf
    for _ in range(quad.max_refinements):
        panels *= 2
        new = evaluate(panels)
        delta = abs(new - est)
        est = new
        if delta < quad.tol:
            return FavardEstimate(n, est, delta, "converged",
                                  panels * quad.panel_order, panels)
    return FavardEstimate(n, est, delta, "unconverged",
                          panels * quad.panel_order, panels)


@dataclass(frozen=True)
class SpecialSlopeReport:
    slope: Fraction
    tiles: bool
    defect: Fraction        # alpha~_0 - alpha~_1, sheared, exact
    pieces: int             # merged interval count of generation 1
    base_measure: Fraction


def special_slope_check(ifs: IFS2D, t) -> SpecialSlopeReport:
    """Check exactly whether the first-generation images tile the base.

    Tiling means the union of images is a single interval of full base
    measure, which forces alpha_0 = alpha_1 and hence, with convexity,
    alpha_n = alpha_0 for every n at this direction.
    """
    t = to_fraction(t)
    if abs(t) <= 1:
        d = Direction("x", t)
    else:
        d = Direction("y", 1 / t)
    proj = project_ifs(ifs, d)
    from .projection import generation

    g1 = generation(proj, 1, d, backend="exact")
    base_measure = proj.base[1] - proj.base[0]
    defect = base_measure - g1.set.measure
    tiles = g1.set.count == 1 and defect == 0
    return SpecialSlopeReport(t, tiles, defect, g1.set.count, base_measure)


@dataclass(frozen=True)
class LipschitzReport:
    nodes: int
    spacing: float
    sup_slope: float        # max |g(x_{i+1}) - g(x_i)| / spacing
    argmin_theta: float
    min_value: float
    zeros: tuple            # angles of near-zero local minima of g
    nonnegative: bool
    thetas: np.ndarray = field(repr=False, compare=False)
    g: np.ndarray = field(repr=False, compare=False)


def lipschitz_scan(ifs: IFS2D, nodes: int = 10_000,
                   max_denominator: int = DEFAULT_SLOPE_DENOMINATOR,
                   threads: int = 0) -> LipschitzReport:
    """Scan g(theta) = alpha_0 - alpha_1 over a half period of directions.

    Reports the largest finite-difference slope between adjacent nodes
    (empirical Lipschitz evidence), the grid argmin, and every near-zero
    local minimum: a node that beats both neighbors and sits within one
    Lipschitz step of zero.
    """
    if nodes < 3:
        raise ValueError("need at least 3 grid nodes")
    thetas = np.linspace(-_QUARTER_PI, 3 * _QUARTER_PI, nodes)

    def g_at(theta: float) -> float:
        d = Direction.from_angle(theta, max_denominator)
        proj = project_ifs(ifs, d)
        vals = sheared_measures(proj, 1, backend="float")
        return (vals[0] - vals[1]) * d.scale

    g = np.array(_parallel_map(g_at, thetas.tolist(), threads))
    spacing = float(thetas[1] - thetas[0])
    sup_slope = float(np.max(np.abs(np.diff(g)))) / spacing
    idx = int(np.argmin(g))
    threshold = max(sup_slope * spacing, 1e-9)
    interior = np.zeros(len(g), dtype=bool)
    interior[1:-1] = (g[1:-1] <= g[:-2]) & (g[1:-1] <= g[2:])
    interior[0] = g[0] <= g[1]
    interior[-1] = g[-1] <= g[-2]
    zeros = tuple(float(t) for t, v in zip(thetas[interior], g[interior])
                  if v <= threshold)
    return LipschitzReport(nodes, spacing, sup_slope, float(thetas[idx]),
                           float(g[idx]), zeros, bool(np.all(g >= -1e-12)),
                           thetas, g)


@dataclass(frozen=True)
class CertificateRow:
    slope: Fraction
    alpha0: Fraction        # sheared, exact
    alpha1: Fraction
    d1: Fraction            # alpha0 - alpha1
    lower: Fraction         # alpha0 - n*d1, certified sheared lower bound
    ok: bool                # true length of the bound >= 1/2, checked exactly


@dataclass(frozen=True)
class Certificate:
    n: int
    special_slope: Fraction
    window_center: float
    window_halfwidth: float
    grid: tuple
    claimed_bound: float
    status: str             # "pass" or "fail"
    witness: Optional[Fraction]

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def lower_bound_certificate(ifs: IFS2D, n: int, grid_count: int = 64,
                            special_slope=SPECIAL_SLOPE,
                            max_denominator: int = DEFAULT_SLOPE_DENOMINATOR,
                            ) -> Certificate:
    """Certify Fav(generation n) >= 1/(40n) by exact grid evaluation.

    Works on the angular window of half-width 1/(40n) centered at the
    tiling direction.  At each of grid_count rational slopes spanning the
    window the iterated-convexity bound L = alpha_0 - n*(alpha_0 - alpha_1)
    is computed exactly in sheared form and the claim "true length of L is
    at least 1/2" is decided without square roots via

        L >= 0  and  4*L^2 >= 1 + slope^2.

    All rows passing gives Fav >= (window length)*(1/2) = 1/(40n).  The
    certificate is exact at the sampled slopes and relies on the scanned
    Lipschitz evidence between them.
    """
    if n < 1:
        raise PreconditionError("certificate needs generation n >= 1")
    if grid_count < 2:
        raise PreconditionError("need at least 2 grid slopes")
    if not ifs.convexity_applies:
        raise PreconditionError(
            f"contraction ratios sum to {ifs.ratio_sum}, not 1; "
            "the convexity theorem does not apply")
    report = validate(ifs)
    if not report.nesting:
        raise PreconditionError("projected images leave the base interval; "
                                "nesting hypothesis fails")
    t_star = to_fraction(special_slope)
    center = math.atan(float(t_star))
    halfwidth = 1.0 / (40 * n)
    angles = np.linspace(center - halfwidth, center + halfwidth, grid_count)
    rows = []
    witness = None
    for theta in angles:
        d = Direction.from_angle(float(theta), max_denominator)
        proj = project_ifs(ifs, d)
        a0, a1 = sheared_measures(proj, 1)
        d1 = a0 - a1
        lower = a0 - n * d1
        ok = lower >= 0 and 4 * lower * lower >= d.shear_norm_sq
        rows.append(CertificateRow(d.slope, a0, a1, d1, lower, ok))
        if not ok and witness is None:
            witness = d.slope
    status = "pass" if witness is None else "fail"
    return Certificate(n, t_star, center, halfwidth, tuple(rows),
                       1.0 / (40 * n), status, witness)
