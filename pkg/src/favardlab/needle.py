"""Buffon-needle Monte Carlo estimate of Favard length.

Independent oracle for the quadrature pipeline: random lines are thrown at
the generation-n squares and hits are counted geometrically, with no use of
the interval machinery.  A line is parameterized by its normal angle theta
and signed offset c from the base center; it hits an axis-aligned square
exactly when c falls inside the projection of the square onto the normal,
an interval around the square's center projection of half-length
h*(|cos theta| + |sin theta|) (the min/max of the four corner projections).

With theta uniform on [0, 2*pi) and c uniform on [-W, W],

    Fav = integral of projected length over the full turn
        = 2*pi * 2*W * P(hit),

provided W covers the circumradius of the base about its center.  Trials are
split into fixed-size batches; each batch runs its own counter-based Philox
stream keyed by (seed, batch index), so results are bit-reproducible for a
given seed and trial count regardless of chunking internals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .ifs import IFS2D

BATCH_SIZE = 1 << 17
MAX_SQUARES = 65_536
_CHUNK_TARGET = 1 << 24


def circumradius(ifs: IFS2D) -> float:
    """Half-diagonal of the base rectangle about its center."""
    x0, y0, x1, y1 = ifs.base
    return math.hypot(float(x1 - x0), float(y1 - y0)) / 2.0


@dataclass(frozen=True)
class NeedleConfig:
    trials: int
    seed: int
    generation: int
    strip_halfwidth: Optional[float] = None     # None: circumradius of base

    def __post_init__(self):
        if self.trials < 1:
            raise PreconditionError("need at least one trial")
        if self.generation < 0:
            raise PreconditionError("generation must be >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise PreconditionError("seed must fit in 64 bits")


@dataclass(frozen=True)
class NeedleEstimate:
    estimate: float
    standard_error: float
    hits: int
    trials: int
    seed: int
    generation: int
    strip_halfwidth: float


def _generation_squares(ifs: IFS2D, n: int):
    """Centers (relative to the base center) and half-side of every
    generation-n square, by direct composition of the maps."""
    x0, y0, x1, y1 = ifs.base
    if x1 - x0 != y1 - y0:
        raise PreconditionError("needle sampling expects a square base")
    side = x1 - x0
    ratios = [m.ratio for m in ifs.maps]
    if len(set(ratios)) != 1:
        raise PreconditionError("needle sampling expects equal ratios")
    rho = ratios[0]
    count = len(ifs.maps) ** n
    if count > MAX_SQUARES:
        raise PreconditionError(
            f"{count} generation squares exceed the enumeration limit "
            f"{MAX_SQUARES}")
    origins = [(Fraction(0), Fraction(0))]
    scale = Fraction(1)
    for _ in range(n):
        origins = [(ox + scale * m.translation[0], oy + scale * m.translation[1])
                   for ox, oy in origins for m in ifs.maps]
        scale *= rho
    half = scale * side / 2
    cx0, cy0 = x0 + side / 2, y0 + side / 2
    # cylinder image of the base is origin + scale*[x0, x0+side]^2, so its
    # center sits at origin + scale*base_corner + half, taken relative to
    # the base center
    cx = np.array([float(ox + scale * x0 + half - cx0) for ox, _ in origins])
    cy = np.array([float(oy + scale * y0 + half - cy0) for _, oy in origins])
    return cx, cy, float(half)


def estimate_favard_mc(ifs: IFS2D, cfg: NeedleConfig) -> NeedleEstimate:
    """Monte Carlo Favard estimate with its binomial standard error."""
    rad = circumradius(ifs)
    w = cfg.strip_halfwidth if cfg.strip_halfwidth is not None else rad
    if w < rad * (1 - 1e-12):
        raise PreconditionError(
            f"strip halfwidth {w} misses lines through the base "
            f"(circumradius {rad})")
    cx, cy, half = _generation_squares(ifs, cfg.generation)
    n_sq = len(cx)
    chunk = max(1, min(BATCH_SIZE, _CHUNK_TARGET // max(1, n_sq)))
    hits = 0
    done = 0
    batch_index = 0
    while done < cfg.trials:
        take = min(BATCH_SIZE, cfg.trials - done)
        rng = np.random.Generator(
            np.random.Philox(key=np.array([cfg.seed, batch_index],
                                          dtype=np.uint64)))
        theta = rng.uniform(0.0, 2.0 * math.pi, take)
        c = rng.uniform(-w, w, take)
        cos_t, sin_t = np.cos(theta), np.sin(theta)
        reach = half * (np.abs(cos_t) + np.abs(sin_t))
        for start in range(0, take, chunk):
            sl = slice(start, start + chunk)
            centers = (np.multiply.outer(cos_t[sl], cx)
                       + np.multiply.outer(sin_t[sl], cy))
            inside = np.abs(centers - c[sl, None]) <= reach[sl, None]
            hits += int(np.count_nonzero(inside.any(axis=1)))
        done += take
        batch_index += 1
    p_hat = hits / cfg.trials
    span = 2.0 * math.pi * 2.0 * w
    estimate = span * p_hat
    se = span * math.sqrt(p_hat * (1.0 - p_hat) / cfg.trials)
    return NeedleEstimate(estimate, se, hits, cfg.trials, cfg.seed,
                          cfg.generation, w)
