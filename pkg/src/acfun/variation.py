"""Total variation, absolute-continuity moduli and Lipschitz lower bounds.

Every estimator here reports a lower bound for the quantity it names.  Exact
values are returned only for descriptors that expose exact breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ParameterError, TooManyBreakpoints
from .realfn import Fn1, Interval, Partition, is_exact, to_fraction

DEFAULT_TOL = 1e-8
DEFAULT_MAX_DEPTH = 20
DEFAULT_SEED = 0x5EED
# Adjacent pairs on a geometric ladder toward each endpoint; deeper rungs
# lose more to cancellation than they gain.
LADDER_RUNGS = 30


@dataclass
class VariationReport:
    interval: Interval
    per_depth: list = field(default_factory=list)  # (partition size, variation sum)
    converged: bool = False
    estimate: float = 0.0
    exact: bool = False
    value: object = None  # exact Fraction when ``exact``


@dataclass
class ACModulusReport:
    delta: float
    grid_size: int
    modulus: float
    chosen_intervals: list
    total_length: float


def _values(f: Fn1, points):
    if f.exact and all(is_exact(p) for p in points):
        return [f(p) for p in points], True
    return np.asarray(f(np.asarray([float(p) for p in points])), dtype=float), False


def total_variation(f: Fn1, P: Partition):
    """Sum of ``|f(p[i+1]) - f(p[i])|`` over consecutive partition points.

    Exact (a Fraction) when ``f`` is exact and every point is rational.
    """
    vals, exact = _values(f, P.points)
    if exact:
        return sum((abs(b - a) for a, b in zip(vals, vals[1:])), Fraction(0))
    return math.fsum(np.abs(np.diff(vals)).tolist())


def variation_refined(
    f: Fn1,
    iv: Interval,
    max_depth: int = DEFAULT_MAX_DEPTH,
    tol: float = DEFAULT_TOL,
) -> VariationReport:
    """Variation of ``f`` on ``iv`` along nested dyadic partitions.

    Depth ``j`` uses the ``2**j``-cell dyadic grid of ``iv`` merged with any
    monotonicity-splitting points ``f`` knows about.  Exact piecewise-linear
    descriptors short-circuit to their exact variation.
    """
    if max_depth < 1:
        raise ParameterError("max_depth must be >= 1")
    if f.exact and f.piecewise_linear:
        try:
            v = f.exact_variation(iv.lo, iv.hi)
        except TooManyBreakpoints:
            v = None
        if v is not None:
            try:
                size = len(f.breakpoints(iv.lo, iv.hi)) + 2
            except (TooManyBreakpoints, NotImplementedError):
                size = -1
            return VariationReport(iv, [(size, float(v))], True, float(v), exact=True, value=v)

    lo, hi = float(iv.lo), float(iv.hi)
    rep = VariationReport(iv)
    if hi == lo:
        rep.per_depth.append((1, 0.0))
        rep.converged = True
        return rep
    hints = np.asarray(f.critical_points(lo, hi), dtype=float)
    base = np.unique(np.concatenate([[lo, hi], hints[(hints > lo) & (hints < hi)]]))
    prev = None
    for depth in range(max_depth + 1):
        grid = lo + (hi - lo) * (np.arange(2**depth + 1) / 2**depth)
        pts = np.union1d(base, grid)
        v = math.fsum(np.abs(np.diff(f(pts))).tolist())
        rep.per_depth.append((len(pts), v))
        rep.estimate = v
        if prev is not None and abs(v - prev) <= tol * max(abs(v), abs(prev)):
            rep.converged = True
            break
        prev = v
    return rep


def ac_modulus(f: Fn1, iv: Interval, delta: float, grid: int) -> ACModulusReport:
    """Largest ``sum |f(b_k) - f(a_k)|`` over grid cells of total length ``<= delta``.

    With equal cells the budgeted choice reduces to taking the
    ``floor(delta / h)`` cells with the largest increments (ties go to the
    lower index).  The result is a lower bound for the modulus supremum.
    """
    if delta <= 0:
        raise ParameterError(f"delta must be positive, got {delta}")
    if grid < 2:
        raise ParameterError(f"grid must be >= 2, got {grid}")
    length = to_fraction(iv.hi) - to_fraction(iv.lo)
    if to_fraction(delta) > length:
        raise ParameterError(f"delta {delta} exceeds the interval length {float(length)}")
    lo, hi = float(iv.lo), float(iv.hi)
    xs = np.linspace(lo, hi, grid + 1)
    inc = np.abs(np.diff(np.asarray(f(xs), dtype=float)))
    m = min(grid, math.floor(to_fraction(delta) * grid / length))
    order = np.argsort(-inc, kind="stable")[:m]
    chosen = np.sort(order)
    modulus = math.fsum(inc[chosen].tolist())
    cells = [(float(xs[i]), float(xs[i + 1])) for i in chosen]
    return ACModulusReport(float(delta), grid, modulus, cells, m * (hi - lo) / grid)


def _exact_quotients(f, xs, ys, lo, hi):
    out = []
    for a, b in zip(xs, ys):
        qa = min(max(to_fraction(a), lo), hi)
        qb = min(max(to_fraction(b), lo), hi)
        if qa == qb:
            continue
        out.append(abs(f(qb) - f(qa)) / abs(qb - qa))
    return out


def lipschitz_estimate(f: Fn1, iv: Interval, grid: int = 4096, seed: int = DEFAULT_SEED) -> float:
    """Lower bound for the Lipschitz constant of ``f`` on ``iv``.

    Maximum difference quotient over adjacent points of a uniform grid,
    adjacent rungs of geometric ladders toward both endpoints, and
    ``10 * grid`` random pairs.  Exact descriptors are evaluated in rational
    arithmetic so that slopes come out exact.
    """
    if grid < 2:
        raise ParameterError(f"grid must be >= 2, got {grid}")
    lo, hi = float(iv.lo), float(iv.hi)
    L = hi - lo
    if L == 0:
        return 0.0
    pts = np.linspace(lo, hi, grid)
    rungs = L * np.exp2(-np.arange(1, LADDER_RUNGS + 1, dtype=float))
    ladder_lo = np.concatenate([[lo], lo + rungs[::-1]])
    ladder_hi = np.concatenate([hi - rungs, [hi]])
    rng = np.random.default_rng(seed)
    ra = rng.uniform(lo, hi, 10 * grid)
    rb = rng.uniform(lo, hi, 10 * grid)

    if f.exact:
        elo, ehi = to_fraction(iv.lo), to_fraction(iv.hi)
        best = Fraction(0)
        for seq in (pts, ladder_lo, ladder_hi):
            q = _exact_quotients(f, seq[:-1].tolist(), seq[1:].tolist(), elo, ehi)
            if q:
                best = max(best, max(q))
        q = _exact_quotients(f, ra.tolist(), rb.tolist(), elo, ehi)
        if q:
            best = max(best, max(q))
        return float(best)

    best = 0.0
    for seq in (pts, ladder_lo, ladder_hi):
        seq = np.unique(seq)
        v = np.asarray(f(seq), dtype=float)
        best = max(best, float(np.max(np.abs(np.diff(v)) / np.diff(seq))))
    keep = ra != rb
    ra, rb = ra[keep], rb[keep]
    va = np.asarray(f(ra), dtype=float)
    vb = np.asarray(f(rb), dtype=float)
    best = max(best, float(np.max(np.abs(va - vb) / np.abs(ra - rb))))
    return best


def divergence_profile(f: Fn1, scales, hi=1, **kwargs) -> list:
    """``(scale, variation estimate on [scale, hi])`` for each scale."""
    out = []
    for s in scales:
        rep = variation_refined(f, Interval(s, hi), **kwargs)
        out.append((s, rep.value if rep.exact else rep.estimate))
    return out
