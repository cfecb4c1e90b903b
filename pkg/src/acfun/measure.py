"""Distribution functions, L^p integrals and the measure inequalities of the pyramid surface.

Throughout, ``distribution(target, alpha)`` is ``lambda({|target| >= alpha})``
on the target's domain (``[0, 1]`` or the unit square).  ``lp_norm`` returns
``integral |target|**p`` unless ``root=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .constructions import PathologySurface
from .errors import DivergenceSuspected, MethodError, ParameterError
from .realfn import Fn1, Fn2, Lift, Scaled, is_exact, to_fraction

BOUND_TOL = Fraction(1, 10**12)
NORM_TOL = 1e-8
QUAD_EPS_EXP = 60  # quadrature covers [lo + 2**-60 L, hi]; the rest is the tail


class DerivativeField:
    """Partial derivative of a :class:`PathologySurface` along one axis.

    Inside a square of level ``n`` the pyramid has slope ``2**n`` along the
    axis on the two triangles where that coordinate dominates
    (``|x - c| > |y - c|`` for the x-derivative), and zero elsewhere.  Each
    level thus carries value ``+-2**n`` on measure ``k_n d_n**2 / 2``.
    """

    def __init__(self, source: PathologySurface, axis: str = "x"):
        if axis not in ("x", "y"):
            raise ParameterError(f"axis must be 'x' or 'y', got {axis!r}")
        self.source, self.axis = source, axis
        self.name = f"d{axis} {source.name}"

    def pieces(self):
        """``(n, |value|, measure)`` per level."""
        return [(lv.n, 2**lv.n, lv.k * lv.d * lv.d / 2) for lv in self.source.levels]

    def level_measure(self, n: int) -> Fraction:
        lv = self.source.level(n)
        return lv.k * lv.d * lv.d / 2

    def exact_distribution(self, alpha) -> Fraction:
        if alpha <= 0:
            return Fraction(1)
        a = to_fraction(alpha)
        return sum((m for n, v, m in self.pieces() if v >= a), Fraction(0))

    def layer_cake(self, p):
        """``sum (2**n)**p k_n d_n**2 / 2``: a Fraction for integer ``p``."""
        if float(p).is_integer():
            p = int(p)
            return sum((Fraction(v) ** p * m for n, v, m in self.pieces()), Fraction(0))
        with mpmath.workprec(128):
            tot = mpmath.fsum(
                mpmath.mpf(v) ** p * mpmath.mpf(m.numerator) / mpmath.mpf(m.denominator) for n, v, m in self.pieces()
            )
            return float(tot)

    def __call__(self, x, y):
        """Float evaluation; 0 on the measure-zero ridges."""
        xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        s = self.source
        inside, slow, n, c, d = s._locate_float(xa, ya)
        u, w = (xa, ya) if self.axis == "x" else (ya, xa)
        ucen = u - c
        dom = np.abs(ucen) > np.abs(w - c)
        out = np.where(inside & dom, -np.sign(ucen) * np.ldexp(1.0, n), 0.0)
        for idx in zip(*np.nonzero(slow)) if out.ndim else ([()] if slow else []):
            out[idx] = self.exact_value(Fraction(float(xa[idx])), Fraction(float(ya[idx])))
        return float(out) if out.ndim == 0 else out

    def exact_value(self, x, y) -> int:
        x, y = to_fraction(x), to_fraction(y)
        loc = self.source.locate(x)
        if loc is None or self.source.locate(y) != loc:
            return 0
        lv, i = loc
        _, _, c = lv.square(i)
        u, w = (x, y) if self.axis == "x" else (y, x)
        if abs(u - c) > abs(w - c):
            return -(2**lv.n) if u > c else 2**lv.n
        return 0


# ---------------------------------------------------------------------------
# distribution


def _domain_measure(target):
    if isinstance(target, Fn1):
        return to_fraction(target.domain.hi) - to_fraction(target.domain.lo)
    return Fraction(1)


def _exact_distribution(target, alpha):
    fn = getattr(target, "exact_distribution", None)
    if fn is None or (isinstance(target, Fn1) and target.piecewise_linear and not target.exact):
        raise MethodError(f"no exact distribution for {getattr(target, 'name', target)}")
    try:
        return fn(alpha)
    except NotImplementedError:
        raise MethodError(f"no exact distribution for {getattr(target, 'name', target)}") from None


@dataclass
class GridDistribution:
    value: float
    cells: int
    boundary_cells: int
    cell_measure: float

    @property
    def error_bar(self) -> float:
        return self.boundary_cells * self.cell_measure


def _abs_values(target, *coords):
    return np.abs(np.asarray(target(*coords), dtype=float))


def grid_distribution(target, alpha, n: int = 2048) -> GridDistribution:
    """Midpoint-classified measure of ``{|target| >= alpha}`` on an ``n``-cell grid.

    Cells whose corner classification disagrees with the midpoint are
    counted as boundary cells.
    """
    if n < 1:
        raise ParameterError("grid size must be >= 1")
    alpha = float(alpha)
    if isinstance(target, Fn1):
        lo, hi = float(target.domain.lo), float(target.domain.hi)
        h = (hi - lo) / n
        edges = np.linspace(lo, hi, n + 1)
        mids = (edges[:-1] + edges[1:]) / 2
        inm = _abs_values(target, mids) >= alpha
        right = _abs_values(target, edges[1:]) >= alpha
        if target.open_lo:
            left = np.concatenate([[inm[0]], right[:-1]])
        else:
            left = np.concatenate([_abs_values(target, edges[:1]) >= alpha, right[:-1]])
        boundary = (left != inm) | (right != inm)
        return GridDistribution(float(np.count_nonzero(inm)) * h, n, int(np.count_nonzero(boundary)), h)
    h = 1.0 / n
    edges = np.linspace(0.0, 1.0, n + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    X, Y = np.meshgrid(mids, mids, indexing="ij")
    inm = _abs_values(target, X, Y) >= alpha
    EX, EY = np.meshgrid(edges, edges, indexing="ij")
    corner = _abs_values(target, EX, EY) >= alpha
    boundary = np.zeros_like(inm)
    for sx in (0, 1):
        for sy in (0, 1):
            boundary |= corner[sx : sx + n, sy : sy + n] != inm
    return GridDistribution(float(np.count_nonzero(inm)) * h * h, n * n, int(np.count_nonzero(boundary)), h * h)


def distribution(target, alpha, method: str = "exact", n: int = 2048):
    """``lambda({|target| >= alpha})``.

    ``method="exact"`` returns a Fraction and needs a descriptor with an
    exact distribution (derivative fields, exact step and piecewise-linear
    functions, ``ln``, scalings and lifts of those); ``"grid"`` returns a
    float from an ``n``-cell midpoint count.
    """
    if alpha < 0:
        raise ParameterError(f"alpha must be >= 0, got {alpha}")
    if alpha == 0:
        return _domain_measure(target) if method == "exact" else float(_domain_measure(target))
    if method == "exact":
        return _exact_distribution(target, alpha)
    if method == "grid":
        return grid_distribution(target, alpha, n).value
    raise MethodError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# L^p


def _midpoint(fn, a, b, m):
    h = (b - a) / m
    xs = a + h * (np.arange(m) + 0.5)
    return h * math.fsum(fn(xs).tolist())


def _richardson_piece(fn, a, b, tol, max_cells=2**18):
    m = 8
    prev_m = _midpoint(fn, a, b, m)
    prev_r = None
    while True:
        m *= 2
        cur = _midpoint(fn, a, b, m)
        r = (4 * cur - prev_m) / 3
        if prev_r is not None and abs(r - prev_r) <= tol * max(abs(r), 1e-300):
            return r, True
        if m >= max_cells:
            return r, False
        prev_m, prev_r = cur, r


@dataclass
class QuadratureResult:
    value: float
    pieces: list = field(default_factory=list)
    tail: float = 0.0
    tail_kind: str = "none"
    converged: bool = True


def quadrature(f: Fn1, p: float, tol: float = 1e-12) -> QuadratureResult:
    """``integral |f|**p`` over ``f.domain`` by dyadic splitting toward the left end.

    Pieces ``[lo + 2**-(j+1) L, lo + 2**-j L]`` for ``j < 60`` are integrated
    with a midpoint rule and Richardson extrapolation; the remaining sliver
    uses ``f.lp_tail`` when known, a geometric extrapolation of the piece
    sequence otherwise.
    """
    lo, hi = float(f.domain.lo), float(f.domain.hi)
    L = hi - lo
    integrand = lambda xs: np.abs(np.asarray(f(xs), dtype=float)) ** p
    pieces = []
    ok = True
    for j in range(QUAD_EPS_EXP):
        a, b = lo + L * 2.0 ** -(j + 1), lo + L * 2.0**-j
        v, conv = _richardson_piece(integrand, a, b, tol)
        ok &= conv
        pieces.append(v)
    eps = L * 2.0**-QUAD_EPS_EXP
    tail_fn = getattr(f, "lp_tail", None)
    if tail_fn is not None and lo == 0:
        tail, kind = float(tail_fn(p, eps)), "analytic"
    else:
        last = [v for v in pieces[-8:]]
        ratios = [b / a for a, b in zip(last, last[1:]) if a > 0]
        if not ratios:
            tail, kind = 0.0, "zero"
        else:
            r = max(ratios)
            if r >= 1:
                raise DivergenceSuspected(
                    f"|{f.name}|^{p} does not decay toward {lo}: piece ratio {r:.3g}", partial=math.fsum(pieces)
                )
            tail, kind = pieces[-1] * r / (1 - r), "geometric"
    return QuadratureResult(math.fsum(pieces + [tail]), pieces, tail, kind, ok)


def _grid2(target, p, n=1024):
    mids = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(mids, mids, indexing="ij")
    return float(np.mean(np.abs(np.asarray(target(X, Y), dtype=float)) ** p))


def lp_norm(target, p, method: str = "auto", root: bool = False):
    """``integral |target|**p`` (its ``1/p`` power when ``root``).

    ``layercake`` is exact for piecewise-constant targets and integer
    ``p``; ``quadrature`` handles one-variable descriptors.  Lifts and
    scalings reduce to their base.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    val = _lp_power(target, p, method)
    if root:
        return float(val) ** (1.0 / p)
    return val


def _lp_power(target, p, method):
    if isinstance(target, Lift):
        return _lp_power(target.f, p, method)
    if isinstance(target, Scaled):
        base = _lp_power(target.f, p, method)
        c = target.c
        if is_exact(c) and isinstance(base, Fraction) and float(p).is_integer():
            return abs(to_fraction(c)) ** int(p) * base
        return abs(float(c)) ** p * float(base)
    if method in ("auto", "layercake") and hasattr(target, "layer_cake"):
        return target.layer_cake(p)
    if method == "layercake":
        raise MethodError(f"layer-cake needs a piecewise-constant target, got {getattr(target, 'name', target)}")
    if isinstance(target, Fn1):
        return quadrature(target, p).value
    if isinstance(target, (Fn2, DerivativeField)):
        return _grid2(target, p)
    raise MethodError(f"cannot integrate {target!r}")


# ---------------------------------------------------------------------------
# dominance and the surface bounds


@dataclass
class DominanceReport:
    alpha_checks: list = field(default_factory=list)  # (alpha, lambda_f, lambda_g, ok)
    p_checks: list = field(default_factory=list)  # (p, ||f||_p, ||g||_p, ok)
    violations: list = field(default_factory=list)  # ("alpha" | "p", value)

    @property
    def holds(self) -> bool:
        return not self.violations


def _best_distribution(target, alpha, grid):
    try:
        return distribution(target, alpha, "exact")
    except MethodError:
        return distribution(target, alpha, "grid", grid)


def dominance_check(f, g, alphas, ps, tol: float = NORM_TOL, grid: int = 2048) -> DominanceReport:
    """Check ``lambda(|f| >= a) <= lambda(|g| >= a)`` at each ``a``, then ``||f||_p <= ||g||_p``.

    Distributions are exact where both sides allow it (compared with an
    absolute slack of 1e-12); norms use ``tol`` relative to ``||g||_p``.
    """
    rep = DominanceReport()
    for a in alphas:
        lf, lg = _best_distribution(f, a, grid), _best_distribution(g, a, grid)
        if isinstance(lf, Fraction) and isinstance(lg, Fraction):
            ok = lf <= lg + BOUND_TOL
        else:
            ok = float(lf) <= float(lg) + 1e-12
        rep.alpha_checks.append((a, lf, lg, ok))
        if not ok:
            rep.violations.append(("alpha", a))
    for p in ps:
        nf, ng = lp_norm(f, p, root=True), lp_norm(g, p, root=True)
        ok = nf <= ng + tol * max(1.0, abs(ng))
        rep.p_checks.append((p, nf, ng, ok))
        if not ok:
            rep.violations.append(("p", p))
    return rep


@dataclass
class BoundCheck:
    claim: str
    n: int
    lhs: Fraction
    rhs: Fraction
    passed: bool


@dataclass
class MeasureReport:
    checks: list = field(default_factory=list)
    depth: int = 0
    note: str = ""

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_bounds(surface: PathologySurface) -> MeasureReport:
    """Exact checks of the support and gradient-level bounds of a built surface.

    * support: ``sum_n k_n d_n**2 <= sum_n u_n``;
    * for each ``n <= N``: ``lambda(|f'_x| >= 2**n)`` and
      ``lambda(|f'_y| >= 2**n)`` are at most ``sum_{k >= n} u_k``.

    Only levels ``1..N`` exist, so the left sides are exact for the
    truncated surface.
    """
    rep = MeasureReport(depth=surface.depth, note=f"truncated at depth {surface.depth}; support is the union of built squares")
    u = surface.u
    supp = surface.support_measure()
    rhs = u.tail(1)
    rep.checks.append(BoundCheck("support", 0, supp, rhs, supp <= rhs + BOUND_TOL))
    fx, fy = DerivativeField(surface, "x"), DerivativeField(surface, "y")
    for n in range(1, surface.depth + 1):
        rhs = u.tail(n)
        a = 2**n
        for claim, fld in (("grad-x", fx), ("grad-y", fy)):
            lhs = fld.exact_distribution(a)
            rep.checks.append(BoundCheck(claim, n, lhs, rhs, lhs <= rhs + BOUND_TOL))
    return rep
