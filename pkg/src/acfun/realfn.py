"""One- and two-variable real function descriptors.

Descriptors are immutable and evaluable at scalars (exact rationals where the
descriptor supports it) or numpy arrays.  Piecewise-linear descriptors carry
their breakpoints as exact rationals so that variation, tiling and peak
values can be certified without rounding.
"""

from __future__ import annotations

import bisect
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np
from scipy import special

from .errors import (
    CompositionError,
    EvaluationError,
    ParameterError,
    TooManyBreakpoints,
)

# Breakpoint lists longer than this are never materialized.
MAX_BREAKPOINTS = 2_000_000


class Dyadic:
    """Exact dyadic rational ``mantissa * 2**exponent``, kept normalized.

    The mantissa is odd (or zero with exponent 0).  Sums, differences,
    products, negation, halving and comparison stay inside the type; mixing
    with other rationals falls back to :class:`fractions.Fraction`.
    """

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa: int, exponent: int = 0):
        mantissa = int(mantissa)
        exponent = int(exponent)
        if mantissa == 0:
            exponent = 0
        else:
            tz = (mantissa & -mantissa).bit_length() - 1
            mantissa >>= tz
            exponent += tz
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_fraction(cls, q) -> "Dyadic":
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        return cls.from_fraction(Fraction(x))

    @property
    def numerator(self) -> int:
        return self.mantissa << self.exponent if self.exponent >= 0 else self.mantissa

    @property
    def denominator(self) -> int:
        return 1 if self.exponent >= 0 else 1 << -self.exponent

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def halve(self) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent - 1)

    def _align(self, other: "Dyadic"):
        e = min(self.exponent, other.exponent)
        return self.mantissa << (self.exponent - e), other.mantissa << (other.exponent - e), e

    @staticmethod
    def _coerce(other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_fraction() + other if isinstance(other, numbers.Rational) else NotImplemented
        a, b, e = self._align(o)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_fraction() - other if isinstance(other, numbers.Rational) else NotImplemented
        a, b, e = self._align(o)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - self.to_fraction() if isinstance(other, numbers.Rational) else NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return self.to_fraction() * other if isinstance(other, numbers.Rational) else NotImplemented
        return Dyadic(self.mantissa * o.mantissa, self.exponent + o.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.to_fraction() / Fraction(other)

    def __rtruediv__(self, other):
        return Fraction(other) / self.to_fraction()

    def __neg__(self):
        return Dyadic(-self.mantissa, self.exponent)

    def __pos__(self):
        return self

    def __abs__(self):
        return Dyadic(abs(self.mantissa), self.exponent)

    def _cmp(self, other):
        if isinstance(other, float):
            other = Fraction(other)
        return (self.to_fraction() > other) - (self.to_fraction() < other)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (numbers.Rational, float)):
            return self._cmp(other) == 0
        return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash(self.to_fraction())

    def __float__(self):
        return math.ldexp(self.mantissa, self.exponent)

    def __repr__(self):
        return f"Dyadic({self.mantissa}, {self.exponent})"


numbers.Rational.register(Dyadic)


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, Dyadic, int)) and not isinstance(x, bool)


def to_fraction(x) -> Fraction:
    if isinstance(x, Dyadic):
        return x.to_fraction()
    return Fraction(x)


@dataclass(frozen=True)
class Interval:
    lo: object = 0
    hi: object = 1

    def __post_init__(self):
        if self.lo > self.hi:
            raise ParameterError(f"interval lower end {self.lo} exceeds upper end {self.hi}")

    @property
    def length(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi


UNIT = Interval(0, 1)


@dataclass(frozen=True)
class Partition:
    """Strictly increasing points covering an interval end to end."""

    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ParameterError("a partition needs at least two points")
        for a, b in zip(pts, pts[1:]):
            if not a < b:
                raise ParameterError(f"partition points not strictly increasing at {a}, {b}")

    @property
    def interval(self) -> Interval:
        return Interval(self.points[0], self.points[-1])

    def __len__(self):
        return len(self.points)

    @classmethod
    def uniform(cls, iv: Interval, cells: int) -> "Partition":
        if is_exact(iv.lo) and is_exact(iv.hi):
            lo, L = to_fraction(iv.lo), to_fraction(iv.hi) - to_fraction(iv.lo)
            return cls(tuple(lo + L * Fraction(j, cells) for j in range(cells + 1)))
        pts = np.linspace(float(iv.lo), float(iv.hi), cells + 1)
        return cls(tuple(pts.tolist()))

    def union(self, other: "Partition") -> "Partition":
        return Partition(tuple(sorted(set(self.points) | set(other.points))))

    def split(self, at):
        """Induced partitions of ``[lo, at]`` and ``[at, hi]``; ``at`` must be a point."""
        i = self.points.index(at)
        return Partition(self.points[: i + 1]), Partition(self.points[i:])


# ---------------------------------------------------------------------------
# one-variable descriptors


class Fn1:
    """Base class for one-variable descriptors."""

    name = "fn1"
    domain: Interval = UNIT
    open_lo = False
    exact = False
    monotone = False
    piecewise_linear = False
    probe_base = 2.0

    def __call__(self, x):
        if is_exact(x):
            if self.exact:
                self._check_scalar(x)
                return self._eval_exact(to_fraction(x))
            x = float(x)
        arr = np.asarray(x, dtype=float)
        self._check_array(arr)
        out = self._eval(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _eval_exact(self, q: Fraction):
        return self._eval(np.asarray(float(q)))

    def _check_scalar(self, x):
        lo, hi = self.domain.lo, self.domain.hi
        if x < lo or x > hi or (self.open_lo and x == lo):
            raise EvaluationError(f"{self.name}: point {x} outside its domain", point=x)

    def _check_array(self, arr: np.ndarray):
        lo, hi = float(self.domain.lo), float(self.domain.hi)
        bad = ~((arr >= lo) & (arr <= hi))
        if self.open_lo:
            bad |= arr == lo
        if np.any(bad):
            pt = float(arr[bad].flat[0]) if arr.ndim else float(arr)
            raise EvaluationError(f"{self.name}: point {pt!r} outside its domain", point=pt)

    def breakpoints(self, lo=None, hi=None) -> list:
        raise NotImplementedError(f"{self.name} has no exact breakpoints")

    def exact_variation(self, lo, hi):
        """Exact variation on ``[lo, hi]``, or None when not available."""
        if not (self.exact and self.piecewise_linear):
            return None
        lo, hi = to_fraction(lo), to_fraction(hi)
        pts = [lo] + [p for p in self.breakpoints(lo, hi) if lo < p < hi] + [hi]
        vals = [self(p) for p in pts]
        return sum((abs(b - a) for a, b in zip(vals, vals[1:])), Fraction(0))

    def critical_points(self, lo, hi) -> list:
        """Points splitting ``[lo, hi]`` into monotone pieces, when known."""
        if self.piecewise_linear:
            try:
                return [float(p) for p in self.breakpoints(lo, hi)]
            except TooManyBreakpoints:
                return []
        return []

    def __repr__(self):
        return f"<Fn1 {self.name}>"


class XLogX(Fn1):
    """Primitive of ``ln``: ``x ln x - x``, extended by 0 at the origin."""

    name = "xlnx"
    monotone = True
    probe_base = math.e

    def _eval(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x * np.log(x) - x
        return np.where(x == 0, 0.0, out)

    def derivative(self):
        return Log()


class Log(Fn1):
    """``ln x`` on (0, 1]; its modulus has the distribution ``e**-alpha``."""

    name = "xlnx-derivative"
    open_lo = True
    monotone = True
    singular_lo = True

    def _eval(self, x):
        return np.log(x)

    def exact_distribution(self, alpha, prec=256):
        if alpha <= 0:
            return Fraction(1)
        a = to_fraction(alpha)
        with mpmath.workprec(prec):
            return mpf_to_fraction(mpmath.exp(-mpmath.mpf(a.numerator) / a.denominator))

    def lp_tail(self, p, eps):
        """Integral of ``|ln x|**p`` over ``[0, eps]``."""
        L = -math.log(eps)
        return float(special.gammaincc(p + 1, L) * special.gamma(p + 1))


class Sqrt(Fn1):
    name = "sqrt"
    monotone = True
    probe_base = 2.0

    def _eval(self, x):
        return np.sqrt(x)


def _tan_fixed_points(tmin, tmax):
    """Roots of ``tan t = t`` in ``[tmin, tmax]`` (t > 1)."""
    jlo = max(1, int(math.floor(tmin / math.pi)) - 1)
    jhi = int(math.ceil(tmax / math.pi)) + 1
    j = np.arange(jlo, jhi + 1, dtype=float)
    s = (j + 0.5) * np.pi
    t = s - 1.0 / s
    for _ in range(6):
        t = t - (np.sin(t) - t * np.cos(t)) / (t * np.sin(t))
    return t[(t >= tmin) & (t <= tmax)]


MAX_OSCILLATIONS = 10**6


class SineSquare(Fn1):
    """``x**2 sin(1/x)**2`` with value 0 at the origin; ``|g'| <= 4``."""

    name = "sine-square"
    lipschitz_bound = 4.0

    def _eval(self, x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            inv = 1.0 / x
            out = x * x * np.sin(inv) ** 2
        # where 1/x overflows the true value is below x**2, i.e. 0 in floats
        return np.where(np.isfinite(inv), out, 0.0)

    def critical_points(self, lo, hi):
        lo, hi = float(lo), float(hi)
        if hi <= 0:
            return []
        # at most MAX_OSCILLATIONS half-periods; dropping the rest keeps a lower bound
        lo = max(lo, 1.0 / (math.pi * MAX_OSCILLATIONS))
        if lo >= hi:
            return []
        tmin, tmax = 1.0 / hi, 1.0 / lo
        j = np.arange(max(1, math.ceil(tmin / math.pi)), math.floor(tmax / math.pi) + 1)
        zeros = 1.0 / (j * np.pi)
        peaks = 1.0 / _tan_fixed_points(tmin, tmax)
        pts = np.concatenate([zeros, peaks])
        pts = pts[(pts > lo) & (pts < hi)]
        return np.sort(pts).tolist()


class Identity(Fn1):
    name = "id"
    exact = True
    monotone = True
    piecewise_linear = True

    def _eval(self, x):
        return x

    def _eval_exact(self, q):
        return q

    def breakpoints(self, lo=None, hi=None):
        return [Fraction(0), Fraction(1)]


class Constant(Fn1):
    exact = True
    monotone = True
    piecewise_linear = True

    def __init__(self, c):
        self.c = c
        self.name = f"const:{c}"

    def _eval(self, x):
        return np.full_like(x, float(self.c))

    def _eval_exact(self, q):
        return to_fraction(self.c) if is_exact(self.c) else self.c

    def breakpoints(self, lo=None, hi=None):
        return [Fraction(0), Fraction(1)]


class Scaled(Fn1):
    def __init__(self, f: Fn1, c):
        self.f, self.c = f, c
        self.name = f"{c}*{f.name}"
        self.domain, self.open_lo = f.domain, f.open_lo
        self.monotone = f.monotone

    def _eval(self, x):
        return float(self.c) * self.f._eval(x)

    def exact_distribution(self, alpha):
        if not hasattr(self.f, "exact_distribution"):
            raise NotImplementedError(f"{self.f.name} has no exact distribution")
        if self.c == 0:
            return Fraction(1) if alpha <= 0 else Fraction(0)
        return self.f.exact_distribution(to_fraction(alpha) / abs(to_fraction(self.c)))


class Compose1(Fn1):
    """``outer(inner(x))``."""

    def __init__(self, outer: Fn1, inner: Fn1):
        self.outer, self.inner = outer, inner
        self.name = f"{outer.name}o{inner.name}"
        self.domain, self.open_lo = inner.domain, inner.open_lo
        self.monotone = outer.monotone and inner.monotone

    def _eval(self, x):
        return self.outer(self.inner._eval(x))

    def critical_points(self, lo, hi):
        if self.outer.monotone:
            return self.inner.critical_points(lo, hi)
        return []


class PiecewiseLinear(Fn1):
    """Continuous piecewise-linear function through ``(xs[i], ys[i])``."""

    piecewise_linear = True

    def __init__(self, xs: Sequence, ys: Sequence, name="pl"):
        if len(xs) != len(ys) or len(xs) < 2:
            raise ParameterError("need matching breakpoint and value sequences of length >= 2")
        self.xs = tuple(xs)
        self.ys = tuple(ys)
        for a, b in zip(self.xs, self.xs[1:]):
            if not a < b:
                raise ParameterError(f"breakpoints not strictly increasing at {a}, {b}")
        self.name = name
        self.exact = all(is_exact(v) for v in self.xs + self.ys)
        self._fx = [to_fraction(v) for v in self.xs] if self.exact else None
        self._xf = np.array([float(v) for v in self.xs])
        self._yf = np.array([float(v) for v in self.ys])
        self.domain = Interval(self.xs[0], self.xs[-1])
        diffs = np.diff(self._yf)
        self.monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))

    def _eval(self, x):
        return np.interp(x, self._xf, self._yf)

    def _eval_exact(self, q):
        xs = self._fx
        i = bisect.bisect_right(xs, q) - 1
        if i >= len(xs) - 1:
            return to_fraction(self.ys[-1])
        x0, x1 = xs[i], xs[i + 1]
        y0, y1 = to_fraction(self.ys[i]), to_fraction(self.ys[i + 1])
        if q == x0:
            return y0
        return y0 + (y1 - y0) * (q - x0) / (x1 - x0)

    def breakpoints(self, lo=None, hi=None):
        lo = self.xs[0] if lo is None else lo
        hi = self.xs[-1] if hi is None else hi
        return [p for p in self.xs if lo <= p <= hi]

    def pieces(self):
        return list(zip(self.xs, self.xs[1:], self.ys, self.ys[1:]))

    def exact_distribution(self, alpha):
        """Exact measure of ``{|f| >= alpha}`` (exact descriptors only)."""
        if not self.exact:
            raise NotImplementedError
        alpha = to_fraction(alpha)
        if alpha <= 0:
            return to_fraction(self.xs[-1]) - to_fraction(self.xs[0])
        total = Fraction(0)
        for x0, x1, y0, y1 in self.pieces():
            x0, x1, y0, y1 = map(to_fraction, (x0, x1, y0, y1))
            total += _linear_superlevel(x0, x1, y0, y1, alpha)
            total += _linear_superlevel(x0, x1, -y0, -y1, alpha)
        return total


def _linear_superlevel(x0, x1, y0, y1, alpha):
    """Length of ``{x in [x0,x1] : y(x) >= alpha}`` for linear ``y``."""
    if y0 >= alpha and y1 >= alpha:
        return x1 - x0
    if y0 < alpha and y1 < alpha:
        return Fraction(0)
    t = (alpha - y0) / (y1 - y0)
    cross = x0 + t * (x1 - x0)
    return (x1 - cross) if y1 >= alpha else (cross - x0)


class StepFunction(Fn1):
    """Right-continuous step function: ``values[i]`` on ``[breaks[i], breaks[i+1])``."""

    def __init__(self, breaks: Sequence, values: Sequence, name="step"):
        if len(breaks) != len(values) + 1:
            raise ParameterError("need len(breaks) == len(values) + 1")
        self.breaks = tuple(breaks)
        self.values = tuple(values)
        self.name = name
        self.exact = all(is_exact(v) for v in self.breaks + self.values)
        self._bf = np.array([float(b) for b in self.breaks])
        self._vf = np.array([float(v) for v in self.values])
        self._fb = [to_fraction(b) for b in self.breaks] if self.exact else None
        self.domain = Interval(self.breaks[0], self.breaks[-1])

    def _eval(self, x):
        idx = np.clip(np.searchsorted(self._bf, x, side="right") - 1, 0, len(self.values) - 1)
        return self._vf[idx]

    def _eval_exact(self, q):
        i = min(bisect.bisect_right(self._fb, q) - 1, len(self.values) - 1)
        return to_fraction(self.values[i])

    def cells(self):
        return list(zip(self.breaks, self.breaks[1:], self.values))

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        pts = sorted(set(map(to_fraction, self.breaks)) | set(map(to_fraction, other.breaks)))
        vals = [self(a) - other(a) for a in pts[:-1]]
        return StepFunction(pts, vals, name=f"{self.name}-{other.name}")

    def exact_distribution(self, alpha):
        alpha = to_fraction(alpha) if is_exact(alpha) else alpha
        total = Fraction(0)
        for a, b, v in self.cells():
            if abs(to_fraction(v)) >= alpha:
                total += to_fraction(b) - to_fraction(a)
        return total

    def layer_cake(self, p):
        """Integral of ``|f|**p``: exact for integer ``p``."""
        if float(p).is_integer():
            p = int(p)
            return sum(
                (abs(to_fraction(v)) ** p * (to_fraction(b) - to_fraction(a)) for a, b, v in self.cells()),
                Fraction(0),
            )
        return math.fsum(abs(float(v)) ** p * float(to_fraction(b) - to_fraction(a)) for a, b, v in self.cells())


def mpf_to_fraction(x) -> Fraction:
    man, exp = mpmath.mpf(x).man_exp
    man = int(man)
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


# ---------------------------------------------------------------------------
# two-variable descriptors


class Fn2:
    name = "fn2"
    exact = False

    def __call__(self, x, y):
        if is_exact(x) and is_exact(y) and self.exact:
            self._check_scalar(x, y)
            return self._eval_exact(to_fraction(x), to_fraction(y))
        xa = np.asarray(float(x) if is_exact(x) else x, dtype=float)
        ya = np.asarray(float(y) if is_exact(y) else y, dtype=float)
        xa, ya = np.broadcast_arrays(xa, ya)
        bad = ~((xa >= 0) & (xa <= 1) & (ya >= 0) & (ya <= 1))
        if np.any(bad):
            i = np.flatnonzero(bad)[0]
            pt = (float(xa.flat[i]), float(ya.flat[i]))
            raise EvaluationError(f"{self.name}: point {pt} outside the unit square", point=pt)
        out = self._eval(xa, ya)
        if out.ndim == 0:
            return float(out)
        return out

    def _check_scalar(self, x, y):
        if not (0 <= x <= 1 and 0 <= y <= 1):
            raise EvaluationError(f"{self.name}: point ({x}, {y}) outside the unit square", point=(x, y))

    def _eval(self, x, y):
        raise NotImplementedError

    def _eval_exact(self, x, y):
        return self._eval(np.asarray(float(x)), np.asarray(float(y)))

    def __repr__(self):
        return f"<Fn2 {self.name}>"


class Schwarz(Fn2):
    """``2xy / (x**2 + y**2)``, 0 at the origin.

    Each section ``y = y0 > 0`` is Lipschitz with constant ``2 / y0``; the
    diagonal is 1 off the origin and 0 at it.
    """

    name = "schwarz"
    exact = True

    def _eval(self, x, y):
        s = np.maximum(np.abs(x), np.abs(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            xs, ys = x / s, y / s
            out = 2 * xs * ys / (xs * xs + ys * ys)
        return np.where(s == 0, 0.0, out)

    def _eval_exact(self, x, y):
        if x == 0 and y == 0:
            return Fraction(0)
        return 2 * x * y / (x * x + y * y)

    def section_lipschitz_bound(self, level):
        return 2.0 / float(level)


class Lift(Fn2):
    """``phi(x, y) = f(x)``; the second argument is ignored."""

    def __init__(self, f: Fn1):
        self.f = f
        self.name = f"lift({f.name})"
        self.exact = f.exact

    def _eval(self, x, y):
        return self.f(x)

    def _eval_exact(self, x, y):
        return self.f(x)

    def exact_distribution(self, alpha):
        if not hasattr(self.f, "exact_distribution"):
            raise NotImplementedError(f"{self.f.name} has no exact distribution")
        return self.f.exact_distribution(alpha)


class Composed2(Fn1):
    """``t -> F(g1(t), g2(t))``."""

    def __init__(self, F: Fn2, g1: Fn1, g2: Fn1, tol=1e-12):
        self.F, self.g1, self.g2, self.tol = F, g1, g2, tol
        self.name = f"{F.name}({g1.name},{g2.name})"
        self.domain = g1.domain
        self.open_lo = g1.open_lo or g2.open_lo

    def _eval(self, t):
        u = np.asarray(self.g1(t), dtype=float)
        v = np.asarray(self.g2(t), dtype=float)
        for arr, g in ((u, self.g1), (v, self.g2)):
            bad = (arr < -self.tol) | (arr > 1 + self.tol)
            if np.any(bad):
                raise CompositionError(
                    f"inner function {g.name} leaves [0, 1]: value {float(arr[bad].flat[0])!r}",
                    point=float(np.asarray(t)[bad].flat[0]) if np.ndim(t) else float(t),
                )
        return self.F(np.clip(u, 0, 1), np.clip(v, 0, 1))


class Section(Fn1):
    def __init__(self, F: Fn2, axis: str, level):
        self.F, self.axis, self.level = F, axis, level
        self.name = f"{F.name}|{axis}@{level}"

    def _eval(self, t):
        lv = float(self.level)
        if self.axis == "x":
            return np.asarray(self.F(t, np.full_like(t, lv)))
        return np.asarray(self.F(np.full_like(t, lv), t))


class Diagonal(Fn1):
    def __init__(self, F: Fn2):
        self.F = F
        self.name = f"diag({F.name})"

    def _eval(self, t):
        return np.asarray(self.F(t, t))


def compose(outer: Fn1, inner: Fn1) -> Fn1:
    return Compose1(outer, inner)


def compose2(F: Fn2, g1: Fn1, g2: Fn1, tol: float = 1e-12) -> Fn1:
    """Superposition ``t -> F(g1(t), g2(t))``."""
    return Composed2(F, g1, g2, tol=tol)


def section(F: Fn2, axis: str, level) -> Fn1:
    """``x -> F(x, level)`` for axis ``"x"``, ``y -> F(level, y)`` for ``"y"``."""
    if axis not in ("x", "y"):
        raise ParameterError(f"axis must be 'x' or 'y', got {axis!r}")
    if not 0 <= level <= 1:
        raise EvaluationError(f"section level {level} outside [0, 1]", point=level)
    if isinstance(F, Lift):
        return F.f if axis == "x" else Constant(F.f(level))
    custom = getattr(F, "exact_section", None)
    if custom is not None:
        return custom(axis, level)
    return Section(F, axis, level)


def diagonal(F: Fn2) -> Fn1:
    if isinstance(F, Lift):
        return F.f
    custom = getattr(F, "exact_diagonal", None)
    if custom is not None:
        return custom()
    return Diagonal(F)


def lift(f: Fn1) -> Fn2:
    return Lift(f)


def sample_grid(iv: Interval, n: int) -> np.ndarray:
    return np.linspace(float(iv.lo), float(iv.hi), n)


def fsum_abs_diff(values: Iterable[float]) -> float:
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=float)
    return math.fsum(np.abs(np.diff(v)).tolist())
