"""Finite-depth builders for the counterexample objects.

* ``build_zigzag``: a 1-Lipschitz piecewise-linear path bouncing ``k_n``
  times between each witness pair, so that ``f o g`` picks up at least
  ``2 n d_n k_n`` of variation per level.
* ``build_pathology``: a sum of disjoint sup-norm pyramids on diagonal
  squares; separately Lipschitz, with a diagonal of unbounded variation and
  a derivative whose large values live on sets of small measure.
* sequence specs and the summable-tail transform feeding the surface.
* Rademacher step functions and their sawtooth primitives.

All level parameters are exact rationals.  Levels with astronomically many
segments or squares are never enumerated; evaluation locates the containing
piece arithmetically.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from .errors import (
    CatalogError,
    DegenerateWitness,
    DepthLimitError,
    EvaluationError,
    MonotonicityError,
    ParameterError,
    TooManyBreakpoints,
    WitnessNotFound,
)
from .realfn import (
    MAX_BREAKPOINTS,
    UNIT,
    Compose1,
    Constant,
    Dyadic,
    Fn1,
    Fn2,
    Identity,
    Interval,
    Lift,
    Log,
    PiecewiseLinear,
    Schwarz,
    SineSquare,
    Sqrt,
    StepFunction,
    XLogX,
    mpf_to_fraction,
    to_fraction,
)

# Levels whose square count needs more bits than this are refused.
MAX_K_BITS = 16384
# Above this many squares per level the float evaluation path is unreliable.
FLOAT_SAFE_K = 2**40


# ---------------------------------------------------------------------------
# sequences


@lru_cache(maxsize=None)
def _lnx_tail(n: int, prec: int = 256) -> Fraction:
    with mpmath.workprec(prec):
        return mpf_to_fraction(mpmath.exp(-mpmath.mpf(2) ** (n + 1)))


def _parse_number(text) -> Fraction:
    return Fraction(str(text).strip())


@dataclass(frozen=True)
class SeqSpec:
    """A positive sequence indexed from 1, with exact values on demand.

    families: ``geometric`` (r**n), ``harmonic`` (1/n), ``harmonic-squared``
    (1/n**2), ``constant`` (c), ``explicit`` (listed values), ``lnx-tail``
    (exp(-2**(n+1)), the measure of ``{|ln x| >= 2**(n+1)}``) and
    ``transformed`` (v_n/n - v_{n+1}/(n+1) for a base sequence v).
    """

    family: str
    params: tuple = ()
    length: Optional[int] = None
    base: Optional["SeqSpec"] = None

    def __post_init__(self):
        if self.family == "geometric":
            r = self.params[0]
            if not 0 < r:
                raise ParameterError(f"geometric ratio must be positive, got {r}")
        elif self.family == "constant":
            if not self.params[0] > 0:
                raise ParameterError("constant sequence must be positive")
        elif self.family == "explicit":
            if any(v <= 0 for v in self.params):
                raise ParameterError("explicit sequence values must be positive")
        elif self.family not in ("harmonic", "harmonic-squared", "lnx-tail", "transformed"):
            raise ParameterError(f"unknown sequence family {self.family!r}")

    def describe(self) -> str:
        if self.family == "transformed":
            return f"transformed({self.base.describe()})"
        if self.family == "explicit":
            return "explicit:" + ",".join(str(v) for v in self.params)
        if self.params:
            return f"{self.family}:{','.join(str(p) for p in self.params)}"
        return self.family

    @property
    def summable(self) -> bool:
        if self.family == "geometric":
            return self.params[0] < 1
        return self.family in ("harmonic-squared", "explicit", "lnx-tail", "transformed")

    def __getitem__(self, n: int) -> Fraction:
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        if self.length is not None and n > self.length:
            raise IndexError(f"{self.describe()} is only defined up to index {self.length}")
        fam = self.family
        if fam == "geometric":
            return Fraction(self.params[0]) ** n
        if fam == "harmonic":
            return Fraction(1, n)
        if fam == "harmonic-squared":
            return Fraction(1, n * n)
        if fam == "constant":
            return Fraction(self.params[0])
        if fam == "explicit":
            return Fraction(self.params[n - 1])
        if fam == "lnx-tail":
            return _lnx_tail(n)
        vn, vn1 = self.base[n], self.base[n + 1]
        if vn1 > vn:
            raise MonotonicityError(f"base sequence increases at index {n}", index=n)
        return vn / n - vn1 / (n + 1)

    def values(self, n_max: int) -> list:
        return [self[n] for n in range(1, n_max + 1)]

    def tail(self, n: int) -> Fraction:
        """``sum_{k >= n} u_k`` in closed form, or an exact lower bound.

        A lower bound can only make a ``lhs <= tail`` check harder to pass.
        """
        fam = self.family
        if fam == "geometric":
            r = Fraction(self.params[0])
            if r >= 1:
                raise ParameterError("geometric tail diverges for ratio >= 1")
            return r**n / (1 - r)
        if fam == "transformed":
            return self.base[n] / n
        if fam == "explicit":
            return sum(self.params[n - 1 :], Fraction(0)) if n <= len(self.params) else Fraction(0)
        if fam == "harmonic-squared":
            M = n + 64
            return sum((Fraction(1, k * k) for k in range(n, M)), Fraction(0)) + Fraction(1, M)
        if fam == "lnx-tail":
            return sum((_lnx_tail(k) for k in range(n, n + 4)), Fraction(0))
        raise ParameterError(f"{self.describe()} is not summable")

    @property
    def tail_is_exact(self) -> bool:
        return self.family in ("geometric", "transformed", "explicit")


def geometric(r) -> SeqSpec:
    return SeqSpec("geometric", (Fraction(r),))


def seq_transform(v: SeqSpec) -> SeqSpec:
    """``u_n = v_n/n - v_{n+1}/(n+1)``, whose tails telescope to ``v_n / n``.

    ``v`` must be positive and non-increasing; an increase is reported with
    its index.
    """
    length = None if v.length is None else v.length - 1
    check = 64 if length is None else length
    prev = v[1]
    for n in range(1, check + 1):
        nxt = v[n + 1]
        if nxt > prev:
            raise MonotonicityError(f"base sequence increases at index {n}", index=n)
        prev = nxt
    return SeqSpec("transformed", (), length, v)


def lnx_tail_sequence(n_max: int) -> SeqSpec:
    """``v_n = exp(-2**(n+1))`` for ``n <= n_max``.

    This is ``lambda({|ln x| >= 2**(n+1)})`` on (0, 1], since the measure of
    ``{|ln x| >= a}`` is ``exp(-a)``.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    return SeqSpec("lnx-tail", (), n_max)


def parse_seq(text: str) -> SeqSpec:
    """Parse ``geometric:0.5``, ``transformed:harmonic``, ``explicit:0.1,0.01`` ..."""
    text = text.strip()
    if text.startswith("transformed:"):
        return seq_transform(parse_seq(text[len("transformed:") :]))
    fam, _, rest = text.partition(":")
    if fam == "geometric":
        return geometric(_parse_number(rest or "0.5"))
    if fam == "constant":
        return SeqSpec("constant", (_parse_number(rest or "1"),))
    if fam == "explicit":
        vals = tuple(_parse_number(v) for v in rest.split(",") if v.strip())
        return SeqSpec("explicit", vals, len(vals))
    if fam == "lnx-tail":
        return SeqSpec("lnx-tail", (), int(rest) if rest else None)
    if fam in ("harmonic", "harmonic-squared") and not rest:
        return SeqSpec(fam)
    raise ParameterError(f"cannot parse sequence {text!r}")


# ---------------------------------------------------------------------------
# gallery


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    kind: str
    domain: str
    anchor: str


_CATALOG = {
    "schwarz": GalleryEntry(
        "schwarz", "Fn2", "[0,1]^2", "2xy/(x^2+y^2): separately Lipschitz off the origin, diagonal jumps at 0"
    ),
    "sine-square": GalleryEntry(
        "sine-square", "Fn1", "[0,1]", "x^2 sin^2(1/x): Lipschitz with |g'| <= 4, inner function of the classical example"
    ),
    "sqrt": GalleryEntry("sqrt", "Fn1", "[0,1]", "x^(1/2): absolutely continuous, not Lipschitz at 0"),
    "sqrt-sine": GalleryEntry(
        "sqrt-sine", "Fn1", "[0,1]", "sqrt o sine-square = x|sin(1/x)|: superposition of infinite variation"
    ),
    "xlnx": GalleryEntry(
        "xlnx", "Fn1", "[0,1]", "x ln x - x, primitive of ln: absolutely continuous, derivative in every L^p, not Lipschitz"
    ),
    "xlnx-derivative": GalleryEntry(
        "xlnx-derivative", "Fn1", "(0,1]", "ln x: unbounded, |ln x| has distribution exp(-alpha)"
    ),
    "id": GalleryEntry("id", "Fn1", "[0,1]", "identity path t -> t"),
    "const": GalleryEntry("const:<c>", "Fn1", "[0,1]", "constant path"),
    "lift": GalleryEntry("lift:<name>", "Fn2", "[0,1]^2", "phi(x,y) = f(x), depends on y only formally"),
}


def gallery_catalog() -> list:
    return list(_CATALOG.values())


def gallery(name: str):
    """Descriptor for a named gallery item (``const:<c>`` and ``lift:<name>`` take an argument)."""
    name = name.strip()
    if name.startswith("const:"):
        c = name.split(":", 1)[1]
        return Constant(_parse_number(c))
    if name.startswith("lift:"):
        inner = gallery(name.split(":", 1)[1])
        if not isinstance(inner, Fn1):
            raise CatalogError(f"lift needs a one-variable item, got {name!r}")
        return Lift(inner)
    simple = {
        "schwarz": Schwarz,
        "sine-square": SineSquare,
        "sqrt": Sqrt,
        "xlnx": XLogX,
        "xlnx-derivative": Log,
        "ln": Log,
        "id": Identity,
    }
    if name in simple:
        return simple[name]()
    if name == "sqrt-sine":
        return Compose1(Sqrt(), SineSquare())
    raise CatalogError(f"unknown gallery item {name!r}")


# ---------------------------------------------------------------------------
# witnesses and the zigzag path


@dataclass
class WitnessSeq:
    """Pairs ``(x_n, y_n)`` with ``|f(x_n) - f(y_n)| / d_n >= 2 n**3 max|f|``.

    Points are exact: Fractions for scalar witnesses, tuples of Fractions
    for points of the unit square.
    """

    pairs: list
    distances: list
    quotients: list = field(default_factory=list)
    bounds: list = field(default_factory=list)
    max_abs: float = float("nan")
    dim: int = 1

    def __len__(self):
        return len(self.pairs)


def _distance(p, q):
    if isinstance(p, tuple):
        dx = [to_fraction(a) - to_fraction(b) for a, b in zip(p, q)]
        if all(v == 0 for v in dx):
            return Fraction(0)
        return Fraction(math.hypot(*(float(v) for v in dx)))
    return abs(to_fraction(p) - to_fraction(q))


def witness_seq(pairs) -> WitnessSeq:
    """Wrap user-supplied pairs, computing their distances."""
    pairs = [
        (tuple(map(to_fraction, x)), tuple(map(to_fraction, y))) if isinstance(x, (tuple, list)) else (to_fraction(x), to_fraction(y))
        for x, y in pairs
    ]
    dim = len(pairs[0][0]) if pairs and isinstance(pairs[0][0], tuple) else 1
    return WitnessSeq(pairs, [_distance(x, y) for x, y in pairs], dim=dim)


def _grid_max_abs(f, iv: Interval, n=4097) -> float:
    if isinstance(f, Fn2):
        g = np.linspace(0.0, 1.0, 257)
        X, Y = np.meshgrid(g, g)
        return float(np.max(np.abs(f(X, Y))))
    xs = np.linspace(float(iv.lo), float(iv.hi), n)
    if f.open_lo:
        xs = xs[1:]
    return float(np.max(np.abs(np.asarray(f(xs), dtype=float))))


def find_witnesses(f, iv: Interval = UNIT, count: int = 6, budget: int = 2000) -> WitnessSeq:
    """Witness pairs accumulating at the left end of ``iv``.

    Probes ``x = lo + s``, ``y = lo + 2 s`` at geometric scales
    ``s = base**-m`` (``base`` is ``f.probe_base``: e for xlnx, 2 otherwise)
    and keeps, for ``n = 1..count``, the first scale past the previous one
    whose difference quotient reaches ``2 n**3 max|f|``.  For a function of
    two variables the probe pairs are ``(s, s)`` and ``(s, 0)`` near the
    origin.  Raises :class:`WitnessNotFound` when ``budget`` scales run out.
    """
    M = _grid_max_abs(f, iv)
    two_d = isinstance(f, Fn2)
    base = 2.0 if two_d else float(getattr(f, "probe_base", 2.0))
    lo, hi = float(iv.lo), float(iv.hi)
    pairs, dists, quots, bounds = [], [], [], []
    m = 0
    for n in range(1, count + 1):
        need = 2 * n**3 * M
        while True:
            m += 1
            if m > budget:
                raise WitnessNotFound(
                    f"no witness for level {n} within {budget} scales (need quotient >= {need:.6g}); "
                    f"{getattr(f, 'name', f)} may be Lipschitz at the probed scales"
                )
            s = math.exp(-m) if base == math.e else base ** (-m)
            if s == 0.0 or lo + s == lo:
                raise WitnessNotFound(f"probe scale underflowed before level {n} was reached")
            if two_d:
                p, q = (s, s), (s, 0.0)
                d = s
                fp, fq = f(*p), f(*q)
            else:
                p, q = lo + s, lo + 2 * s
                if q > hi:
                    continue
                d = q - p
                if f.exact:
                    fp, fq = f(Fraction(p)), f(Fraction(q))
                else:
                    fp, fq = f(p), f(q)
            if isinstance(fp, Fraction) and isinstance(fq, Fraction):
                quot = float(abs(fp - fq) / Fraction(d))
            else:
                diff = abs(fp - fq)
                if diff <= 64 * np.finfo(float).eps * max(abs(fp), abs(fq)):
                    continue  # below roundoff; the quotient would be noise
                quot = diff / d
            if quot >= need and Fraction(d) <= Fraction(1, n * n):
                break
        if two_d:
            xp = tuple(Fraction(v) for v in p)
            yq = tuple(Fraction(v) for v in q)
        else:
            xp, yq = Fraction(p), Fraction(q)
        pairs.append((xp, yq))
        dists.append(_distance(xp, yq))
        quots.append(quot)
        bounds.append(need)
    return WitnessSeq(pairs, dists, quots, bounds, M, dim=2 if two_d else 1)


@dataclass(frozen=True)
class ZigzagLevel:
    n: int
    x: object
    y: object
    d: Fraction
    k: int
    a: Fraction
    b: Fraction


def _lerp(p, q, t):
    if isinstance(p, tuple):
        return tuple(a + t * (b - a) for a, b in zip(p, q))
    return p + t * (q - p)


class ZigzagMap(Fn1):
    """1-Lipschitz piecewise-linear path on ``[0, b_N]``.

    On ``[a_n, b_n]`` it is linear on each ``[a_n + (j-1) d_n, a_n + j d_n]``
    with ``g(a_n + 2 i d_n) = x_n`` and ``g(a_n + (2i - 1) d_n) = y_n``; on
    ``[b_n, a_{n+1}]`` it runs straight from ``x_n`` to ``x_{n+1}``.
    """

    exact = True
    piecewise_linear = True

    def __init__(self, levels, dim, witnesses):
        self.levels = tuple(levels)
        self.dim = dim
        self.witnesses = witnesses
        self.end = self.levels[-1].b
        self.domain = Interval(Fraction(0), self.end)
        self.name = f"zigzag[{len(self.levels)}]"
        self._starts = [lv.a for lv in self.levels]

    def point(self, t):
        t = to_fraction(t)
        if t < 0 or t > self.end:
            raise EvaluationError(f"{self.name}: point {t} outside [0, {float(self.end)}]", point=t)
        i = bisect.bisect_right(self._starts, t) - 1
        lv = self.levels[i]
        if t <= lv.b:
            s = (t - lv.a) / lv.d
            j = math.floor(s)
            if j >= 2 * lv.k:
                return lv.x
            frac = s - j
            p, q = (lv.x, lv.y) if j % 2 == 0 else (lv.y, lv.x)
            return _lerp(p, q, frac)
        nxt = self.levels[i + 1]
        return _lerp(lv.x, nxt.x, (t - lv.b) / (nxt.a - lv.b))

    def _eval_exact(self, q):
        if self.dim != 1:
            raise ParameterError("two-dimensional zigzag: evaluate a component instead")
        return self.point(q)

    def _clamp(self, v: float) -> Fraction:
        # float(end) may round above the exact end; the domain check already passed
        return min(Fraction(v), self.end)

    def _eval(self, x):
        flat = [float(self._eval_exact(self._clamp(v))) for v in np.ravel(x)]
        return np.asarray(flat, dtype=float).reshape(np.shape(x))

    def component(self, i: int) -> "ZigzagComponent":
        return ZigzagComponent(self, i)

    def breakpoint_count(self) -> int:
        return sum(2 * lv.k + 1 for lv in self.levels)

    def breakpoints(self, lo=None, hi=None):
        lo = Fraction(0) if lo is None else to_fraction(lo)
        hi = self.end if hi is None else to_fraction(hi)
        out = []
        for lv in self.levels:
            if lv.b < lo or lv.a > hi:
                continue
            j0 = max(0, math.ceil((lo - lv.a) / lv.d))
            j1 = min(2 * lv.k, math.floor((hi - lv.a) / lv.d))
            if len(out) + (j1 - j0 + 1) > MAX_BREAKPOINTS:
                raise TooManyBreakpoints(f"{self.name} has more than {MAX_BREAKPOINTS} breakpoints in range")
            out.extend(lv.a + j * lv.d for j in range(j0, j1 + 1))
        return out

    def level_partition(self, n: int) -> list:
        lv = self.levels[n - 1]
        if 2 * lv.k + 1 > MAX_BREAKPOINTS:
            raise TooManyBreakpoints(f"level {n} has {2 * lv.k + 1} breakpoints")
        return [lv.a + j * lv.d for j in range(2 * lv.k + 1)]

    def slope_range(self):
        """Smallest and largest slope magnitude over all pieces (as floats)."""
        slopes = []
        for i, lv in enumerate(self.levels):
            slopes.append(float(_distance(lv.x, lv.y) / lv.d))
            if i + 1 < len(self.levels):
                nxt = self.levels[i + 1]
                gap = nxt.a - lv.b
                if gap > 0:
                    slopes.append(float(_distance(lv.x, nxt.x) / gap))
        return min(slopes), max(slopes)

    def exact_variation(self, lo, hi):
        if self.dim != 1:
            return None
        lo, hi = max(to_fraction(lo), Fraction(0)), min(to_fraction(hi), self.end)
        total = Fraction(0)
        for i, lv in enumerate(self.levels):
            s, t = max(lo, lv.a), min(hi, lv.b)
            if s < t:
                total += (t - s) * abs(lv.x - lv.y) / lv.d
            if i + 1 < len(self.levels):
                nxt = self.levels[i + 1]
                s, t = max(lo, lv.b), min(hi, nxt.a)
                if s < t:
                    total += (t - s) * abs(lv.x - nxt.x) / (nxt.a - lv.b)
        return total

    def level_variation(self, outer, n: int) -> float:
        """Variation of ``outer o g`` over the level-``n`` breakpoint partition.

        The partition points alternate between ``x_n`` and ``y_n``, so the
        ``2 k_n`` increments are all ``|outer(x_n) - outer(y_n)|``.
        """
        lv = self.levels[n - 1]
        fx = outer(*lv.x) if self.dim == 2 else outer(lv.x)
        fy = outer(*lv.y) if self.dim == 2 else outer(lv.y)
        return float(2 * lv.k * abs(to_fraction(fx) - to_fraction(fy)))

    def level_lower_bound(self, n: int) -> float:
        """``2 n d_n k_n``."""
        lv = self.levels[n - 1]
        return float(2 * n * lv.d * lv.k)


class ZigzagComponent(Fn1):
    exact = True
    piecewise_linear = True

    def __init__(self, zig: ZigzagMap, i: int):
        self.zig, self.i = zig, i
        self.domain = zig.domain
        self.name = f"{zig.name}[{i}]"

    def _eval_exact(self, q):
        p = self.zig.point(q)
        return p[self.i] if isinstance(p, tuple) else p

    def _eval(self, x):
        flat = [float(self._eval_exact(self.zig._clamp(v))) for v in np.ravel(x)]
        return np.asarray(flat, dtype=float).reshape(np.shape(x))

    def breakpoints(self, lo=None, hi=None):
        return self.zig.breakpoints(lo, hi)


def build_zigzag(w: WitnessSeq, N: Optional[int] = None) -> ZigzagMap:
    """Truncated zigzag path through the first ``N`` witness pairs.

    ``k_n = floor(1 / (n**2 d_n))``, ``b_n = a_n + 2 k_n d_n`` and
    ``a_{n+1} = b_n + |x_n - x_{n+1}|`` with ``a_1 = 0``.  A pair with
    ``d_n = 0`` or ``d_n > 1/n**2`` (so ``k_n = 0``) is rejected.
    """
    N = len(w) if N is None else N
    if N < 1 or N > len(w):
        raise ParameterError(f"depth {N} not in 1..{len(w)}")
    levels = []
    a = Fraction(0)
    for n in range(1, N + 1):
        x, y = w.pairs[n - 1]
        d = to_fraction(w.distances[n - 1])
        if d == 0:
            raise DegenerateWitness(f"witness pair {n} has zero distance")
        k = math.floor(1 / (n * n * d))
        if k < 1:
            raise DegenerateWitness(f"witness pair {n} has d = {float(d):.6g} > 1/n^2, so k_n = 0")
        b = a + 2 * k * d
        levels.append(ZigzagLevel(n, x, y, d, k, a, b))
        if n < N:
            a = b + _distance(x, w.pairs[n][0])
    return ZigzagMap(levels, w.dim, w)


# ---------------------------------------------------------------------------
# pyramid surface


@dataclass(frozen=True)
class PathologyLevel:
    n: int
    u: Fraction
    k: int
    d: Fraction

    @property
    def lo(self) -> Fraction:
        return Fraction(1, 2**self.n)

    @property
    def hi(self) -> Fraction:
        return Fraction(1, 2 ** (self.n - 1))

    @property
    def height(self) -> Fraction:
        return Fraction(1, 2 * self.k)

    @property
    def slope(self) -> int:
        return 2**self.n

    def square(self, i: int):
        """``(a, b, c)`` of square ``i`` (1-based)."""
        a = self.lo + (i - 1) * self.d
        return a, a + self.d, a + self.d / 2

    def squares(self):
        for i in range(1, self.k + 1):
            yield self.square(i)

    def tent(self, q: Fraction, i: int) -> Fraction:
        a, b, c = self.square(i)
        return max(Fraction(0), self.height * (1 - 2 * abs(q - c) / self.d))


def _level_index(q: Fraction) -> int:
    """``n`` with ``2**-n <= q < 2**-(n-1)`` for ``0 < q < 1``."""
    n = max(1, (q.denominator // q.numerator).bit_length())
    while q < Fraction(1, 2**n):
        n += 1
    while n > 1 and q >= Fraction(1, 2 ** (n - 1)):
        n -= 1
    return n


class PathologySurface(Fn2):
    """Sum of pyramids ``h_n (1 - 2 max(|x-c|, |y-c|) / d_n)`` over levels ``1..N``.

    Level ``n`` tiles ``I_n = [2**-n, 2**-(n-1)]`` by ``k_n`` intervals of
    length ``d_n = 1 / (2**n k_n)`` with ``k_n = floor(1 / (4**n u_n)) + 1``;
    the pyramid on each square ``I_{n,i} x I_{n,i}`` peaks at ``1 / (2 k_n)``.
    """

    exact = True

    def __init__(self, u: SeqSpec, levels):
        self.u = u
        self.levels = tuple(levels)
        self.depth = len(self.levels)
        self.name = f"pathology[{u.describe()},N={self.depth}]"
        N = self.depth
        self._d = np.zeros(N + 2)
        self._k = np.ones(N + 2)
        self._h = np.zeros(N + 2)
        self._float_ok = np.zeros(N + 2, dtype=bool)
        for lv in self.levels:
            ok = lv.k <= FLOAT_SAFE_K
            self._float_ok[lv.n] = ok
            if ok:
                self._d[lv.n] = float(lv.d)
                self._k[lv.n] = float(lv.k)
                self._h[lv.n] = float(lv.height)

    def level(self, n: int) -> PathologyLevel:
        return self.levels[n - 1]

    def locate(self, q):
        """``(level, i)`` of the open square interval containing ``q``, else None."""
        q = to_fraction(q)
        if q <= 0 or q >= 1:
            return None
        n = _level_index(q)
        if n > self.depth:
            return None
        lv = self.levels[n - 1]
        s = (q - lv.lo) / lv.d
        i = math.floor(s)
        if s == i:
            return None  # on a square boundary
        return lv, i + 1

    def _eval_exact(self, x, y):
        loc = self.locate(x)
        if loc is None:
            return Fraction(0)
        lv, i = loc
        if self.locate(y) != loc:
            return Fraction(0)
        a, b, c = lv.square(i)
        return max(Fraction(0), lv.height * (1 - 2 * max(abs(x - c), abs(y - c)) / lv.d))

    def _locate_float(self, x, y):
        """Vectorised square lookup.

        Returns ``(fast, slow, n, c, d)``: ``fast`` marks points inside a
        square of a float-safe level (centre ``c``, side ``d``), ``slow``
        points in a level too fine for floats.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        _, e = np.frexp(x)
        n = 1 - e
        valid = (x > 0) & (x < 1) & (n >= 1) & (n <= self.depth)
        n = np.where(valid, n, 0)
        lo = np.ldexp(1.0, -n)
        valid &= (y > lo) & (y < 2 * lo)
        ok = self._float_ok[n]
        fast = valid & ok
        d = np.where(fast, self._d[n], 1.0)
        k = self._k[n]
        i = np.clip(np.floor((x - lo) / d), 0, k - 1)
        j = np.clip(np.floor((y - lo) / d), 0, k - 1)
        c = lo + (i + 0.5) * d
        return fast & (i == j), valid & ~ok, n, c, d

    def _eval(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside, slow, n, c, d = self._locate_float(x, y)
        val = self._h[n] * (1 - 2 * np.maximum(np.abs(x - c), np.abs(y - c)) / d)
        out = np.where(inside, np.maximum(val, 0.0), 0.0)
        for idx in zip(*np.nonzero(slow)) if out.ndim else ([()] if slow else []):
            out[idx] = float(self._eval_exact(Fraction(float(x[idx])), Fraction(float(y[idx]))))
        return out

    def exact_section(self, axis, level) -> PiecewiseLinear:
        """Section through ``level``; the surface is symmetric so both axes agree."""
        q = to_fraction(level)
        zero = PiecewiseLinear([Fraction(0), Fraction(1)], [Fraction(0), Fraction(0)], name=f"{self.name}|{axis}@{level}")
        loc = self.locate(q)
        if loc is None:
            return zero
        lv, i = loc
        a, b, c = lv.square(i)
        e = abs(q - c)
        plateau = lv.height * (1 - 2 * e / lv.d)
        pts = [(Fraction(0), Fraction(0)), (a, Fraction(0)), (c - e, plateau), (c + e, plateau), (b, Fraction(0)), (Fraction(1), Fraction(0))]
        xs, ys = [], []
        for px, py in pts:
            if xs and px == xs[-1]:
                continue
            xs.append(px)
            ys.append(py)
        return PiecewiseLinear(xs, ys, name=f"{self.name}|{axis}@{level}")

    def exact_diagonal(self) -> "PathologyDiagonal":
        return PathologyDiagonal(self)

    def support_measure(self) -> Fraction:
        return sum((lv.k * lv.d * lv.d for lv in self.levels), Fraction(0))

    def derivative(self, axis: str = "x"):
        from .measure import DerivativeField

        return DerivativeField(self, axis)


class PathologyDiagonal(Fn1):
    """``h(x) = f(x, x)``: a row of tents of height ``1 / (2 k_n)`` on each ``I_n``."""

    exact = True
    piecewise_linear = True

    def __init__(self, surface: PathologySurface):
        self.surface = surface
        self.name = f"diag({surface.name})"

    def _eval_exact(self, q):
        return self.surface._eval_exact(q, q)

    def _eval(self, x):
        return self.surface._eval(x, x)

    def breakpoint_count(self) -> int:
        return 2 + sum(2 * lv.k for lv in self.surface.levels)

    def breakpoints(self, lo=None, hi=None):
        lo = Fraction(0) if lo is None else to_fraction(lo)
        hi = Fraction(1) if hi is None else to_fraction(hi)
        out = [Fraction(0)] if lo <= 0 else []
        for lv in reversed(self.surface.levels):
            if lv.hi < lo or lv.lo > hi:
                continue
            if len(out) + 2 * lv.k > MAX_BREAKPOINTS:
                raise TooManyBreakpoints(f"level {lv.n} has {lv.k} squares")
            for a, b, c in lv.squares():
                out.extend(p for p in (a, c) if lo <= p <= hi)
        if lo <= 1 <= hi:
            out.append(Fraction(1))
        return out

    def exact_variation(self, lo, hi):
        lo, hi = to_fraction(lo), to_fraction(hi)
        return sum((_tent_row_variation(lv, lo, hi) for lv in self.surface.levels), Fraction(0))

    def tent_list(self) -> list:
        """``(a, c, b, peak)`` for every tent, deepest level first (small levels only)."""
        out = []
        for lv in reversed(self.surface.levels):
            if lv.k > MAX_BREAKPOINTS:
                raise TooManyBreakpoints(f"level {lv.n} has {lv.k} squares")
            out.extend((a, c, b, lv.height) for a, b, c in lv.squares())
        return out


def _tent_row_variation(lv: PathologyLevel, lo: Fraction, hi: Fraction) -> Fraction:
    s, t = max(lo, lv.lo), min(hi, lv.hi)
    if s >= t:
        return Fraction(0)
    if s == lv.lo and t == lv.hi:
        return Fraction(1)
    d = lv.d
    full_first = math.ceil((s - lv.lo) / d)
    full_last = math.floor((t - lv.lo) / d) - 1
    total = max(0, full_last - full_first + 1) * Fraction(1, lv.k)
    edge = {math.floor((s - lv.lo) / d), math.ceil((t - lv.lo) / d) - 1}
    for i0 in sorted(edge):
        if full_first <= i0 <= full_last or i0 < 0 or i0 >= lv.k:
            continue
        a, b, c = lv.square(i0 + 1)
        pts = sorted({max(a, s), min(b, t)} | ({c} if s < c < t else set()))
        vals = [lv.tent(p, i0 + 1) for p in pts]
        total += sum((abs(q - p) for p, q in zip(vals, vals[1:])), Fraction(0))
    return total


def build_pathology(u: SeqSpec, N: int) -> PathologySurface:
    if N < 1:
        raise ParameterError(f"depth must be >= 1, got {N}")
    if not u.summable:
        raise ParameterError(f"{u.describe()} is not summable")
    if u.length is not None and N > u.length:
        raise ParameterError(f"{u.describe()} is only defined up to index {u.length}")
    levels = []
    for n in range(1, N + 1):
        un = u[n]
        if un <= 0:
            raise ParameterError(f"u_{n} = {un} is not positive")
        k = math.floor(1 / (4**n * un)) + 1
        if k.bit_length() > MAX_K_BITS:
            raise DepthLimitError(
                f"k_{n} needs {k.bit_length()} bits (limit {MAX_K_BITS}); maximal safe depth is {n - 1}",
                max_safe_depth=n - 1,
            )
        levels.append(PathologyLevel(n, un, k, Fraction(1, 2**n * k)))
    return PathologySurface(u, levels)


# ---------------------------------------------------------------------------
# Rademacher / Schauder


def rademacher(n: int) -> StepFunction:
    """``r_n``: +1 where ``floor(2**n x)`` is even, -1 where odd."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    breaks = [Dyadic(j, -n) for j in range(2**n + 1)]
    return StepFunction(breaks, [1 if j % 2 == 0 else -1 for j in range(2**n)], name=f"r{n}")


def schauder(n: int) -> PiecewiseLinear:
    """Primitive of ``r_n``: sawtooth with slopes +-1 and peaks ``2**-n``."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    xs = [Dyadic(j, -n) for j in range(2**n + 1)]
    ys = [Dyadic(0) if j % 2 == 0 else Dyadic(1, -n) for j in range(2**n + 1)]
    return PiecewiseLinear(xs, ys, name=f"f{n}")


def pl_integral(f: PiecewiseLinear) -> Fraction:
    """Exact integral of an exact piecewise-linear function (trapezoids)."""
    return sum(
        ((to_fraction(x1) - to_fraction(x0)) * (to_fraction(y0) + to_fraction(y1)) / 2 for x0, x1, y0, y1 in f.pieces()),
        Fraction(0),
    )


def pl_lipschitz(f: PiecewiseLinear) -> Fraction:
    """Largest piece slope magnitude of an exact piecewise-linear function."""
    return max(
        abs(to_fraction(y1) - to_fraction(y0)) / (to_fraction(x1) - to_fraction(x0)) for x0, x1, y0, y1 in f.pieces()
    )


def schauder_separation(n: int, m: int, p=1):
    """``||r_n - r_m||_p``, the distance between the derivatives of ``f_n`` and ``f_m``.

    Exact (a Fraction) for ``p = 1``; a float otherwise.
    """
    if n == m:
        return Fraction(0)
    diff = rademacher(n) - rademacher(m)
    power = diff.layer_cake(p)
    if p == 1:
        return power
    return float(power) ** (1.0 / p)
