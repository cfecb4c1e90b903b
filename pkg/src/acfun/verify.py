"""Verification bundles: each runs a family of checks and returns verdicts plus tables."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .constructions import (
    build_pathology,
    build_zigzag,
    find_witnesses,
    gallery,
    lnx_tail_sequence,
    parse_seq,
    pl_integral,
    pl_lipschitz,
    schauder,
    schauder_separation,
    seq_transform,
)
from .errors import WitnessNotFound
from .measure import DerivativeField, dominance_check, lp_norm, verify_bounds
from .realfn import Interval, Lift, Log, Schwarz, diagonal, section
from .report import INCONCLUSIVE, Table, Verdict
from .variation import lipschitz_estimate, variation_refined

NUM_TOL = 1e-9


def _bounds_verdicts(rep, prefix):
    out = []
    t = Table(f"{prefix}-bounds", ["claim", "n", "lhs", "rhs", "pass"])
    for c in rep.checks:
        claim = f"{prefix}.{c.claim}" + (f".n={c.n}" if c.n else "")
        out.append(Verdict.compare(claim, c.lhs, c.rhs, Fraction(1, 10**12), rep.note if not c.n else ""))
        t.add(c.claim, c.n, float(c.lhs), float(c.rhs), c.passed)
    return out, t


def _level_table(surface, name):
    t = Table(name, ["n", "u_n", "log2_k_n", "log2_d_n", "height_log2"])
    for lv in surface.levels:
        lk = math.log2(lv.k)
        t.add(lv.n, float(lv.u), lk, -lv.n - lk, -1 - lk)
    return t


def pyramid_bundle(u_spec: str = "geometric:0.5", depth: int = 10):
    """Diagonal divergence, section Lipschitz bounds and the measure bounds."""
    u = parse_seq(u_spec)
    surface = build_pathology(u, depth)
    h = surface.exact_diagonal()
    verdicts = []
    var_t = Table("diagonal-variation", ["N", "variation", "expected"])
    for N in range(1, depth + 1):
        v = h.exact_variation(Fraction(1, 2**N), 1)
        var_t.add(N, v, N)
        verdicts.append(Verdict.compare(f"pyramid.diagonal-variation.N={N}", v, N, 0, "exact rational", op="=="))
    sec_t = Table("section-lipschitz", ["level", "lipschitz", "bound"])
    for lv in surface.levels[: min(depth, 8)]:
        y0 = lv.square(1)[2] + lv.d / 8
        s = surface.exact_section("x", y0)
        L = pl_lipschitz(s)
        sec_t.add(y0, L, lv.slope)
        verdicts.append(Verdict.compare(f"pyramid.section-lipschitz.n={lv.n}", L, lv.slope, 0, "exact slope of the section"))
    rep = verify_bounds(surface)
    bv, bt = _bounds_verdicts(rep, "pyramid")
    verdicts += bv
    return verdicts, [_level_table(surface, "levels"), var_t, sec_t, bt]


def lnx_dominance_bundle(depth: int = 12, ps=(1.5, 2, 4), alphas=None, tol: float = 1e-8):
    """Pyramid surface whose gradient is dominated by ``|ln x|`` on the square."""
    alphas = [2**n for n in range(1, 11)] if alphas is None else alphas
    v = lnx_tail_sequence(depth + 1)
    surface = build_pathology(seq_transform(v), depth)
    fx = DerivativeField(surface, "x")
    g = Lift(Log())
    rep = dominance_check(fx, g, alphas, ps, tol=tol)
    verdicts = []
    dt = Table("distribution-dominance", ["alpha", "lambda_grad_x", "lambda_lnx", "pass"])
    for a, lf, lg, ok in rep.alpha_checks:
        dt.add(a, float(lf), float(lg), ok)
        verdicts.append(Verdict.compare(f"lnx-dominance.alpha={a}", lf, lg, Fraction(1, 10**12)))
    nt = Table("norm-dominance", ["p", "norm_grad_x", "norm_lnx", "gamma_root", "pass"])
    for p, nf, ng, ok in rep.p_checks:
        nt.add(p, nf, ng, math.gamma(p + 1) ** (1 / p), ok)
        verdicts.append(Verdict.compare(f"lnx-dominance.p={p}", nf, ng, tol * max(1.0, ng)))
    bv, bt = _bounds_verdicts(verify_bounds(surface), "lnx-pyramid")
    return verdicts + bv, [_level_table(surface, "levels"), dt, nt, bt]


def _witness_table(w, zig):
    t = Table("witnesses", ["n", "x", "y", "d", "quotient", "bound", "log2_k"])
    for i, ((x, y), d) in enumerate(zip(w.pairs, w.distances)):
        fx = [float(c) for c in x] if isinstance(x, tuple) else float(x)
        fy = [float(c) for c in y] if isinstance(y, tuple) else float(y)
        t.add(i + 1, str(fx), str(fy), float(d), w.quotients[i], w.bounds[i], math.log2(zig.levels[i].k))
    return t


def zigzag_bundle(f, levels: int = 6, grid: int = 4096, seed: int = 0x5EED, prefix="zigzag"):
    """Witness search, zigzag path and the per-level variation lower bounds for ``f``."""
    name = getattr(f, "name", str(f))
    try:
        w = find_witnesses(f, count=levels)
    except WitnessNotFound as e:
        return [Verdict(f"{prefix}.witnesses", INCONCLUSIVE, notes=str(e))], []
    zig = build_zigzag(w)
    verdicts = []
    for n, (q, b) in enumerate(zip(w.quotients, w.bounds), 1):
        verdicts.append(Verdict.compare(f"{prefix}.quotient.n={n}", q, b, 0, f"2 n^3 max|{name}|", op=">="))
    if zig.dim == 1:
        L = lipschitz_estimate(zig, zig.domain, grid=grid, seed=seed)
        note = "sampled difference quotients in exact arithmetic"
    else:
        L = zig.slope_range()[1]
        note = "largest piece slope"
    verdicts.append(Verdict.compare(f"{prefix}.lipschitz", L, 1.0, NUM_TOL, note, op="=="))
    vt = Table("level-variation", ["n", "a_n", "b_n", "variation", "lower_bound", "partial_sum"])
    partial, prev = 0.0, -math.inf
    increasing = True
    for lv in zig.levels:
        v = zig.level_variation(f, lv.n)
        lb = zig.level_lower_bound(lv.n)
        partial += v
        increasing &= partial > prev
        prev = partial
        vt.add(lv.n, float(lv.a), float(lv.b), v, lb, partial)
        verdicts.append(Verdict.compare(f"{prefix}.level-variation.n={lv.n}", v, lb, NUM_TOL, "2 n d_n k_n", op=">="))
    verdicts.append(Verdict.flag(f"{prefix}.partial-sums-increasing", increasing))
    return verdicts, [_witness_table(w, zig), vt]


def classical_bundle(k_range=range(4, 17), max_depth: int = 16):
    """Variation growth of ``x|sin(1/x)|`` against the bounded variation of ``x^2 sin^2(1/x)``."""
    outer, inner = gallery("sqrt-sine"), gallery("sine-square")
    t = Table("classical-variation", ["k", "var_sqrt_sine", "var_sine_square", "harmonic_bound"])
    verdicts = []
    prev = -math.inf
    inc = True
    vin_prev = None
    for k in k_range:
        iv = Interval(2.0**-k, 1.0)
        vout = variation_refined(outer, iv, max_depth=max_depth).estimate
        vin = variation_refined(inner, iv, max_depth=max_depth).estimate
        bound = math.log(2.0**k) / math.pi * 0.5
        t.add(k, vout, vin, bound)
        inc &= vout > prev
        prev = vout
        verdicts.append(Verdict.compare(f"classical.sine-square-bounded.k={k}", vin, 4.0, 0))
        if vin_prev is not None:
            # |g'| <= 4, so extending the interval by 2^-k adds at most 4 * 2^-k
            step = vin - vin_prev
            verdicts.append(
                Verdict.compare(f"classical.sine-square-cauchy.k={k}", step, 4 * 2.0 ** -(k - 1), NUM_TOL, "increment bound")
            )
        vin_prev = vin
    kmax = max(k_range)
    verdicts.append(Verdict.flag("classical.sqrt-sine-increasing", inc))
    verdicts.append(
        Verdict.compare(f"classical.sqrt-sine-exceeds-harmonic.k={kmax}", prev, math.log(2.0**kmax) / math.pi * 0.5, 0, op=">=")
    )
    return verdicts, [t]


def gamma_bundle(ps=(1, 2, 3), tol: float = 1e-8):
    t = Table("lnx-moments", ["p", "integral", "gamma"])
    verdicts = []
    for p in ps:
        v = lp_norm(Log(), p, method="quadrature")
        g = math.gamma(p + 1)
        t.add(p, v, g)
        verdicts.append(Verdict.compare(f"gamma-identity.p={p}", v, g, tol, "integral of |ln x|^p", op="=="))
    return verdicts, [t]


def schwarz_bundle(levels=(Fraction(1, 4), Fraction(1, 2), Fraction(1)), grid: int = 4096, seed: int = 0x5EED):
    F = Schwarz()
    verdicts = []
    t = Table("schwarz-sections", ["y0", "lipschitz_estimate", "bound"])
    for y0 in levels:
        L = lipschitz_estimate(section(F, "x", y0), Interval(0.0, 1.0), grid=grid, seed=seed)
        b = F.section_lipschitz_bound(y0)
        t.add(y0, L, b)
        verdicts.append(Verdict.compare(f"schwarz.section-lipschitz.y0={y0}", L, b, NUM_TOL))
    ts = np.geomspace(1e-6, 1.0, 200)
    h = diagonal(F)
    vals = np.asarray(h(ts))
    const = float(np.max(np.abs(vals - vals[0])))
    verdicts.append(Verdict.compare("schwarz.diagonal-constant", const, 0.0, 0, f"diagonal value {vals[0]!r} on [1e-6, 1]", op="=="))
    verdicts.append(Verdict.compare("schwarz.diagonal-origin", float(h(0.0)), 0.0, 0, op="=="))
    return verdicts, [t]


def schauder_bundle(levels: int = 8, p: float = 2):
    verdicts = []
    t = Table("schauder-separation", ["n", "m", "l1", f"l{p:g}", "expected"])
    expect = 2 ** (1 - 1 / p)
    for n in range(1, levels + 1):
        for m in range(n + 1, levels + 1):
            s1 = schauder_separation(n, m, 1)
            sp = schauder_separation(n, m, p)
            t.add(n, m, s1, sp, expect)
            verdicts.append(Verdict.compare(f"schauder.l1.n={n}.m={m}", s1, 1, 0, "exact", op="=="))
            verdicts.append(Verdict.compare(f"schauder.lp.n={n}.m={m}", sp, expect, 1e-12, op="=="))
    lt = Table("schauder-functions", ["n", "lipschitz", "mean"])
    for n in range(1, levels + 1):
        f = schauder(n)
        L = pl_lipschitz(f)
        lt.add(n, L, pl_integral(f))
        verdicts.append(Verdict.compare(f"schauder.lipschitz.n={n}", L, 1, 0, op="=="))
    return verdicts, [t, lt]


def primitive_bundle(f_name: str = "xlnx", levels: int = 6, grid: int = 4096, seed: int = 0x5EED):
    v, t = zigzag_bundle(gallery(f_name), levels, grid, seed)
    for extra in (classical_bundle(), gamma_bundle()):
        v += extra[0]
        t += extra[1]
    return v, t


def schwarz_zigzag_bundle(levels: int = 6, grid: int = 4096, seed: int = 0x5EED):
    v, t = zigzag_bundle(Schwarz(), levels, grid, seed, prefix="schwarz-zigzag")
    sv, st = schwarz_bundle(grid=grid, seed=seed)
    return v + sv, t + st
