import math
from fractions import Fraction as F

import numpy as np
import pytest

from acfun.constructions import build_pathology, build_zigzag, find_witnesses, gallery, geometric
from acfun.errors import ParameterError
from acfun.realfn import Constant, Interval, Partition, Schwarz, SineSquare, XLogX, section
from acfun.variation import ac_modulus, divergence_profile, lipschitz_estimate, total_variation, variation_refined


def test_xlnx_three_point_partition():
    # f(1/e) = -2/e, so the sum telescopes to 2/e + (1 - 2/e) = 1
    P = Partition((0.0, 1 / math.e, 1.0))
    assert total_variation(XLogX(), P) == pytest.approx(1.0, abs=1e-15)


def test_monotone_telescopes():
    f = gallery("sqrt")
    pts = np.sort(np.random.default_rng(3).uniform(0, 1, 50))
    P = Partition(tuple([0.0] + pts.tolist() + [1.0]))
    assert total_variation(f, P) == pytest.approx(1.0, rel=1e-14)


def test_pyramid_diagonal_breakpoint_partition_level_three():
    h = build_pathology(geometric(F(1, 2)), 3).exact_diagonal()
    lo = F(1, 8)
    P = Partition(tuple([lo] + [p for p in h.breakpoints(lo, 1) if p > lo]))
    assert total_variation(h, P) == 3
    # the tent list gives the same unit per level
    tents = h.tent_list()
    assert sum(2 * peak for _, _, _, peak in tents) == 3


def test_refined_on_constant_is_zero():
    rep = variation_refined(Constant(0.25), Interval(0.0, 1.0), max_depth=6)
    assert all(v == 0 for _, v in rep.per_depth)


def test_refined_nondecreasing_and_zigzag_bound():
    g = SineSquare()
    rep = variation_refined(g, Interval(0.01, 1.0), max_depth=12)
    vals = [v for _, v in rep.per_depth]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    z = build_zigzag(find_witnesses(XLogX(), count=3))
    r = variation_refined(z, z.domain)
    assert r.exact and r.value <= 1 * z.end


def test_sqrt_sine_profile_increasing():
    prof = divergence_profile(gallery("sqrt-sine"), [2.0**-k for k in range(4, 17)])
    vals = [v for _, v in prof]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    # growth at least linear in k: slope per octave ~ 0.44 > 1/(2 pi) * ln 2
    assert vals[-1] - vals[0] >= 12 * math.log(2) / math.pi * 0.5


def test_pyramid_profile_unit_per_level():
    h = build_pathology(geometric(F(1, 2)), 10).exact_diagonal()
    prof = divergence_profile(h, [F(1, 2**N) for N in range(1, 11)])
    assert [v for _, v in prof] == list(range(1, 11))


def test_ac_modulus_lipschitz_bound_and_constant():
    g = SineSquare()
    for grid in (64, 512, 4096):
        r = ac_modulus(g, Interval(0.0, 1.0), 0.05, grid)
        assert r.modulus <= 4 * 0.05 + 1e-12
        assert r.total_length <= 0.05 + 1e-15
    assert ac_modulus(Constant(2.0), Interval(0.0, 1.0), 0.3, 100).modulus == 0.0


def test_ac_modulus_pyramid_failure_signature():
    h = build_pathology(geometric(F(1, 2)), 12).exact_diagonal()
    for n in range(1, 13):
        r = ac_modulus(h, Interval(0.0, 1.0), 2.0**-n, 2**16)
        assert r.modulus >= 1 - 1e-9
        assert r.total_length <= 2.0 ** -(n - 1)


def test_ac_modulus_chosen_cells_disjoint():
    r = ac_modulus(gallery("sqrt-sine"), Interval(0.0, 1.0), 0.1, 1000)
    cells = r.chosen_intervals
    assert all(a[1] <= b[0] for a, b in zip(cells, cells[1:]))
    assert len(cells) == 100


def test_ac_modulus_errors():
    with pytest.raises(ParameterError):
        ac_modulus(SineSquare(), Interval(0.0, 1.0), 0.0, 10)
    with pytest.raises(ParameterError):
        ac_modulus(SineSquare(), Interval(0.0, 0.5), 0.75, 10)


def test_lipschitz_estimates():
    assert lipschitz_estimate(SineSquare(), Interval(0.0, 1.0)) <= 4
    for k in (4, 10, 20):
        L = lipschitz_estimate(XLogX(), Interval(2.0**-k, 1.0), grid=1024)
        assert L >= k * math.log(2) - 1e-3 * k
    for y0 in (0.25, 0.5, 1.0):
        L = lipschitz_estimate(section(Schwarz(), "x", y0), Interval(0.0, 1.0), grid=1024)
        assert L <= 2 / y0 * (1 + 1e-9)
        assert L >= 2 / y0 * 0.99


def test_zigzag_lipschitz_exactly_one():
    z = build_zigzag(find_witnesses(XLogX(), count=4))
    assert lipschitz_estimate(z, z.domain, grid=512) == 1.0
