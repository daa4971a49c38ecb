import cmath
import itertools
import math
from fractions import Fraction as F

import pytest

from matebench import basilica as bas
from matebench import dynamics as dyn


WAKE_SAMPLE = 2.5 + 0.5j  # deep inside W(1/7, 2/7)


def test_iterate_pole_path_exact():
    assert dyn.iterate(2.0 + 0j, -1.0 + 0j, 2) == [-1, -2, dyn.INF]


def test_superattracting_two_cycle():
    for a in (2.0 + 0j, 1 + 1j, 0.3 + 0j):
        orb = dyn.iterate(a, dyn.INF, 2)
        assert orb == [dyn.INF, 0, dyn.INF]


def test_special_values_exact():
    for a in (2.0 + 0j, -0.7 + 1.3j):
        assert dyn.rmap(a, -1.0 + 0j) == -a
        assert dyn.rmap(a, 0j) == dyn.INF
        assert dyn.rmap(a, -2.0 + 0j) == dyn.INF
        assert dyn.rmap(a, dyn.INF) == 0


def test_fixed_points_parabolic():
    fps = dyn.fixed_points(32 / 27 + 0j)
    par = [f for f in fps if abs(f.location - (-4 / 3)) < 1e-9]
    assert par, "double root at -4/3 not found"
    assert abs(par[0].multiplier - 1) < 1e-9
    assert par[0].classification == "parabolic"


def test_fixed_points_a2():
    fps = dyn.fixed_points(2.0 + 0j)
    pos = [f for f in fps if f.location.real > 0 and abs(f.location.imag) < 1e-12]
    assert len(pos) == 1
    assert pos[0].classification == "repelling"
    assert pos[0].is_pa
    # Vieta: sum of fixed points = -2
    assert abs(sum(f.location for f in fps) + 2) < 1e-9


def test_fixed_points_degenerate_a0():
    with pytest.raises(ValueError):
        dyn.fixed_points(0j)


def sample_escaping(a, n=50):
    pts = []
    k = 0
    while len(pts) < n and k < 4000:
        k += 1
        z = complex(3.5 + 0.011 * k, -2 + 0.013 * (k % 37))
        g, ok = dyn.green(a, z)
        if ok and 0.05 < g < 3.0:
            pts.append(z)
    return pts


@pytest.mark.parametrize("a", [2.0 + 0j, 1 + 1j, 0.3 + 0j])
def test_green_functional_equation(a):
    for z in sample_escaping(a, 40):
        g1, _ = dyn.green(a, z)
        g2, _ = dyn.green(a, dyn.rmap2(a, z))
        assert abs(g2 - 2 * g1) < 1e-8


def test_green_sentinels():
    assert dyn.green(2.0 + 0j, dyn.INF)[0] == math.inf
    g, ok = dyn.green(2.0 + 0j, 0j)
    assert g == 0.0 and ok
    # a point deep inside the mating locus never escapes
    g, ok = dyn.green(1.0 + 0j, -1.0 + 0j, budget=80)
    assert g == 0.0 and not ok


@pytest.mark.parametrize("a", [2.0 + 0j, 1 + 1j])
def test_boettcher_far_field(a):
    z = 1e8 + 3j
    ph = dyn.boettcher(a, z)
    assert abs(2 * ph / z - 1) < 1e-6
    ph2 = dyn.boettcher(a, dyn.rmap2(a, z))
    assert abs(ph2 - ph * ph) / max(1.0, abs(ph) ** 2) < 1e-12


def test_boettcher_series_oracle():
    # order-by-order matching of Phi(R^2 z) = Phi(z)^2 gives
    # Phi = z/2 + 1/2 + (2 - a)/(8 z) + ... ; frozen from the series oracle
    for a in (2.0 + 0j, 1 + 1j, 0.3 + 0j):
        z = 1e7 + 1e6j
        ph = dyn.boettcher(a, z)
        series = z / 2 + 0.5 + (2 - a) / (8 * z)
        assert abs(ph - series) < 1e-6


def test_boettcher_requires_escape():
    with pytest.raises(ValueError):
        dyn.boettcher(1.0 + 0j, -1.0 + 0j)


def test_internal_ray_zero_lands_at_pa():
    tr = dyn.internal_ray(2.0 + 0j, F(0))
    pa = [f for f in dyn.fixed_points(2.0 + 0j) if f.is_pa][0]
    assert tr.landing is not None
    assert abs(tr.landing - pa.location) < 1e-6
    assert tr.landed


def test_internal_ray_half_maps_to_pa():
    tr = dyn.internal_ray(2.0 + 0j, F(1, 2))
    pa = [f for f in dyn.fixed_points(2.0 + 0j) if f.is_pa][0]
    assert abs(dyn.rmap(2.0 + 0j, tr.landing) - pa.location) < 1e-6


def test_internal_ray_satisfies_boettcher_equation():
    # log Phi along the traced ray equals potential + 2 pi i theta
    a = WAKE_SAMPLE
    tr = dyn.internal_ray(a, F(1, 3), substeps=4)
    for z, pot in zip(tr.points[4:20], tr.potentials[4:20]):
        v, _ = dyn.log_phi(a, z)
        assert abs(v.real - pot) < 1e-9
        ang = (v.imag / (2 * math.pi)) % 1.0
        assert min(abs(ang - 1 / 3), 1 - abs(ang - 1 / 3)) < 1e-9


def test_ray_doubling_equivariance():
    # R^2 maps the theta-ray point at potential s to the 2 theta-ray point
    # at potential 2s (same sampling lattice by construction; verified
    # against the independent log Phi evaluation above)
    a = WAKE_SAMPLE
    tr1 = dyn.internal_ray(a, F(1, 3), substeps=4)
    tr2 = dyn.internal_ray(a, F(2, 3), substeps=4)
    for j in range(8, 16):
        img = dyn.rmap2(a, tr1.points[j])
        v, _ = dyn.log_phi(a, img)
        assert abs(v.real - 2 * tr1.potentials[j]) < 1e-8


def test_bubble_centers_gen1_gen2():
    for a in (WAKE_SAMPLE, 1.1 + 0.9j):
        bs = dyn.bubble_centers(a, 2)
        by_gen = {}
        for b in bs:
            by_gen.setdefault(b.generation, set()).add(b.center)
        assert by_gen[1] == {0, -2}
        expected = {-1 + cmath.sqrt(1 - a / 2), -1 - cmath.sqrt(1 - a / 2)}
        got = by_gen[2]
        assert all(min(abs(g - e) for e in expected) < 1e-12 for g in got)


def test_bubble_center_collision_at_a2():
    bs = dyn.bubble_centers(2.0 + 0j, 2)
    cols = dyn.center_collisions(bs)
    assert cols, "generation-2 centers must collide with the critical point at a=2"


def test_forest_dynamical_consistency():
    # R(center(w)) = center(tail w) and R(root(w)) = root(tail w), exactly
    # by construction but through independent sqrt evaluations
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    for g in range(2, 7):
        for w in bas.bubbles_of_generation(g):
            b = forest.realize(w)
            t = forest.realize(w[1:])
            assert abs(dyn.rmap(WAKE_SAMPLE, b.center) - t.center) < 1e-9
            assert abs(dyn.rmap(WAKE_SAMPLE, b.root) - t.root) < 1e-9


def test_forest_roots_are_preimages_of_pa():
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    for g in range(1, 6):
        for w in bas.bubbles_of_generation(g):
            b = forest.realize(w)
            z = b.root
            for _ in range(g):
                z = dyn.rmap(WAKE_SAMPLE, z)
            assert abs(z - forest.pa) < 1e-8


def test_wake_landing_common_fixed_point():
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    lands = []
    for th in (F(1, 7), F(2, 7), F(4, 7)):
        tr = dyn.trace_bubble_ray(WAKE_SAMPLE, th, depth=60, forest=forest)
        assert tr.landed
        lands.append(tr.landing)
    spread = max(abs(x - y) for x, y in itertools.combinations(lands, 2))
    assert spread < 1e-9
    fp = min(dyn._cubic_roots(WAKE_SAMPLE), key=lambda r: abs(r - lands[0]))
    assert abs(fp - lands[0]) < 1e-9
    assert abs(dyn.d_rmap(WAKE_SAMPLE, fp)) > 1


def test_ray_landing_equivariance():
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    for th in (F(1, 7), F(3, 7), F(5, 9)):
        tr = dyn.trace_bubble_ray(WAKE_SAMPLE, th, depth=70, forest=forest)
        tr2 = dyn.trace_bubble_ray(WAKE_SAMPLE, F(2) * th, depth=70, forest=forest)
        if tr.landing is None or tr2.landing is None:
            continue
        img = dyn.rmap(WAKE_SAMPLE, tr.landing)
        assert abs(img - tr2.landing) < 1e-8


def test_rays_do_not_share_bubbles_unless_nested():
    # chains of distinct angles share a bubble only if one angle's arc chain
    # is a prefix of the other's (mirrors unique landing)
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    words = {}
    for th in (F(1, 7), F(2, 7), F(4, 7)):
        tr = dyn.trace_bubble_ray(WAKE_SAMPLE, th, depth=40, forest=forest)
        words[th] = [b.word for b in tr.bubbles]
    for t1, t2 in itertools.combinations(words, 2):
        shared = set(words[t1]) & set(words[t2])
        for w in shared:
            i1, i2 = words[t1].index(w), words[t2].index(w)
            assert words[t1][: i1 + 1] == words[t2][: i2 + 1]


def test_no_common_landing_outside_wake():
    forest = dyn.BubbleForest(10.0 + 0j)
    lands = [
        dyn.trace_bubble_ray(10.0 + 0j, th, depth=40, forest=forest).landing
        for th in (F(1, 7), F(2, 7), F(4, 7))
    ]
    spread = max(abs(x - y) for x, y in itertools.combinations(lands, 2))
    assert spread > 1e-2


def test_biaccessible_ray_lands_on_root():
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    tr = dyn.trace_bubble_ray(WAKE_SAMPLE, F(1, 3), depth=20, forest=forest)
    tr2 = dyn.trace_bubble_ray(WAKE_SAMPLE, F(2, 3), depth=20, forest=forest)
    assert tr.landed and tr2.landed
    assert abs(tr.landing - forest.pa) < 1e-10
    assert abs(tr2.landing - forest.pa) < 1e-10


def test_finite_chain_flagged():
    forest = dyn.BubbleForest(WAKE_SAMPLE)
    # arc angle -theta = 4/5 has an empty chain (boundary landing)
    tr = dyn.trace_bubble_ray(WAKE_SAMPLE, F(1, 5), depth=60, forest=forest)
    assert tr.landing is None
    assert any("finite" in w for w in tr.warnings)


def test_spine_trace_shape():
    tr = dyn.spine_trace(WAKE_SAMPLE, depth=12)
    assert set(tr) == {"left", "right", "ray0", "ray_half"}
    assert abs(tr["left"][0] - dyn.p_fixed(WAKE_SAMPLE)) < 1e-9
    assert abs(tr["right"][0] - (-2 - dyn.p_fixed(WAKE_SAMPLE))) < 1e-9


def test_equipotential_level():
    a = WAKE_SAMPLE
    pts = dyn.equipotential(a, 0.7, samples=32)
    for z in pts[::4]:
        g, ok = dyn.green(a, z)
        assert ok and abs(g - 0.7) < 1e-6


def test_parabolic_fixed_point_orbit():
    # z = -4/3 is fixed for a = 32/27 (double root of the fixed-point cubic)
    a = 32 / 27 + 0j
    orb = dyn.iterate(a, -4 / 3 + 0j, 1)
    assert abs(orb[1] - orb[0]) < 1e-15


def test_green_positive_in_p_infinity():
    # for large |a| the critical value -a lies in the basin of infinity
    g, ok = dyn.green(10.0 + 0j, -10.0 + 0j)
    assert ok and g > 0
