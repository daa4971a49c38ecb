import math
from fractions import Fraction as F

import pytest

from matebench import basilica as bas
from matebench import dynamics as dyn
from matebench import mating as mat
from matebench import parameter as par
from matebench.angles import angle, double


def test_external_ray_landings_c_i():
    tr = mat.external_ray(1j, F(1, 3))
    assert tr.landed and abs(tr.landing - (-1 + 1j)) < 1e-10
    tr = mat.external_ray(1j, F(2, 3))
    assert abs(tr.landing - (-1j)) < 1e-10
    tr = mat.external_ray(1j, F(1, 6))
    assert abs(tr.landing - 1j) < 1e-10


def test_external_ray_equivariance():
    c = 1j
    for th in (F(1, 6), F(3, 14), F(5, 24)):
        t1 = mat.external_ray(c, th)
        t2 = mat.external_ray(c, double(th))
        assert abs(mat.quad_map(c, t1.landing) - t2.landing) < 1e-8


def test_target_validation_half_limb():
    with pytest.raises(ValueError):
        mat.MatingTarget(-1.3 + 0j, F(1, 2)).validate()
    with pytest.raises(ValueError):
        mat.MatingTarget(-1 + 0j, F(1, 3)).validate()
    t = mat.MatingTarget(1j, F(1, 6)).validate()
    assert t.evidence["critical_orbit_shape"] == (2, 2)


def test_expected_r_side_shape_collapse():
    assert mat.expected_r_side_shape(F(1, 6), (2, 2)) == (2, 1)


def test_locate_mating_c_i():
    loc = mat.locate_mating(mat.MatingTarget(1j, F(1, 6)))
    assert abs(loc.a - 3) < 1e-10
    assert loc.residual < 1e-10
    assert (loc.wake.t_minus, loc.wake.t_plus) == (F(1, 7), F(2, 7))
    assert loc.orbit_shape_R == (2, 1)
    # the critically periodic root a=1 is rejected by orbit shape
    assert any(abs(z - 1) < 1e-3 for z, _ in loc.rejected)


def test_located_parameter_not_captured():
    loc = mat.locate_mating(mat.MatingTarget(1j, F(1, 6)))
    r = par.capture_generation(loc.a, budget=100)
    assert r.status == "not-captured-within-budget"


def test_locate_rabbit_like_center():
    # critically periodic target: the center of the 1/3-limb component
    # (Douady rabbit) mates to a = (3 + i sqrt 3)/2
    c = -0.122561166876654 + 0.744861766619744j  # rabbit center
    target = mat.MatingTarget(c, F(1, 7))
    loc = mat.locate_mating(target)
    assert abs(loc.a - (1.5 + math.sqrt(3) / 2 * 1j)) < 1e-8


@pytest.fixture(scope="module")
def c_i_setup():
    loc = mat.locate_mating(mat.MatingTarget(1j, F(1, 6)))
    forest = mat._hinted_forest(loc.a, loc.wake_direction)
    return loc, forest


def test_phi1_residuals(c_i_setup):
    loc, forest = c_i_setup
    angles = mat.sample_preperiodic_angles(25, seed=11)
    table = mat.phi1_check(loc.a, angles, depth=120, forest=forest)
    assert len(table.rows) == 25
    assert table.max_residual < 1e-6
    assert not table.excluded


def test_phi1_alpha_pair(c_i_setup):
    loc, forest = c_i_setup
    table = mat.phi1_check(loc.a, [F(1, 3), F(2, 3)], depth=40, forest=forest)
    assert table.max_residual < 1e-9
    tr = dyn.trace_bubble_ray(loc.a, F(1, 3), depth=20, forest=forest)
    tr2 = dyn.trace_bubble_ray(loc.a, F(2, 3), depth=20, forest=forest)
    pa = dyn.p_fixed(loc.a)
    assert abs(tr.landing - tr2.landing) < 1e-12
    assert abs(tr.landing - pa) < 1e-9


def test_sigma_identity_exact(c_i_setup):
    loc, _ = c_i_setup
    rel = mat.sigma_relabel(loc.wake.portrait_angles)
    assert set(rel) == {1, 2, 3} and set(rel.values()) == {1, 2, 3}
    neg = [angle(-t) for t in loc.wake.portrait_angles]
    cyc = set(loc.wake.portrait_angles)
    for th in (F(1, 6), F(3, 34), F(7, 96), F(11, 56)):
        # compare up to the first hit of the partition cycle (the paper's
        # identity concerns orbits avoiding the alpha cycle)
        m, t = 30, th
        for n in range(30):
            if t in cyc:
                m = n
                break
            t = double(t)
        left = mat.sigma_digits(th, loc.wake.portrait_angles, m)
        right = mat.sigma_digits(angle(-th), neg, m)
        assert all(rel[left[i]] == right[i] for i in range(m))


def test_phi2_residuals_and_sigma(c_i_setup):
    loc, forest = c_i_setup
    angles = mat.sample_preperiodic_angles(20, seed=5)
    table = mat.phi2_check(loc.a, 1j, angles, loc.wake.portrait_angles,
                           depth=120, forest=forest)
    assert table.max_residual < 1e-6
    assert all("FAILED" not in r.note for r in table.rows)


def test_ray_classes_with_identified_triples(c_i_setup):
    loc, forest = c_i_setup
    # depth-1 preimages of the portrait cycle co-land at the alpha preimage
    sample = [F(1, 14), F(9, 14), F(11, 14), F(1, 6), F(5, 48), F(3, 20)]
    rep = mat.ray_class_consistency(loc.a, 1j, sample,
                                    loc.wake.portrait_angles, depth=120,
                                    forest=forest)
    assert rep.identified_pairs >= 3  # the triple gives three pairs
    assert rep.separated_pairs > 0
    assert not rep.mismatches
    assert rep.alpha_class_ok and rep.pa_class_ok


def test_biaccessible_iff_class_size_two():
    for th in (F(1, 3), F(1, 6), F(1, 7), F(5, 12), F(3, 5)):
        cls = bas.ray_equivalence_class(th)
        assert (len(cls) == 2) == bas.biaccessible(th)


def test_sampler_properties():
    angles = mat.sample_preperiodic_angles(30, seed=2)
    assert len(angles) == 30 and len(set(angles)) == 30
    from matebench.angles import period_preperiod

    for t in angles:
        k, p = period_preperiod(t)
        assert k >= 1


def test_second_misiurewicz_target_tip():
    # the 1/3-limb tip: the critical value falls onto the beta fixed point
    # after two steps (external angle 1/4); a structurally different target
    # from c = i (no period collapse, preperiod 3)
    import cmath

    def tip_eq(c):
        beta = (1 + cmath.sqrt(1 - 4 * c)) / 2
        return (c * c + c) ** 2 + c - beta

    c = -0.228 + 1.115j
    for _ in range(60):
        h = 1e-8
        d = (tip_eq(c + h) - tip_eq(c - h)) / (2 * h)
        c -= tip_eq(c) / d
    assert abs(tip_eq(c)) < 1e-12

    loc = mat.locate_mating(mat.MatingTarget(c, F(1, 4)))
    assert loc.residual < 1e-10
    assert loc.orbit_shape_c == (3, 1) and loc.orbit_shape_R == (3, 1)
    assert (loc.wake.t_minus, loc.wake.t_plus) == (F(1, 7), F(2, 7))
    forest = mat._hinted_forest(loc.a, loc.wake_direction)
    angles = mat.sample_preperiodic_angles(12, seed=21)
    t1 = mat.phi1_check(loc.a, angles, depth=110, forest=forest)
    t2 = mat.phi2_check(loc.a, c, angles, loc.wake.portrait_angles,
                        depth=110, forest=forest)
    assert t1.max_residual < 1e-6
    assert t2.max_residual < 1e-6
    assert all("FAILED" not in r.note for r in t2.rows)
