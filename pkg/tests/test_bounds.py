import numpy as np
import pytest

from ndf.bounds import (
    PaperConstants,
    bounds_report,
    corollary3_order,
    dgs_lower_bound,
    lemma_bounds,
    proposition1_build,
    proposition1_plan,
    theorem4_points,
)
from ndf.classical import classical_design
from ndf.harmonics import dim_harmonic, dim_space, surface_area
from helpers import random_rotation

CONSTS = PaperConstants()


@pytest.mark.parametrize("t,d,want", [
    (1, 2, 2), (2, 2, 4), (3, 2, 6), (4, 2, 9), (5, 2, 12),
    (2, 3, 5), (3, 3, 8),
])
def test_dgs_values(t, d, want):
    assert dgs_lower_bound(t, d) == want


def test_dgs_validation():
    with pytest.raises(ValueError):
        dgs_lower_bound(0, 2)
    with pytest.raises(ValueError):
        dgs_lower_bound(3, 0)


def test_lemma_bounds_frozen_values():
    lb = lemma_bounds(3, 2, 12, 2)
    assert lb.lemma1 == pytest.approx(21.708037636748028, rel=1e-14)
    assert lb.lemma2_general == pytest.approx(164.75242191547841, rel=1e-14)
    assert lb.lemma2_nested == pytest.approx(112.54733039603403, rel=1e-14)
    assert lb.lemma3_general == pytest.approx(284.60498941515414, rel=1e-14)
    assert lb.lemma3_nested == pytest.approx(194.42222095223579, rel=1e-14)


def test_lemma_bounds_closed_forms():
    t, t1, M, d = 5, 3, 7, 3
    lb = lemma_bounds(t, t1, M, d)
    omega = surface_area(d)
    d_t = dim_space(t, d)
    d_t1 = dim_space(t1, d)
    d_next = dim_harmonic(t + 1, d + 1)
    ratio = (d + 1) / d
    assert lb.lemma1 == pytest.approx(np.sqrt(ratio * omega * d_next))
    assert lb.lemma2_general == pytest.approx(M * np.sqrt(omega * d_t))
    assert lb.lemma2_nested == pytest.approx(
        M * np.sqrt(omega * (d_t - d_t1)))
    assert lb.lemma3_general == pytest.approx(
        M * np.sqrt(ratio * d_next * d_t))
    assert lb.lemma3_nested == pytest.approx(
        M * np.sqrt(ratio * d_next * (d_t - d_t1)))
    # nested never exceeds general
    assert lb.lemma2_nested <= lb.lemma2_general
    assert lb.lemma3_nested <= lb.lemma3_general


def test_lemma_bounds_validation():
    with pytest.raises(ValueError):
        lemma_bounds(3, 3, 1, 2)
    with pytest.raises(ValueError):
        lemma_bounds(3, 0, 1, 2)
    with pytest.raises(ValueError):
        lemma_bounds(3, 2, 0, 2)


def test_theorem4_frozen_and_m_zero():
    n_gen, n_nest = theorem4_points(3, 2, 12, 2, CONSTS)
    assert n_gen == pytest.approx(5195262.24, rel=1e-12)
    assert n_nest == pytest.approx(5195262.24, rel=1e-12)
    # default c1 dominates here; both hit the existence branch
    n0, _ = theorem4_points(3, None, 0, 2, CONSTS)
    assert n0 == pytest.approx(CONSTS.c1(2) * 3**2, rel=1e-14)


def test_theorem4_linear_branch_visible_with_small_c1():
    consts = PaperConstants(b_d=0.01, r_d=1.0)
    n_gen, n_nest = theorem4_points(3, 2, 12, 2, consts)
    d_t = dim_space(3, 2)
    d_next = dim_harmonic(4, 3)
    scale = consts.c3(2) / consts.c2(2) * 12 * 3
    assert n_gen == pytest.approx(scale * np.sqrt(d_next * d_t), rel=1e-13)
    assert n_nest == pytest.approx(
        scale * np.sqrt(d_next * (d_t - dim_space(2, 2))), rel=1e-13)
    assert n_nest < n_gen


def test_corollary3_frozen_value_and_growth():
    assert corollary3_order(3, 2, CONSTS) == pytest.approx(
        32610.871111946934, rel=1e-13)
    ts = np.array([8, 16, 32, 64, 128, 256], dtype=float)
    vals = np.array([corollary3_order(int(t), 2, CONSTS) for t in ts])
    slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
    assert 4.9 <= slope <= 5.1  # t^(2d+1) on S^2
    with pytest.raises(ValueError):
        corollary3_order(1, 2, CONSTS)


def test_constants_validation_and_override():
    with pytest.raises(ValueError):
        PaperConstants(b_d=0.0)
    with pytest.raises(ValueError):
        PaperConstants(r_d=-1.0)
    with pytest.raises(ValueError):
        PaperConstants(c1_margin=0.0)
    floor = (108.0 * 7.0) ** 2
    assert PaperConstants().c1(2) == pytest.approx(floor * 1.01)
    big = PaperConstants(c1_override=1e15)
    assert big.c1(2) == 1e15
    small = PaperConstants(c1_override=1.0)
    assert small.c1(2) == pytest.approx(floor * 1.01)  # floor wins


@pytest.mark.parametrize("t1,t,d,p,q,copies", [
    (2, 3, 2, 3, 2, 5),
    (2, 4, 2, 2, 1, 3),
    (3, 5, 2, 5, 3, 16),
    (2, 6, 3, 3, 1, 26),
])
def test_proposition1_plan(t1, t, d, p, q, copies):
    plan = proposition1_plan(t1, t, d)
    assert (plan.p, plan.q, plan.copies) == (p, q, copies)
    assert plan.unit_size_expr == f"N/{q}^{d}"
    assert plan.constant_expr.endswith(f"{p**d} * C_d")


def test_proposition1_plan_validation():
    with pytest.raises(ValueError):
        proposition1_plan(3, 3, 2)


def test_proposition1_build_with_rotated_octahedra():
    rng = np.random.default_rng(0)
    base_pts, strength = classical_design("octahedron")
    assert strength == 3

    def source(deg, n):
        assert deg == 3 and n is None
        return base_pts @ random_rotation(rng, 3).T

    plan, base, union, cert_t1, cert_t = proposition1_build(
        2, 3, 2, source)
    assert plan.copies == 5
    assert base.shape == (6, 3)
    assert union.shape == (36, 3)
    assert cert_t1.is_design and cert_t1.t == 2
    assert cert_t.is_design and cert_t.t == 3
    np.testing.assert_array_equal(union[:6], base)  # base embeds exactly


def test_bounds_report_consistent_with_parts():
    rep = bounds_report(3, 2, 12, 2, CONSTS)
    lb = lemma_bounds(3, 2, 12, 2)
    assert rep.lemma1 == lb.lemma1
    assert rep.lemma2_general == pytest.approx(lb.lemma2_general, rel=1e-15)
    assert rep.lemma2_nested == pytest.approx(lb.lemma2_nested, rel=1e-15)
    assert rep.lemma3_general == pytest.approx(lb.lemma3_general, rel=1e-15)
    assert rep.lemma3_nested == pytest.approx(lb.lemma3_nested, rel=1e-15)
    assert rep.dgs_lower == 6
    assert rep.theorem4_N_general == pytest.approx(5195262.24, rel=1e-12)
    assert rep.corollary3_total_order == pytest.approx(
        32610.871111946934, rel=1e-13)
    d = rep.to_dict()
    assert d["constants"]["b_d"] == 7.0


def test_bounds_report_no_t1_and_m_zero():
    rep = bounds_report(3, None, 0, 2, CONSTS)
    assert rep.lemma2_nested is None
    assert rep.lemma3_nested is None
    assert rep.theorem4_N_nested is None
    assert rep.lemma2_general == 0.0
    assert rep.lemma3_general == 0.0
    assert rep.lemma1 > 0  # M-independent
    rep1 = bounds_report(1, None, 4, 2, CONSTS)
    assert rep1.corollary3_total_order is None
