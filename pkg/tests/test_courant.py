"""Courant algebra: pairing, bracket, graphs, foliations, Dirac checks."""

import random

import pytest

from diracgeom.cartan import (
    Bivector,
    KForm,
    VField,
    exterior_derivative,
    schouten_jacobiator,
    wedge,
)
from diracgeom.courant import (
    DiracReport,
    Frame,
    GSec,
    bfield_transform,
    check_dirac,
    check_lagrangian,
    courant_bracket,
    courant_tensor,
    foliation_frame,
    graph_bivector,
    graph_two_form,
    pairing,
    same_span,
)
from diracgeom.errors import NotLagrangian
from diracgeom.symalg import Expr, Patch, parse_expr

from test_cartan import one_form, rand_expr, rand_form, rand_vf, so3_poisson, vf

M2 = Patch("M2", ("x", "y"))
M3 = Patch("M3", ("x", "y", "z"))


def gsec(patch, vcomps, fcomps):
    return GSec(vf(patch, *vcomps), one_form(patch, *fcomps))


# -- pairing and bracket ----------------------------------------------------------


def test_pairing_example():
    a = gsec(M2, ("1", "0"), ("0", "1"))  # (d_x, dy)
    b = gsec(M2, ("0", "1"), ("1", "0"))  # (d_y, dx)
    assert pairing(a, b) == Expr.const(M2, 2)


def test_bracket_on_vector_parts_is_lie_bracket():
    a = gsec(M2, ("1", "0"), ("0", "0"))
    b = gsec(M2, ("0", "x"), ("0", "0"))
    assert courant_bracket(a, b) == gsec(M2, ("0", "1"), ("0", "0"))


def test_bracket_with_form_part():
    a = gsec(M3, ("1", "0", "0"), ("0", "z", "0"))  # (d_x, z dy)
    b = gsec(M3, ("0", "1", "0"), ("0", "0", "0"))  # (d_y, 0)
    assert courant_bracket(a, b) == gsec(M3, ("0", "0", "0"), ("0", "0", "1"))


def test_bracket_of_pure_forms_vanishes():
    rng = random.Random(97)
    for _ in range(8):
        a = GSec(VField.zero(M3), rand_form(rng, M3, 1))
        b = GSec(VField.zero(M3), rand_form(rng, M3, 1))
        br = courant_bracket(a, b)
        assert br.vf.is_zero() and br.of.is_zero()


def test_bracket_leibniz_in_second_slot():
    rng = random.Random(101)
    for _ in range(8):
        a = GSec(rand_vf(rng, M2, 1), rand_form(rng, M2, 1, 1))
        b = GSec(rand_vf(rng, M2, 1), rand_form(rng, M2, 1, 1))
        f = rand_expr(rng, M2, max_deg=1)
        lhs = courant_bracket(a, b.scale(f))
        rhs = courant_bracket(a, b).scale(f) + b.scale(a.vf.apply(f))
        assert lhs == rhs


# -- graph constructors -------------------------------------------------------------


def test_graph_two_form_sections():
    w = wedge(KForm.d_coord(M2, "x"), KForm.d_coord(M2, "y"))
    l = graph_two_form(w)
    assert l.secs[0] == gsec(M2, ("1", "0"), ("0", "1"))
    assert l.secs[1] == gsec(M2, ("0", "1"), ("-1", "0"))


def test_graph_bivector_sections():
    p = Bivector(M2, {(0, 1): Expr.one(M2)})
    l = graph_bivector(p)
    assert l.secs[0] == gsec(M2, ("0", "1"), ("1", "0"))
    assert l.secs[1] == gsec(M2, ("-1", "0"), ("0", "1"))


def test_graphs_are_lagrangian():
    rng = random.Random(103)
    for _ in range(6):
        w = rand_form(rng, M3, 2, max_deg=2)
        assert check_lagrangian(graph_two_form(w)).passed
        p = Bivector(
            M3,
            {
                (0, 1): rand_expr(rng, M3, 1),
                (0, 2): rand_expr(rng, M3, 1),
                (1, 2): rand_expr(rng, M3, 1),
            },
        )
        assert check_lagrangian(graph_bivector(p)).passed


def test_foliation_frame_sections():
    l = foliation_frame([vf(M2, "1", "0")])
    assert len(l.secs) == 2
    assert l.secs[0].vf == vf(M2, "1", "0")
    # annihilator of span{d_x} is span{dy}
    assert l.secs[1].of.components()[0].is_zero()
    assert not l.secs[1].of.components()[1].is_zero()
    assert check_lagrangian(l).passed


def test_foliation_frame_zero_distribution():
    l = foliation_frame([], patch=M2)
    assert len(l.secs) == 2
    assert all(s.vf.is_zero() for s in l.secs)
    assert check_dirac(l).passed


def test_foliation_frame_full_tangent():
    l = foliation_frame([vf(M2, "1", "0"), vf(M2, "0", "1")])
    assert all(s.of.is_zero() for s in l.secs)
    assert check_dirac(l).passed


def test_foliation_rank_deficient():
    from diracgeom.errors import RankDeficient

    with pytest.raises(RankDeficient):
        foliation_frame([vf(M2, "x", "0"), vf(M2, "x^2", "0")])


# -- Lagrangian check ---------------------------------------------------------------


def test_check_lagrangian_isotropy_failure():
    patch = Patch("R1", ("x",))
    l = Frame(patch, (GSec(VField.coordinate(patch, "x"), KForm.d_coord(patch, "x")),))
    rep = check_lagrangian(l)
    assert not rep.passed
    assert "pairing[1,1]" in rep.witness


def test_check_lagrangian_maximality_failure():
    l = Frame(M2, (GSec(VField.coordinate(M2, "x"), KForm.zero(M2, 1)),))
    rep = check_lagrangian(l)
    assert not rep.passed
    assert "rank" in rep.witness


# -- Courant tensor ------------------------------------------------------------------


def test_courant_tensor_requires_lagrangian():
    patch = Patch("R1", ("x",))
    l = Frame(patch, (GSec(VField.coordinate(patch, "x"), KForm.d_coord(patch, "x")),))
    with pytest.raises(NotLagrangian):
        courant_tensor(l)


def test_mu_equals_dw_on_graphs():
    rng = random.Random(107)
    for _ in range(6):
        w = rand_form(rng, M3, 2)
        l = graph_two_form(w)
        mu = courant_tensor(l)
        dw = exterior_derivative(w)
        for (i, j, k), v in mu.items():
            fields = [VField.coordinate(M3, M3.coords[m]) for m in (i, j, k)]
            assert v == dw.evaluate(*fields)


def test_mu_equals_jacobiator_on_bivector_graphs():
    cases = [
        Bivector(M3, {(0, 1): Expr.one(M3), (0, 2): parse_expr("x", M3)}),
        Bivector(
            M3,
            {
                (0, 1): parse_expr("x", M3),
                (1, 2): parse_expr("y", M3),
                (0, 2): parse_expr("-z", M3),
            },
        ),
        so3_poisson(M3),
    ]
    for p in cases:
        mu = courant_tensor(graph_bivector(p))
        jac = schouten_jacobiator(p)
        for (i, j, k), v in jac.items():
            assert mu[(i, j, k)] == v


def test_mu_total_antisymmetry():
    rng = random.Random(109)
    w = rand_form(rng, M3, 2)
    mu = courant_tensor(graph_two_form(w))
    for (i, j, k), v in mu.items():
        assert mu[(j, i, k)] == -v
        assert mu[(i, k, j)] == -v
        assert mu[(j, k, i)] == v


def test_mu_tensoriality_under_section_scaling():
    rng = random.Random(113)
    w = rand_form(rng, M3, 2, max_deg=1)
    l = graph_two_form(w)
    f = parse_expr("1 + x*y", M3)
    scaled = Frame(M3, (l.secs[0].scale(f),) + l.secs[1:])
    mu = courant_tensor(l)
    mu_scaled = courant_tensor_unchecked(scaled)
    for (i, j, k), v in mu.items():
        mult = (i, j, k).count(0)
        assert mu_scaled[(i, j, k)] == v * f ** mult


def courant_tensor_unchecked(l):
    from diracgeom.courant import _mu_entries

    return _mu_entries(l)


# -- Dirac verdicts -------------------------------------------------------------------


def test_dirac_iff_closed_two_form():
    closed = KForm(M3, 2, {(0, 1): Expr.one(M3)})
    not_closed = KForm(M3, 2, {(0, 1): parse_expr("z", M3)})
    assert check_dirac(graph_two_form(closed)).passed
    rep = check_dirac(graph_two_form(not_closed))
    assert not rep.passed
    assert rep.witness == "mu[1,2,3] = 1"


def test_dirac_iff_poisson_bivector():
    assert check_dirac(graph_bivector(so3_poisson(M3))).passed
    bad = Bivector(
        M3,
        {
            (0, 1): parse_expr("x", M3),
            (1, 2): parse_expr("y", M3),
            (0, 2): parse_expr("-z", M3),
        },
    )
    assert not check_dirac(graph_bivector(bad)).passed


def test_dirac_iff_involutive_foliation():
    # [d_x, d_y + y d_z] = 0 stays in the span; [d_x, d_y + x d_z] = d_z leaves it
    good = foliation_frame([vf(M3, "1", "0", "0"), vf(M3, "0", "1", "y")])
    assert check_dirac(good).passed
    bad = foliation_frame([vf(M3, "1", "0", "0"), vf(M3, "0", "1", "x")])
    rep = check_dirac(bad)
    assert not rep.passed
    assert "mu[" in rep.witness


def test_dirac_report_shape():
    rep = check_dirac(graph_two_form(KForm(M3, 2, {(0, 1): parse_expr("z", M3)})))
    assert isinstance(rep, DiracReport)
    assert rep.lagrangian_ok and rep.integrable_ok is False


# -- b-field transforms -----------------------------------------------------------------


def test_bfield_shifts_graph():
    w = KForm(M3, 2, {(0, 1): Expr.one(M3)})
    b = KForm(M3, 2, {(1, 2): parse_expr("x", M3)})
    assert same_span(bfield_transform(graph_two_form(w), b), graph_two_form(w + b))


def test_bfield_preserves_lagrangian_always():
    rng = random.Random(127)
    for _ in range(5):
        w = rand_form(rng, M3, 2, max_deg=1)
        b = rand_form(rng, M3, 2, max_deg=2)
        assert check_lagrangian(bfield_transform(graph_two_form(w), b)).passed


def test_bfield_dirac_verdict_tracks_db():
    closed_b = KForm(M3, 2, {(1, 2): Expr.one(M3)})
    open_b = KForm(M3, 2, {(0, 1): parse_expr("z", M3)})
    frames = [
        graph_two_form(KForm(M3, 2, {(0, 1): Expr.one(M3)})),
        foliation_frame(
            [vf(M3, "1", "0", "0"), vf(M3, "0", "1", "0"), vf(M3, "0", "0", "1")]
        ),
    ]
    for l in frames:
        assert check_dirac(l).passed
        assert check_dirac(bfield_transform(l, closed_b)).passed
        assert not check_dirac(bfield_transform(l, open_b)).passed


def test_same_span_detects_difference():
    w1 = KForm(M2, 2, {(0, 1): Expr.one(M2)})
    w2 = KForm(M2, 2, {(0, 1): parse_expr("x", M2)})
    assert same_span(graph_two_form(w1), graph_two_form(w1))
    assert not same_span(graph_two_form(w1), graph_two_form(w2))
