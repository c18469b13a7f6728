"""Algebroid checks: Jacobi/anchor, dual Poisson, bialgebroids, IM data, linearity."""

import pytest

from diracgeom.algebroid import (
    AlgebroidPatch,
    IMFoliation,
    IMTwoForm,
    LieBialgebraData,
    algebroid,
    check_im_foliation,
    check_im_two_form,
    check_lie_algebroid,
    check_lie_bialgebra,
    check_lie_bialgebroid,
    check_linearity,
    dual_linear_poisson,
    dual_patch,
    im_from_two_form,
    tangent_bundle_algebroid,
    tangent_lift_algebroid,
)
from diracgeom.cartan import Bivector, KForm, VField, exterior_derivative, schouten_jacobiator, wedge
from diracgeom.courant import Frame, GSec, check_dirac, graph_bivector, graph_two_form
from diracgeom.errors import (
    AnchorNotTangent,
    NotAlgebroid,
    NotIdeal,
    NotLagrangian,
    RankDeficient,
    RankTooLarge,
    WrongShape,
)
from diracgeom.symalg import Expr, Patch, parse_expr

from test_cartan import one_form, vf

PT = Patch("pt", ())
R1 = Patch("R1", ("x",))
R2 = Patch("R2", ("x", "y"))
R3 = Patch("R3", ("x", "y", "z"))


def const_algebra(rank, brackets):
    """Lie algebra over a point: zero anchors, constant structure."""
    zero = VField.zero(PT)
    table = {
        key: [Expr.const(PT, v) for v in comps] for key, comps in brackets.items()
    }
    return algebroid(PT, [zero] * rank, table)


def so3():
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
    return const_algebra(3, {(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (0, 2): (0, -1, 0)})


def bad_cyclic():
    # [e1,e2]=e1, [e2,e3]=e2, [e3,e1]=e3: fails Jacobi
    return const_algebra(3, {(0, 1): (1, 0, 0), (1, 2): (0, 1, 0), (0, 2): (0, 0, -1)})


def aff1():
    # [e1,e2]=e2
    return const_algebra(2, {(0, 1): (0, 1)})


def abelian(rank):
    return const_algebra(rank, {})


def affine_anchored():
    """rho(e1) = d_x, rho(e2) = x d_x, [e1,e2] = e1 on the line."""
    return algebroid(
        R1,
        [vf(R1, "1"), vf(R1, "x")],
        {(0, 1): (Expr.one(R1), Expr.zero(R1))},
    )


# -- check_lie_algebroid ------------------------------------------------------------


def test_tangent_bundle_passes():
    assert check_lie_algebroid(tangent_bundle_algebroid(R2)).passed


def test_so3_passes_and_cyclic_fails():
    assert check_lie_algebroid(so3()).passed
    rep = check_lie_algebroid(bad_cyclic())
    assert not rep.passed
    assert "jacobi[1,2,3]" in rep.witness


def test_anchored_affine_algebroid_passes():
    rep = check_lie_algebroid(affine_anchored())
    assert rep.passed


def test_anchor_compatibility_failure():
    a = algebroid(R1, [vf(R1, "1"), vf(R1, "x")], {})
    rep = check_lie_algebroid(a)
    assert not rep.passed
    assert "anchor" in rep.witness


def test_jacobi_needs_anchor_derivative_terms():
    # Jacobi on (e1,e2,e3) only closes through rho(e1)(x^2) and rho(e2)(x):
    # [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2] = (x - 2x + x) e3
    z = Expr.zero(R1)
    a = algebroid(
        R1,
        [vf(R1, "1"), vf(R1, "x"), vf(R1, "0")],
        {
            (0, 1): (Expr.one(R1), z, z),
            (0, 2): (z, z, parse_expr("x", R1)),
            (1, 2): (z, z, parse_expr("x^2", R1)),
        },
    )
    rep = check_lie_algebroid(a)
    assert rep.passed, rep.witness


def test_structure_antisymmetry_enforced():
    with pytest.raises(WrongShape):
        AlgebroidPatch(
            PT,
            2,
            (VField.zero(PT), VField.zero(PT)),
            (
                ((Expr.zero(PT), Expr.zero(PT)), (Expr.one(PT), Expr.zero(PT))),
                ((Expr.one(PT), Expr.zero(PT)), (Expr.zero(PT), Expr.zero(PT))),
            ),
        )


# -- dual linear Poisson ---------------------------------------------------------------


def test_dual_poisson_of_tangent_bundle_is_canonical():
    p = dual_linear_poisson(tangent_bundle_algebroid(R2))
    total = dual_patch(tangent_bundle_algebroid(R2))
    assert total.coords == ("x", "y", "xi_1", "xi_2")
    assert p == Bivector(total, {(0, 2): Expr.one(total), (1, 3): Expr.one(total)})


def test_dual_poisson_of_so3():
    p = dual_linear_poisson(so3())
    total = p.patch
    assert total.coords == ("xi_1", "xi_2", "xi_3")
    assert p == Bivector(
        total,
        {
            (0, 1): -parse_expr("xi_3", total),
            (1, 2): -parse_expr("xi_1", total),
            (0, 2): parse_expr("xi_2", total),
        },
    )


def test_dual_poisson_of_abelian_is_zero():
    p = dual_linear_poisson(abelian(3))
    assert p == Bivector(p.patch, {})


def test_dual_poisson_satisfies_jacobi_across_library():
    library = [
        tangent_bundle_algebroid(R1),
        tangent_bundle_algebroid(R2),
        so3(),
        aff1(),
        affine_anchored(),
        tangent_lift_algebroid(affine_anchored()),
    ]
    for a in library:
        jac = schouten_jacobiator(dual_linear_poisson(a))
        assert all(v.is_zero() for v in jac.values())


def test_dual_poisson_rejects_non_algebroid():
    with pytest.raises(NotAlgebroid):
        dual_linear_poisson(bad_cyclic())


# -- tangent prolongation -----------------------------------------------------------------


def test_tangent_lift_algebroid_is_algebroid():
    for a in [so3(), affine_anchored(), tangent_bundle_algebroid(R2)]:
        lifted = tangent_lift_algebroid(a)
        assert lifted.rank == 2 * a.rank
        assert check_lie_algebroid(lifted).passed


# -- bialgebroids --------------------------------------------------------------------------


def test_bialgebroid_abelian_affine_pair():
    g = abelian(2)
    gstar = const_algebra(2, {(0, 1): (1, 0)})
    assert check_lie_bialgebroid(g, gstar).passed
    assert check_lie_bialgebroid(gstar, g).passed


def test_bialgebroid_aff1_self_paired():
    g = aff1()
    dual_on_xi1 = const_algebra(2, {(0, 1): (1, 0)})
    dual_on_xi2 = const_algebra(2, {(0, 1): (0, 1)})
    # both duals satisfy the derivation condition, with nonzero terms for xi2
    assert check_lie_bialgebroid(g, dual_on_xi1).passed
    assert check_lie_bialgebroid(g, dual_on_xi2).passed
    assert check_lie_bialgebroid(dual_on_xi2, g).passed


def test_bialgebroid_so3_pair_fails_symmetrically():
    rep = check_lie_bialgebroid(so3(), so3())
    assert not rep.passed
    assert "derivation fails" in rep.witness
    assert not check_lie_bialgebroid(so3(), so3()).passed


def test_bialgebroid_with_anchors():
    a = tangent_bundle_algebroid(R1)
    dual = algebroid(R1, [VField.zero(R1)], {})
    assert check_lie_bialgebroid(a, dual).passed
    assert check_lie_bialgebroid(dual, a).passed


def test_bialgebroid_shape_errors():
    big = abelian(5)
    with pytest.raises(RankTooLarge):
        check_lie_bialgebroid(big, big)
    with pytest.raises(NotAlgebroid):
        check_lie_bialgebroid(bad_cyclic(), so3())
    with pytest.raises(WrongShape):
        check_lie_bialgebroid(abelian(2), abelian(3))


# -- IM 2-forms ------------------------------------------------------------------------------


def test_im_two_form_closed_passes_open_fails():
    a = tangent_bundle_algebroid(R3)
    closed = wedge(KForm.d_coord(R3, "x"), KForm.d_coord(R3, "y"))
    assert check_im_two_form(a, im_from_two_form(a, closed)).passed
    open_b = KForm(R3, 2, {(0, 1): parse_expr("z", R3)})
    rep = check_im_two_form(a, im_from_two_form(a, open_b))
    assert not rep.passed
    assert rep.items[0].passed and not rep.items[1].passed


def test_im_two_form_matches_closedness_over_library():
    a = tangent_bundle_algebroid(R3)
    library = [
        KForm(R3, 2, {(0, 1): Expr.one(R3)}),
        KForm(R3, 2, {(0, 1): parse_expr("z", R3)}),
        KForm(R3, 2, {(0, 1): parse_expr("z", R3), (1, 2): parse_expr("x", R3), (0, 2): parse_expr("-y", R3)}),
        KForm(R3, 2, {(1, 2): parse_expr("x^2", R3)}),
        KForm(R3, 2, {(0, 1): parse_expr("x*y", R3), (0, 2): parse_expr("y", R3)}),
    ]
    for b in library:
        rep = check_im_two_form(a, im_from_two_form(a, b))
        closed = exterior_derivative(b) == KForm.zero(R3, 3)
        assert rep.passed == closed, str(b)


def test_im_zero_passes_on_nontrivial_algebroid():
    a = affine_anchored()
    zero = IMTwoForm((KForm.zero(R1, 1), KForm.zero(R1, 1)))
    assert check_im_two_form(a, zero).passed


def test_im_two_form_requires_algebroid():
    with pytest.raises(NotAlgebroid):
        check_im_two_form(bad_cyclic(), IMTwoForm((KForm.zero(PT, 1),) * 3))


# -- IM foliations -----------------------------------------------------------------------------


def test_im_foliation_coordinate_example_passes():
    a = tangent_bundle_algebroid(R2)
    f = IMFoliation((vf(R2, "1", "0"),), (0,))
    rep = check_im_foliation(a, f)
    assert rep.passed, rep.witness


def test_im_foliation_bracket_stability_failure():
    # frame e1 = d_x, e2 = d_y + x d_x with [e1,e2] = e1; K = span{e2}
    a = algebroid(
        R2,
        [vf(R2, "1", "0"), vf(R2, "x", "1")],
        {(0, 1): (Expr.one(R2), Expr.zero(R2))},
    )
    assert check_lie_algebroid(a).passed
    f = IMFoliation((vf(R2, "1", "0"), vf(R2, "0", "1")), (1,))
    rep = check_im_foliation(a, f)
    assert not rep.passed
    assert not rep.items[1].passed


def test_im_foliation_vacuous_full_kernel():
    a = tangent_bundle_algebroid(R2)
    f = IMFoliation((vf(R2, "1", "0"), vf(R2, "0", "1")), (0, 1))
    assert check_im_foliation(a, f).passed


def test_im_foliation_anchor_not_tangent():
    a = tangent_bundle_algebroid(R2)
    with pytest.raises(AnchorNotTangent):
        check_im_foliation(a, IMFoliation((vf(R2, "1", "0"),), (1,)))


def test_im_foliation_rank_deficient_generators():
    a = tangent_bundle_algebroid(R2)
    with pytest.raises(RankDeficient):
        check_im_foliation(a, IMFoliation((vf(R2, "1", "0"), vf(R2, "x", "0")), ()))


def test_im_foliation_flat_and_curved_connections():
    a = tangent_bundle_algebroid(R2)
    zero = Expr.zero(R2)
    one = Expr.one(R2)
    fields = (vf(R2, "1", "0"), vf(R2, "0", "1"))
    # constant nilpotent coefficient along f1 commutes with zero along f2
    flat = ((( zero, one), (zero, zero)), ((zero, zero), (zero, zero)))
    rep = check_im_foliation(a, IMFoliation(fields, (), flat))
    assert rep.items[0].passed
    curved = (((zero, parse_expr("y", R2)), (zero, zero)), ((zero, zero), (zero, zero)))
    rep = check_im_foliation(a, IMFoliation(fields, (), curved))
    assert not rep.items[0].passed


# -- Lie bialgebras ------------------------------------------------------------------------------


def test_bialgebra_abelian_affine_passes():
    d = LieBialgebraData(abelian(2), const_algebra(2, {(0, 1): (1, 0)}).structure)
    assert check_lie_bialgebra(d).passed


def test_bialgebra_so3_pair_fails_cocycle():
    d = LieBialgebraData(so3(), so3().structure)
    rep = check_lie_bialgebra(d)
    assert not rep.passed
    assert "cocycle" in rep.witness


def test_bialgebra_full_ideal_quotient_trivially_passes():
    d = LieBialgebraData(so3(), so3().structure)
    assert check_lie_bialgebra(d, ideal=(0, 1, 2)).passed


def test_bialgebra_not_ideal():
    d = LieBialgebraData(so3(), abelian(3).structure)
    with pytest.raises(NotIdeal):
        check_lie_bialgebra(d, ideal=(0,))


def test_bialgebra_heisenberg_center_quotient():
    heis = const_algebra(3, {(0, 1): (0, 0, 1)})
    # dual bracket [xi1,xi2]* = xi3 hits the ideal annihilator
    d_bad = LieBialgebraData(heis, const_algebra(3, {(0, 1): (0, 0, 1)}).structure)
    rep = check_lie_bialgebra(d_bad, ideal=(2,))
    assert not rep.items[0].passed
    d_ok = LieBialgebraData(heis, const_algebra(3, {(0, 1): (1, 0, 0)}).structure)
    assert check_lie_bialgebra(d_ok, ideal=(2,)).passed


def test_bialgebra_agrees_with_bialgebroid_over_point():
    pairs = [
        (aff1(), const_algebra(2, {(0, 1): (0, 1)})),
        (aff1(), const_algebra(2, {(0, 1): (1, 0)})),
        (so3(), so3()),
        (abelian(2), const_algebra(2, {(0, 1): (1, 0)})),
    ]
    for g, gstar in pairs:
        broid = check_lie_bialgebroid(g, gstar).passed
        bra = check_lie_bialgebra(LieBialgebraData(g, gstar.structure)).passed
        assert broid == bra


# -- linearity ------------------------------------------------------------------------------------


def test_linearity_of_lie_poisson_graph():
    p = dual_linear_poisson(so3())
    rep = check_linearity(graph_bivector(p), n_base=0)
    assert rep.passed


def test_linearity_fails_for_constant_bivector():
    total = dual_patch(abelian(2))
    p = Bivector(total, {(0, 1): Expr.one(total)})
    rep = check_linearity(graph_bivector(p), n_base=0)
    assert not rep.passed
    assert "rank" in rep.witness


def test_linearity_of_canonical_symplectic_graph():
    from diracgeom.tanlift import canonical_symplectic, cotangent_patch

    w = canonical_symplectic(cotangent_patch(R2))
    rep = check_linearity(graph_two_form(w), n_base=2)
    assert rep.passed


def test_linearity_mixed_weight_fails():
    total = Patch("E", ("x", "u"))
    w = KForm(total, 2, {(0, 1): Expr.one(total) + parse_expr("u", total)})
    rep = check_linearity(graph_two_form(w), n_base=1)
    assert not rep.passed


def test_linearity_requires_lagrangian():
    bad = Frame(R1, (GSec(VField.coordinate(R1, "x"), KForm.d_coord(R1, "x")),))
    with pytest.raises(NotLagrangian):
        check_linearity(bad, n_base=1)


def test_linearity_base_count_validated():
    p = dual_linear_poisson(abelian(2))
    with pytest.raises(WrongShape):
        check_linearity(graph_bivector(p), n_base=7)


def test_bialgebroid_dual_poisson_graph_is_dirac_and_linear():
    g = aff1()
    gstar = const_algebra(2, {(0, 1): (0, 1)})
    assert check_lie_bialgebroid(g, gstar).passed
    graph = graph_bivector(dual_linear_poisson(g))
    assert check_dirac(graph).passed
    assert check_linearity(graph, n_base=0).passed
