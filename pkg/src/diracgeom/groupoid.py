"""Polynomial groupoids on global charts and their multiplicative structures.

A groupoid is stored as explicit polynomial structure maps together with a
solved chart of composable pairs: ``comp_chart`` parametrizes the pairs and
``g_of``/``h_of``/``mul`` read off the left factor, the right factor, and the
product.  Keeping the pair space as a chart of its own (instead of an implicit
constraint variety) keeps every derived computation polynomial.

Left and right translations are never supplied by the caller; they are
recovered from ``mul`` by freezing one argument, which is a constrained
derivative along the chart.  That single mechanism drives the cotangent
source/target maps, cotangent composition, right-invariant frames, and the
multiplicativity checks.

Cotangent unit convention: the unit covector over ``xi`` at ``eps(x)`` is the
unique covector annihilating the image of ``T eps`` and restricting to ``xi``
on the kernel of ``Ts``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebroid import AlgebroidPatch, IMTwoForm, algebroid, dual_patch
from .cartan import Bivector, KForm, PolyMap, VField, lie_bracket, pullback_form
from .courant import Frame, GSec, check_lagrangian, courant_bracket, pairing
from .errors import (
    ChartMismatch,
    HypothesisFails,
    Inconsistent,
    NotAGroup,
    NotComposable,
    NotLagrangian,
    NotMultiplicative,
    PatchMismatch,
    RankJump,
    TranslationNotDerivable,
    UnderdeterminedSpan,
    WrongShape,
)
from .report import CheckItem, Report
from .symalg import (
    Expr,
    ExprMatrix,
    Patch,
    RatExpr,
    clear_denominators,
    fresh_names,
    generic_rank,
    nullspace,
    solve_linear,
)
from .tanlift import cotangent_patch, tangent_map, tangent_patch


class MultReport(Report):
    """Report over the identities of one multiplicativity or axiom check."""


@dataclass(frozen=True)
class GroupoidPatch:
    """Groupoid structure maps over global polynomial charts."""

    base: Patch
    total: Patch
    src: PolyMap
    tgt: PolyMap
    unit: PolyMap
    inv: PolyMap
    comp_chart: Patch
    g_of: PolyMap
    h_of: PolyMap
    mul: PolyMap

    def __post_init__(self):
        expected = (
            (self.src, self.total, self.base),
            (self.tgt, self.total, self.base),
            (self.unit, self.base, self.total),
            (self.inv, self.total, self.total),
            (self.g_of, self.comp_chart, self.total),
            (self.h_of, self.comp_chart, self.total),
            (self.mul, self.comp_chart, self.total),
        )
        for m, source, target in expected:
            if m.source != source or m.target != target:
                raise WrongShape(f"structure map {m} should go {source.name} -> {target.name}")


# -- solved-chart linear data ---------------------------------------------------------


@dataclass(frozen=True)
class _ChartData:
    """Affine parts of g_of and h_of plus the stacked factor matrix."""

    a_g: tuple[tuple[Fraction, ...], ...]
    c_g: tuple[Fraction, ...]
    a_h: tuple[tuple[Fraction, ...], ...]
    c_h: tuple[Fraction, ...]

    @property
    def stacked(self):
        return self.a_g + self.a_h


def _affine_rows(m: PolyMap, exc) -> tuple[tuple[tuple[Fraction, ...], ...], tuple[Fraction, ...]]:
    dim = m.source.dim
    rows, consts = [], []
    for comp in m.components:
        if comp.degree() > 1:
            raise exc("factor projections must be affine in the chart coordinates")
        row = [Fraction(0)] * dim
        const = Fraction(0)
        for exps, coeff in comp.terms.items():
            if sum(exps) == 0:
                const = coeff
            else:
                row[exps.index(1)] = coeff
        rows.append(tuple(row))
        consts.append(const)
    return tuple(rows), tuple(consts)


def _chart_data(g: GroupoidPatch, exc) -> _ChartData:
    a_g, c_g = _affine_rows(g.g_of, exc)
    a_h, c_h = _affine_rows(g.h_of, exc)
    data = _ChartData(a_g, c_g, a_h, c_h)
    probe = ExprMatrix.from_rows(
        g.comp_chart,
        [[Expr.const(g.comp_chart, q) for q in row] for row in data.stacked],
    )
    # the chart must embed into the pair space, otherwise factors do not pin it down
    if generic_rank(probe) != g.comp_chart.dim:
        raise exc("the composable-pair chart has directions that move neither factor")
    return data


def _solve_const_system(rows, rhs, ppatch: Patch, exc, message: str) -> list[Expr]:
    """Solve a rational-constant linear system against polynomial right sides."""
    mat = ExprMatrix.from_rows(ppatch, [[Expr.const(ppatch, q) for q in row] for row in rows])
    try:
        sol = solve_linear(mat, list(rhs))
    except Inconsistent:
        raise exc(message) from None
    out = []
    for v in sol:
        if not v.is_polynomial():
            raise exc(message)
        out.append(v.as_expr())
    return out


def chart_params(
    g: GroupoidPatch,
    left: Sequence[Expr],
    right: Sequence[Expr],
    ppatch: Patch,
    exc=NotComposable,
) -> list[Expr]:
    """Chart coordinates of the composable pair (left, right)."""
    data = _chart_data(g, exc)
    rhs = [p - Expr.const(ppatch, q) for p, q in zip(list(left) + list(right), data.c_g + data.c_h)]
    return _solve_const_system(data.stacked, rhs, ppatch, exc, "the pair does not lie on the composable chart")


def _pair_direction(data: _ChartData, v_left, v_right, ppatch: Patch, exc, message: str) -> list[Expr]:
    """Chart direction moving the left factor by v_left and the right by v_right."""
    return _solve_const_system(data.stacked, list(v_left) + list(v_right), ppatch, exc, message)


def _subst_matrix(m: ExprMatrix, values: Sequence[Expr], ppatch: Patch) -> list[list[Expr]]:
    return [[e.substitute(list(values), ppatch) for e in row] for row in m.entries]


def _matvec(rows, vec, ppatch: Patch) -> list[Expr]:
    out = []
    for row in rows:
        acc = Expr.zero(ppatch)
        for a, b in zip(row, vec):
            acc = acc + a * b
        out.append(acc)
    return out


def _first_difference(lhs: Sequence[Expr], rhs: Sequence[Expr]) -> tuple[int, Expr] | None:
    for i, (a, b) in enumerate(zip(lhs, rhs)):
        if a != b:
            return i, a - b
    return None


# -- groupoid axioms --------------------------------------------------------------------


def check_groupoid_axioms(g: GroupoidPatch) -> MultReport:
    """All groupoid identities as polynomial equalities on derived charts."""
    matching = _first_difference(g.src.compose(g.g_of).components, g.tgt.compose(g.h_of).components)
    if matching is not None:
        raise ChartMismatch(
            f"left-factor source differs from right-factor target: component {matching[0] + 1} = {matching[1]}"
        )
    data = _chart_data(g, ChartMismatch)

    items = []

    def map_item(name: str, lhs: Sequence[Expr], rhs: Sequence[Expr]) -> None:
        diff = _first_difference(lhs, rhs)
        witness = None if diff is None else f"component {diff[0] + 1} deviates by {diff[1]}"
        items.append(CheckItem(name, diff is None, witness))

    map_item(
        "products have the source of the right factor",
        g.src.compose(g.mul).components,
        g.src.compose(g.h_of).components,
    )
    map_item(
        "products have the target of the left factor",
        g.tgt.compose(g.mul).components,
        g.tgt.compose(g.g_of).components,
    )
    map_item(
        "inversion swaps source and target",
        g.src.compose(g.inv).components + g.tgt.compose(g.inv).components,
        g.tgt.components + g.src.components,
    )

    total = g.total
    gp = [Expr.coord(total, c) for c in total.coords]
    unit_left = g.unit.apply(list(g.tgt.components), total)
    unit_right = g.unit.apply(list(g.src.components), total)

    def product(left, right):
        c0 = chart_params(g, left, right, total, ChartMismatch)
        return g.mul.apply(c0, total)

    map_item("left units act trivially", product(unit_left, gp), gp)
    map_item("right units act trivially", product(gp, unit_right), gp)
    inv_pt = list(g.inv.components)
    map_item("left inverses produce units", product(inv_pt, gp), unit_right)
    map_item("right inverses produce units", product(gp, inv_pt), unit_left)

    items.append(_associativity_item(g, data))
    return MultReport(tuple(items))


def _associativity_item(g: GroupoidPatch, data: _ChartData) -> CheckItem:
    """Compare the two triple products on a chart solved from the pair constraint."""
    d = g.comp_chart.dim
    n_total = g.total.dim
    scratch = Patch("q0", ())
    # composable triples: h_of of the first pair equals g_of of the second
    rows = []
    rhs = []
    for i in range(n_total):
        row = [Expr.const(scratch, q) for q in data.a_h[i]]
        row += [Expr.const(scratch, -q) for q in data.a_g[i]]
        rows.append(row)
        rhs.append(Expr.const(scratch, data.c_g[i] - data.c_h[i]))
    try:
        part = solve_linear(ExprMatrix.from_rows(scratch, rows), rhs)
    except Inconsistent:
        raise ChartMismatch("no composable triples fit on the chart") from None
    particular = [v.num.constant_value() / v.den.constant_value() for v in part]
    kernel = nullspace(ExprMatrix.from_rows(scratch, rows))
    tri = Patch(
        g.comp_chart.name + "_triples",
        tuple(fresh_names("tau", len(kernel), ())),
    )
    coords = [Expr.coord(tri, c) for c in tri.coords]
    z = []
    for j in range(2 * d):
        acc = Expr.const(tri, particular[j])
        for s, vec in enumerate(kernel):
            acc = acc + coords[s] * Expr.const(tri, vec[j].constant_value())
        z.append(acc)
    c_first, c_second = z[:d], z[d:]
    gh = g.mul.apply(c_first, tri)
    hk = g.mul.apply(c_second, tri)
    left = g.mul.apply(chart_params(g, gh, g.h_of.apply(c_second, tri), tri, ChartMismatch), tri)
    right = g.mul.apply(chart_params(g, g.g_of.apply(c_first, tri), hk, tri, ChartMismatch), tri)
    diff = _first_difference(left, right)
    witness = None if diff is None else f"component {diff[0] + 1} deviates by {diff[1]}"
    return CheckItem("composition is associative on the derived triple chart", diff is None, witness)


# -- tangent groupoid ---------------------------------------------------------------------


def tangent_groupoid(g: GroupoidPatch) -> GroupoidPatch:
    """Apply the tangent construction to every structure map."""
    return GroupoidPatch(
        base=tangent_patch(g.base).total,
        total=tangent_patch(g.total).total,
        src=tangent_map(g.src),
        tgt=tangent_map(g.tgt),
        unit=tangent_map(g.unit),
        inv=tangent_map(g.inv),
        comp_chart=tangent_patch(g.comp_chart).total,
        g_of=tangent_map(g.g_of),
        h_of=tangent_map(g.h_of),
        mul=tangent_map(g.mul),
    )


# -- built-in examples ----------------------------------------------------------------------


def pair_groupoid(m: Patch) -> GroupoidPatch:
    """Pairs of points of m, composing when the middle points agree."""
    n = m.dim
    total = Patch("Pair" + m.name, tuple(c + "_1" for c in m.coords) + tuple(c + "_2" for c in m.coords))
    chart = Patch(
        "Pair" + m.name + "_pairs",
        tuple(c + "_1" for c in m.coords) + tuple(c + "_2" for c in m.coords) + tuple(c + "_3" for c in m.coords),
    )
    tp = [Expr.coord(total, c) for c in total.coords]
    cp = [Expr.coord(chart, c) for c in chart.coords]
    mp = [Expr.coord(m, c) for c in m.coords]
    return GroupoidPatch(
        base=m,
        total=total,
        src=PolyMap(total, m, tuple(tp[n:])),
        tgt=PolyMap(total, m, tuple(tp[:n])),
        unit=PolyMap(m, total, tuple(mp + mp)),
        inv=PolyMap(total, total, tuple(tp[n:] + tp[:n])),
        comp_chart=chart,
        g_of=PolyMap(chart, total, tuple(cp[: 2 * n])),
        h_of=PolyMap(chart, total, tuple(cp[n:])),
        mul=PolyMap(chart, total, tuple(cp[:n] + cp[2 * n :])),
    )


def abelian_group(n: int) -> GroupoidPatch:
    """The additive group on n coordinates, over a one-point base."""
    base = Patch("pt", ())
    total = Patch(f"Ab{n}", tuple(f"x_{i + 1}" for i in range(n)))
    chart = Patch(
        f"Ab{n}_pairs",
        tuple(f"x_{i + 1}" for i in range(n)) + tuple(f"y_{i + 1}" for i in range(n)),
    )
    tp = [Expr.coord(total, c) for c in total.coords]
    cp = [Expr.coord(chart, c) for c in chart.coords]
    return GroupoidPatch(
        base=base,
        total=total,
        src=PolyMap(total, base, ()),
        tgt=PolyMap(total, base, ()),
        unit=PolyMap(base, total, tuple(Expr.zero(base) for _ in range(n))),
        inv=PolyMap(total, total, tuple(-x for x in tp)),
        comp_chart=chart,
        g_of=PolyMap(chart, total, tuple(cp[:n])),
        h_of=PolyMap(chart, total, tuple(cp[n:])),
        mul=PolyMap(chart, total, tuple(cp[i] + cp[n + i] for i in range(n))),
    )


def heisenberg3() -> GroupoidPatch:
    """Heisenberg group: central extension of the plane by the cocycle a2*b1."""
    base = Patch("pt", ())
    total = Patch("Heis3", ("a", "b", "c"))
    chart = Patch("Heis3_pairs", ("a_1", "b_1", "c_1", "a_2", "b_2", "c_2"))
    tp = [Expr.coord(total, c) for c in total.coords]
    cp = [Expr.coord(chart, c) for c in chart.coords]
    return GroupoidPatch(
        base=base,
        total=total,
        src=PolyMap(total, base, ()),
        tgt=PolyMap(total, base, ()),
        unit=PolyMap(base, total, (Expr.zero(base),) * 3),
        inv=PolyMap(total, total, (-tp[0], -tp[1], -tp[2] + tp[0] * tp[1])),
        comp_chart=chart,
        g_of=PolyMap(chart, total, tuple(cp[:3])),
        h_of=PolyMap(chart, total, tuple(cp[3:])),
        mul=PolyMap(chart, total, (cp[0] + cp[3], cp[1] + cp[4], cp[2] + cp[5] + cp[3] * cp[1])),
    )


# -- the algebroid of a groupoid ----------------------------------------------------------------


def algebroid_frame(g: GroupoidPatch) -> list[list[Expr]]:
    """Frame of the source-map kernel along units, as vectors over the base."""
    m, total = g.base, g.total
    n, n_total = m.dim, total.dim
    eps = list(g.unit.components)
    if n == 0:
        return [
            [Expr.const(m, 1 if i == a else 0) for i in range(n_total)]
            for a in range(n_total)
        ]
    js_unit = _subst_matrix(g.src.jacobian(), eps, m)
    basis = nullspace(ExprMatrix.from_rows(m, js_unit))
    if len(basis) != n_total - n:
        raise RankJump(
            f"kernel of the source map has rank {len(basis)} along units, expected {n_total - n}"
        )
    return basis


def _right_invariant_fields(g: GroupoidPatch, basis) -> list[VField]:
    """Extend kernel-frame vectors to the whole chart by right translation."""
    total = g.total
    data = _chart_data(g, TranslationNotDerivable)
    gp = [Expr.coord(total, c) for c in total.coords]
    x_t = list(g.tgt.components)
    eps_t = g.unit.apply(x_t, total)
    c0 = chart_params(g, eps_t, gp, total)
    dmul = _subst_matrix(g.mul.jacobian(), c0, total)
    zero = [Expr.zero(total)] * total.dim
    fields = []
    for vec in basis:
        v = [comp.substitute(x_t, total) for comp in vec]
        delta = _pair_direction(
            data, v, zero, total, TranslationNotDerivable, "kernel vector does not extend along the chart"
        )
        fields.append(VField(total, tuple(_matvec(dmul, delta, total))))
    return fields


def lie_algebroid_of(g: GroupoidPatch, frame: Sequence[Sequence[Expr]] | None = None) -> AlgebroidPatch:
    """Anchor and structure functions of the infinitesimal object of g.

    The frame is the kernel of the source map along units (or a caller-supplied
    frame of it); the anchor is the target map's derivative and brackets come
    from right-invariant extensions, re-expanded in the frame along units.
    """
    m = g.base
    n, n_total = m.dim, g.total.dim
    if frame is None:
        basis = algebroid_frame(g)
    else:
        basis = [list(col) for col in frame]
        eps = list(g.unit.components)
        if n:
            js_unit = _subst_matrix(g.src.jacobian(), eps, m)
            for col in basis:
                if any(not v.is_zero() for v in _matvec(js_unit, col, m)):
                    raise WrongShape("supplied frame leaves the kernel of the source map")
        cols_matrix = ExprMatrix.from_rows(m, [[col[i] for col in basis] for i in range(n_total)])
        if len(basis) != n_total - n or generic_rank(cols_matrix) != len(basis):
            raise WrongShape("supplied frame does not span the source kernel")
    eps = list(g.unit.components)
    jt_unit = _subst_matrix(g.tgt.jacobian(), eps, m)
    anchors = [VField(m, tuple(_matvec(jt_unit, col, m))) for col in basis]
    fields = _right_invariant_fields(g, basis)
    frame_matrix = ExprMatrix.from_rows(m, [[col[i] for col in basis] for i in range(n_total)])
    brackets = {}
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            bracket = lie_bracket(fields[a], fields[b])
            along_units = [comp.substitute(eps, m) for comp in bracket.components]
            try:
                coeffs = solve_linear(frame_matrix, along_units)
            except Inconsistent:
                raise RankJump("bracket of right-invariant fields leaves the kernel frame") from None
            comps = []
            for v in coeffs:
                if not v.is_polynomial():
                    raise RankJump("bracket coefficients are not polynomial on this chart")
                comps.append(v.as_expr())
            brackets[(a, b)] = tuple(comps)
    return algebroid(m, anchors, brackets)


# -- cotangent groupoid -------------------------------------------------------------------------


@dataclass(frozen=True)
class CovectorPoint:
    """A covector attached to a point of the total chart, over a parameter patch."""

    ppatch: Patch
    point: tuple[Expr, ...]
    covector: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.point) != len(self.covector):
            raise WrongShape("point and covector must have the same length")
        for e in self.point + self.covector:
            if e.patch != self.ppatch:
                raise PatchMismatch("covector data on a different parameter patch")


def cotangent_source_target(g: GroupoidPatch) -> tuple[PolyMap, PolyMap]:
    """Source and target of the cotangent groupoid, onto the dual algebroid chart.

    The source pairs a covector with left translates of target-horizontal
    kernel vectors; the target pairs it with right translates of the kernel
    frame itself.
    """
    basis = algebroid_frame(g)
    a = lie_algebroid_of(g)
    data = _chart_data(g, TranslationNotDerivable)
    ct = cotangent_patch(g.total).total
    dual = dual_patch(a)
    n_total = g.total.dim
    gp = [Expr.coord(ct, c) for c in ct.coords[:n_total]]
    xi = [Expr.coord(ct, c) for c in ct.coords[n_total:]]
    zero = [Expr.zero(ct)] * n_total

    def translated(point_basis, left_pair, direction_right):
        c0 = chart_params(g, *left_pair, ct, TranslationNotDerivable)
        dmul = _subst_matrix(g.mul.jacobian(), c0, ct)
        comps = []
        for vec in point_basis:
            if direction_right:
                delta = _pair_direction(
                    data, vec, zero, ct, TranslationNotDerivable, "translation direction missing from the chart"
                )
            else:
                delta = _pair_direction(
                    data, zero, vec, ct, TranslationNotDerivable, "translation direction missing from the chart"
                )
            moved = _matvec(dmul, delta, ct)
            acc = Expr.zero(ct)
            for p, w in zip(xi, moved):
                acc = acc + p * w
            comps.append(acc)
        return comps

    # target: right-translate the kernel frame at eps(t(g)) up to g
    x_t = [comp.substitute(gp, ct) for comp in g.tgt.components]
    eps_t = g.unit.apply(x_t, ct)
    frame_t = [[comp.substitute(x_t, ct) for comp in vec] for vec in basis]
    t_fiber = translated(frame_t, (eps_t, gp), True)

    # source: left-translate target-horizontal corrections of the frame at eps(s(g))
    x_s = [comp.substitute(gp, ct) for comp in g.src.components]
    eps_s = g.unit.apply(x_s, ct)
    frame_s = [[comp.substitute(x_s, ct) for comp in vec] for vec in basis]
    jt_eps = _subst_matrix(g.tgt.jacobian(), eps_s, ct)
    jeps = _subst_matrix(g.unit.jacobian(), x_s, ct)
    horizontal = []
    for vec in frame_s:
        down = _matvec(jt_eps, vec, ct)
        correction = _matvec(jeps, down, ct)
        horizontal.append([u - w for u, w in zip(vec, correction)])
    s_fiber = translated(horizontal, (gp, eps_s), False)

    s_map = PolyMap(ct, dual, tuple(x_s + s_fiber))
    t_map = PolyMap(ct, dual, tuple(x_t + t_fiber))
    return s_map, t_map


def _compose_covectors(g, data, dmul_rows, a_cov, b_cov, ppatch) -> list[RatExpr]:
    """Solve the defining pairing identity for the product covector."""
    n_total = g.total.dim
    d = g.comp_chart.dim
    rows = []
    rhs = []
    for j in range(d):
        rows.append([dmul_rows[i][j] for i in range(n_total)])
        acc = Expr.zero(ppatch)
        for i in range(n_total):
            acc = acc + a_cov[i] * Expr.const(ppatch, data.a_g[i][j])
            acc = acc + b_cov[i] * Expr.const(ppatch, data.a_h[i][j])
        rhs.append(acc)
    mat = ExprMatrix.from_rows(ppatch, rows)
    if generic_rank(mat) != n_total:
        raise UnderdeterminedSpan("the pairing identity does not pin down the product covector")
    return solve_linear(mat, rhs)


def cotangent_compose(g: GroupoidPatch, a: CovectorPoint, b: CovectorPoint) -> CovectorPoint:
    """Product covector characterized by additivity of the pairing on composable vectors."""
    if a.ppatch != b.ppatch:
        raise PatchMismatch("covectors over different parameter patches")
    ppatch = a.ppatch
    data = _chart_data(g, TranslationNotDerivable)
    c0 = chart_params(g, a.point, b.point, ppatch, NotComposable)
    s_map, t_map = cotangent_source_target(g)
    s_of_a = s_map.apply(list(a.point) + list(a.covector), ppatch)[g.base.dim :]
    t_of_b = t_map.apply(list(b.point) + list(b.covector), ppatch)[g.base.dim :]
    diff = _first_difference(s_of_a, t_of_b)
    if diff is not None:
        raise NotComposable(f"cotangent source and target differ at component {diff[0] + 1}: {diff[1]}")
    dmul = _subst_matrix(g.mul.jacobian(), c0, ppatch)
    sol = _compose_covectors(g, data, dmul, a.covector, b.covector, ppatch)
    cov = []
    for v in sol:
        if not v.is_polynomial():
            raise RankJump("product covector is not polynomial on this chart")
        cov.append(v.as_expr())
    point = g.mul.apply(c0, ppatch)
    return CovectorPoint(ppatch, tuple(point), tuple(cov))


# -- multiplicativity checks ---------------------------------------------------------------------


def check_multiplicative_two_form(g: GroupoidPatch, w: KForm) -> MultReport:
    """Pull the form back along multiplication and along the two factors."""
    if w.patch != g.total:
        raise PatchMismatch("two-form on a different patch")
    if w.degree != 2:
        raise WrongShape("need a two-form")
    diff = pullback_form(g.mul, w) - pullback_form(g.g_of, w) - pullback_form(g.h_of, w)
    witness = None
    if not diff.is_zero():
        idx, val = next(iter(sorted(diff.coeffs.items())))
        witness = f"coefficient[{idx[0] + 1},{idx[1] + 1}] = {val}"
    item = CheckItem("multiplication pulls the form back to the sum over the factors", diff.is_zero(), witness)
    return MultReport((item,))


def _translation_matrix(g, data, dmul_rows, right_frozen: bool, ppatch) -> list[list[Expr]]:
    """Derivative of translation by the frozen factor, column by column."""
    n_total = g.total.dim
    cols = []
    for i in range(n_total):
        e_i = [Expr.const(ppatch, 1 if k == i else 0) for k in range(n_total)]
        zero = [Expr.zero(ppatch)] * n_total
        if right_frozen:
            delta = _pair_direction(
                data, e_i, zero, ppatch, TranslationNotDerivable, "translation direction missing from the chart"
            )
        else:
            delta = _pair_direction(
                data, zero, e_i, ppatch, TranslationNotDerivable, "translation direction missing from the chart"
            )
        cols.append(_matvec(dmul_rows, delta, ppatch))
    return [[cols[j][i] for j in range(n_total)] for i in range(n_total)]


def check_multiplicative_bivector(g: GroupoidPatch, p: Bivector) -> MultReport:
    """Translation identity for bivectors; defined here for group patches only."""
    if g.base.dim != 0:
        raise NotAGroup("the translation identity needs a group patch; use check_multiplicative_frame")
    if p.patch != g.total:
        raise PatchMismatch("bivector on a different patch")
    chart = g.comp_chart
    data = _chart_data(g, TranslationNotDerivable)
    dmul = [list(r) for r in g.mul.jacobian().entries]
    left = _translation_matrix(g, data, dmul, False, chart)
    right = _translation_matrix(g, data, dmul, True, chart)
    mul_pt = list(g.mul.components)
    g_pt = list(g.g_of.components)
    h_pt = list(g.h_of.components)
    n_total = g.total.dim
    witness = None
    for k in range(n_total):
        for l in range(k + 1, n_total):
            acc = p.entry(k, l).substitute(mul_pt, chart)
            for i in range(n_total):
                for j in range(i + 1, n_total):
                    e_h = p.entry(i, j).substitute(h_pt, chart)
                    e_g = p.entry(i, j).substitute(g_pt, chart)
                    acc = acc - e_h * (left[k][i] * left[l][j] - left[k][j] * left[l][i])
                    acc = acc - e_g * (right[k][i] * right[l][j] - right[k][j] * right[l][i])
            if not acc.is_zero():
                witness = f"entry[{k + 1},{l + 1}] = {acc}"
                break
        if witness:
            break
    item = CheckItem("product bivector equals the sum of its translates", witness is None, witness)
    return MultReport((item,))


def _section_values(sec: GSec, point, ppatch) -> tuple[list[Expr], list[Expr]]:
    x = [comp.substitute(point, ppatch) for comp in sec.vf.components]
    al = [comp.substitute(point, ppatch) for comp in sec.of.components()]
    return x, al


def check_multiplicative_frame(g: GroupoidPatch, l: Frame) -> MultReport:
    """Subgroupoid test: composable frame combinations close up, and so do units.

    Composable pairs are parametrized by the kernel of the tangent and
    cotangent matching conditions over the pair chart; every composed product
    must stay in the span of the frame at the product point.  The unit-space
    span is computed along units and reported.
    """
    if l.patch != g.total:
        raise PatchMismatch("frame on a different patch")
    rep = check_lagrangian(l)
    if not rep.passed:
        raise NotLagrangian(rep.witness)
    chart = g.comp_chart
    m = g.base
    n, n_total, k = m.dim, g.total.dim, len(l.secs)
    data = _chart_data(g, TranslationNotDerivable)
    s_map, t_map = cotangent_source_target(g)
    basis = algebroid_frame(g)
    r = len(basis)

    g_pt = list(g.g_of.components)
    h_pt = list(g.h_of.components)
    mul_pt = list(g.mul.components)
    js_g = _subst_matrix(g.src.jacobian(), g_pt, chart)
    jt_h = _subst_matrix(g.tgt.jacobian(), h_pt, chart)

    left_vals = [_section_values(sec, g_pt, chart) for sec in l.secs]
    right_vals = [_section_values(sec, h_pt, chart) for sec in l.secs]

    def fiber_of(mp, point, cov):
        return mp.apply(list(point) + list(cov), chart)[n:]

    rows = []
    for i in range(n):
        row = [_matvec(js_g, left_vals[j][0], chart)[i] for j in range(k)]
        row += [-_matvec(jt_h, right_vals[j][0], chart)[i] for j in range(k)]
        rows.append(row)
    s_fibers = [fiber_of(s_map, g_pt, left_vals[j][1]) for j in range(k)]
    t_fibers = [fiber_of(t_map, h_pt, right_vals[j][1]) for j in range(k)]
    for a in range(r):
        rows.append([s_fibers[j][a] for j in range(k)] + [-t_fibers[j][a] for j in range(k)])
    if rows:
        kernel = nullspace(ExprMatrix.from_rows(chart, rows))
    else:
        kernel = [
            [Expr.const(chart, 1 if i == j else 0) for i in range(2 * k)] for j in range(2 * k)
        ]

    span_rows = _subst_matrix(l.coefficient_matrix(), mul_pt, chart)
    span = ExprMatrix.from_rows(chart, span_rows)
    span_rank = generic_rank(span)
    dmul = [list(row) for row in g.mul.jacobian().entries]

    witness = None
    for idx, vec in enumerate(kernel):
        lam, mu = vec[:k], vec[k:]
        x_left = [Expr.zero(chart)] * n_total
        a_left = [Expr.zero(chart)] * n_total
        x_right = [Expr.zero(chart)] * n_total
        b_right = [Expr.zero(chart)] * n_total
        for j in range(k):
            x_left = [acc + lam[j] * v for acc, v in zip(x_left, left_vals[j][0])]
            a_left = [acc + lam[j] * v for acc, v in zip(a_left, left_vals[j][1])]
            x_right = [acc + mu[j] * v for acc, v in zip(x_right, right_vals[j][0])]
            b_right = [acc + mu[j] * v for acc, v in zip(b_right, right_vals[j][1])]
        delta = _pair_direction(data, x_left, x_right, chart, RankJump, "composable pair escapes the chart")
        x_prod = _matvec(dmul, delta, chart)
        cov = _compose_covectors(g, data, dmul, a_left, b_right, chart)
        column = [RatExpr(v) for v in x_prod] + list(cov)
        cleared = clear_denominators(column)
        if generic_rank(span.augment([cleared])) != span_rank:
            witness = f"composable direction {idx + 1}: the product leaves the span"
            break
    items = [CheckItem("composable products stay in the span", witness is None, witness)]

    # unit-space closure: units over sources and targets of frame values lie in the span
    eps = list(g.unit.components)
    js_eps = _subst_matrix(g.src.jacobian(), eps, m)
    jt_eps = _subst_matrix(g.tgt.jacobian(), eps, m)
    jeps = [list(row) for row in g.unit.jacobian().entries]
    unit_vals = [_section_values(sec, eps, m) for sec in l.secs]
    span_unit = ExprMatrix.from_rows(m, _subst_matrix(l.coefficient_matrix(), eps, m))
    span_unit_rank = generic_rank(span_unit)
    frame_cols = [[col[i] for col in basis] for i in range(n_total)]

    def fiber_at_units(mp, cov):
        return mp.apply(eps + list(cov), m)[n:]

    witness = None
    e_columns = []
    for j in range(k):
        x_j, a_j = unit_vals[j]
        for down, fib in (
            (_matvec(js_eps, x_j, m), fiber_at_units(s_map, a_j)),
            (_matvec(jt_eps, x_j, m), fiber_at_units(t_map, a_j)),
        ):
            e_columns.append(list(down) + list(fib))
            tangent_part = _matvec(jeps, down, m)
            rows = []
            rhs = []
            for col in range(n):
                rows.append([jeps[i][col] for i in range(n_total)])
                rhs.append(Expr.zero(m))
            for a in range(r):
                rows.append([basis[a][i] for i in range(n_total)])
                rhs.append(fib[a])
            try:
                eta = solve_linear(ExprMatrix.from_rows(m, rows), rhs)
            except Inconsistent:
                raise RankJump("unit covector is not determined along units") from None
            column = [RatExpr(v) for v in tangent_part] + list(eta)
            cleared = clear_denominators(column)
            if generic_rank(span_unit.augment([cleared])) != span_unit_rank:
                witness = f"unit element over section {j + 1} leaves the span"
                break
        if witness:
            break
    rank_e = generic_rank(ExprMatrix.from_rows(m, [[c[i] for c in e_columns] for i in range(n)] + [[c[n + a] for c in e_columns] for a in range(r)])) if e_columns else 0
    items.append(
        CheckItem(
            "units over sources and targets stay in the span",
            witness is None,
            witness if witness else f"unit subbundle rank {rank_e}",
        )
    )
    return MultReport(tuple(items))


# -- induced infinitesimal data -------------------------------------------------------------------


def induced_im_two_form(g: GroupoidPatch, w: KForm) -> IMTwoForm:
    """Pair the kernel frame with the form along units, restricted to unit vectors."""
    if w.patch != g.total or w.degree != 2:
        raise WrongShape("need a two-form on the total chart")
    m = g.base
    n, n_total = m.dim, g.total.dim
    basis = algebroid_frame(g)
    eps = list(g.unit.components)
    jeps = [list(row) for row in g.unit.jacobian().entries]
    wmat = [[w.signed_coeff((i, j)).substitute(eps, m) for j in range(n_total)] for i in range(n_total)]
    sigma = []
    for vec in basis:
        comps = []
        for i in range(n):
            col = [jeps[kk][i] for kk in range(n_total)]
            acc = Expr.zero(m)
            for a in range(n_total):
                for b in range(n_total):
                    acc = acc + wmat[a][b] * vec[a] * col[b]
            comps.append(acc)
        sigma.append(KForm.one_form(m, comps))
    return IMTwoForm(tuple(sigma))


def induced_dual_bracket(g: GroupoidPatch, p: Bivector) -> AlgebroidPatch:
    """Linearize a multiplicative bivector at the unit into dual structure constants."""
    if g.base.dim != 0:
        raise NotAGroup("linearization at the unit needs a group patch")
    rep = check_multiplicative_bivector(g, p)
    if not rep.passed:
        raise NotMultiplicative(rep.witness)
    m = g.base
    eps = list(g.unit.components)
    n_total = g.total.dim
    brackets = {}
    for a in range(n_total):
        for b in range(a + 1, n_total):
            comps = tuple(
                p.entry(a, b).differentiate(g.total.coords[kk]).substitute(eps, m) for kk in range(n_total)
            )
            brackets[(a, b)] = comps
    zero = VField(m, ())
    return algebroid(m, [zero] * n_total, brackets)


# -- compatibility identities on sample sections ---------------------------------------------------


def _relatedness_witness(g, data, dmul, s_map, t_map, trio, chart) -> str | None:
    """First obstruction to a triple of sections being related by multiplication."""
    n = g.base.dim
    n_total = g.total.dim
    left, right, total = trio
    g_pt = list(g.g_of.components)
    h_pt = list(g.h_of.components)
    mul_pt = list(g.mul.components)
    x1, a1 = _section_values(left, g_pt, chart)
    x2, a2 = _section_values(right, h_pt, chart)
    x0, a0 = _section_values(total, mul_pt, chart)
    try:
        delta = _pair_direction(data, x1, x2, chart, NotComposable, "tangent parts are not composable")
    except NotComposable as exc:
        return str(exc)
    diff = _first_difference(_matvec(dmul, delta, chart), x0)
    if diff is not None:
        return f"tangent component {diff[0] + 1} deviates by {diff[1]}"
    s_fib = s_map.apply(g_pt + a1, chart)[n:]
    t_fib = t_map.apply(h_pt + a2, chart)[n:]
    diff = _first_difference(s_fib, t_fib)
    if diff is not None:
        return f"covector parts are not composable: component {diff[0] + 1} deviates by {diff[1]}"
    cov = _compose_covectors(g, data, dmul, a1, a2, chart)
    for i in range(n_total):
        if cov[i] != RatExpr(a0[i]):
            return f"covector component {i + 1} deviates"
    return None


def check_ca_identities(g: GroupoidPatch, samples: Sequence[tuple[GSec, GSec, GSec]]) -> MultReport:
    """Pairing additivity and bracket compatibility on related section triples."""
    chart = g.comp_chart
    data = _chart_data(g, TranslationNotDerivable)
    dmul = [list(row) for row in g.mul.jacobian().entries]
    s_map, t_map = cotangent_source_target(g)
    for idx, trio in enumerate(samples):
        for sec in trio:
            if sec.patch != g.total:
                raise PatchMismatch("sample section on a different patch")
        bad = _relatedness_witness(g, data, dmul, s_map, t_map, trio, chart)
        if bad is not None:
            raise HypothesisFails(f"sample {idx + 1}: {bad}")

    g_pt = list(g.g_of.components)
    h_pt = list(g.h_of.components)
    mul_pt = list(g.mul.components)
    witness = None
    for i in range(len(samples)):
        for j in range(len(samples)):
            lhs = pairing(samples[i][2], samples[j][2]).substitute(mul_pt, chart)
            rhs = pairing(samples[i][0], samples[j][0]).substitute(g_pt, chart)
            rhs = rhs + pairing(samples[i][1], samples[j][1]).substitute(h_pt, chart)
            if lhs != rhs:
                witness = f"samples ({i + 1},{j + 1}): pairing deviates by {lhs - rhs}"
                break
        if witness:
            break
    items = [CheckItem("pairing is additive over multiplication", witness is None, witness)]

    witness = None
    for i in range(len(samples)):
        for j in range(len(samples)):
            if i == j:
                continue
            bra = tuple(
                courant_bracket(samples[i][slot], samples[j][slot]) for slot in range(3)
            )
            bad = _relatedness_witness(g, data, dmul, s_map, t_map, bra, chart)
            if bad is not None:
                witness = f"samples ({i + 1},{j + 1}): bracket not related ({bad})"
                break
        if witness:
            break
    items.append(CheckItem("brackets of related sections stay related", witness is None, witness))
    return MultReport(tuple(items))
