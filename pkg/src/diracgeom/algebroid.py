"""Lie algebroids over a patch: anchor plus structure functions on a fixed frame.

A rank-r algebroid is stored through its action on the frame e_1..e_r:
anchor fields rho(e_a) and bracket coefficients [e_a, e_b] = sum c^k_ab e_k.
Sections are coefficient vectors of polynomials; their bracket carries the
Leibniz terms, so the Jacobi check on frame triples picks up anchor
derivatives of non-constant structure functions.

Sign conventions, fixed once:

  section bracket   [u, v]^k = sum u^a v^b c^k_ab + rho(u)(v^k) - rho(v)(u^k)
  dual Poisson      {x^i, x^j} = 0   {x^i, xi_a} = rho^i_a
                    {xi_a, xi_b} = -sum_k c^k_ab xi_k

The relative sign between the mixed and fiber-fiber brackets is forced by the
Jacobi identity as soon as some frame pair has both c != 0 and a nonzero
anchor; the mixed sign is pinned by the tangent-bundle case, where the dual
must carry the canonical bracket {x^i, p_j} = delta^i_j.
"""

from dataclasses import dataclass
from itertools import combinations

from .cartan import (
    Bivector,
    KForm,
    VField,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
)
from .courant import Frame, check_lagrangian
from .errors import (
    AnchorNotTangent,
    Inconsistent,
    NotAlgebroid,
    NotIdeal,
    NotLagrangian,
    NotLie,
    PatchMismatch,
    RankDeficient,
    RankTooLarge,
    WrongShape,
)
from .report import CheckItem, Report
from .symalg import Expr, Patch, RatExpr, fresh_names, generic_rank, solve_linear
from .tanlift import lift_function, lift_vector_field, tangent_patch

Structure = tuple[tuple[tuple[Expr, ...], ...], ...]


def _structure_tensor(base: Patch, rank: int, brackets) -> Structure:
    """Fill the full antisymmetric c[a][b][k] table from entries with a < b."""
    zero = Expr.zero(base)
    table = [[[zero] * rank for _ in range(rank)] for _ in range(rank)]
    for (a, b), comps in brackets.items():
        if not 0 <= a < b < rank:
            raise WrongShape(f"bracket key ({a}, {b}) must satisfy 0 <= a < b < rank")
        if len(comps) != rank:
            raise WrongShape(f"bracket ({a}, {b}) needs {rank} components")
        for k, e in enumerate(comps):
            if e.patch != base:
                raise PatchMismatch("structure function on a different patch")
            table[a][b][k] = e
            table[b][a][k] = -e
    return tuple(tuple(tuple(row) for row in plane) for plane in table)


@dataclass(frozen=True)
class AlgebroidPatch:
    """Anchor fields and structure functions of a would-be Lie algebroid.

    Jacobi and anchor compatibility are check results (check_lie_algebroid),
    not construction invariants; only shapes and antisymmetry are enforced.
    """

    base: Patch
    rank: int
    anchor: tuple[VField, ...]
    structure: Structure

    def __post_init__(self):
        if len(self.anchor) != self.rank:
            raise WrongShape(f"need {self.rank} anchor fields, got {len(self.anchor)}")
        for v in self.anchor:
            if v.patch != self.base:
                raise PatchMismatch("anchor field on a different patch")
        r = self.rank
        if len(self.structure) != r or any(
            len(p) != r or any(len(row) != r for row in p) for p in self.structure
        ):
            raise WrongShape("structure tensor must be rank x rank x rank")
        for a in range(r):
            for b in range(r):
                for k in range(r):
                    if self.structure[a][b][k] != -self.structure[b][a][k]:
                        raise WrongShape("structure tensor must be antisymmetric in (a, b)")

    def rho(self, coeffs) -> VField:
        """Anchor of the section with the given frame coefficients."""
        acc = VField.zero(self.base)
        for c, v in zip(coeffs, self.anchor):
            acc = acc + v.scale(c)
        return acc

    def frame_coeffs(self, a: int) -> tuple[Expr, ...]:
        return tuple(
            Expr.one(self.base) if k == a else Expr.zero(self.base) for k in range(self.rank)
        )

    def bracket_coeffs(self, u, v) -> tuple[Expr, ...]:
        """[u, v] with the Leibniz terms, as frame coefficients."""
        ru, rv = self.rho(u), self.rho(v)
        out = []
        for k in range(self.rank):
            acc = ru.apply(v[k]) - rv.apply(u[k])
            for a in range(self.rank):
                for b in range(self.rank):
                    acc = acc + u[a] * v[b] * self.structure[a][b][k]
            out.append(acc)
        return tuple(out)


def algebroid(base: Patch, anchors, brackets) -> AlgebroidPatch:
    """Build an AlgebroidPatch from anchor fields and a sparse {(a, b): comps} table."""
    anchors = tuple(anchors)
    return AlgebroidPatch(base, len(anchors), anchors, _structure_tensor(base, len(anchors), brackets))


def tangent_bundle_algebroid(base: Patch) -> AlgebroidPatch:
    """TM in the coordinate frame: identity anchor, vanishing structure."""
    anchors = tuple(VField.coordinate(base, c) for c in base.coords)
    return AlgebroidPatch(base, base.dim, anchors, _structure_tensor(base, base.dim, {}))


def tangent_lift_algebroid(a: AlgebroidPatch) -> AlgebroidPatch:
    """Tangent prolongation over TM with frame (Te_1..Te_r, e_1-hat..e_r-hat).

    Brackets: [Te_a, Te_b] = sum (c^k)^v Te_k + (c^k)^T e_k-hat,
    [Te_a, e_b-hat] = sum (c^k)^v e_k-hat, hats commute; the anchor sends
    Te_a to the tangent lift and e_a-hat to the vertical lift of rho(e_a).
    """
    r = a.rank
    total = tangent_patch(a.base).total
    anchors = [lift_vector_field(v, "tangent") for v in a.anchor]
    anchors += [lift_vector_field(v, "vertical") for v in a.anchor]
    brackets = {}
    for fa in range(r):
        for fb in range(fa + 1, r):
            comps = [Expr.zero(total)] * (2 * r)
            for k in range(r):
                c = a.structure[fa][fb][k]
                comps[k] = lift_function(c, "vertical")
                comps[r + k] = lift_function(c, "tangent")
            brackets[(fa, fb)] = comps
    for fa in range(r):
        for fb in range(r):
            comps = [Expr.zero(total)] * (2 * r)
            for k in range(r):
                comps[r + k] = lift_function(a.structure[fa][fb][k], "vertical")
            brackets[(fa, r + fb)] = comps
    return AlgebroidPatch(total, 2 * r, tuple(anchors), _structure_tensor(total, 2 * r, brackets))


def check_lie_algebroid(a: AlgebroidPatch) -> Report:
    """Jacobi identity on frame triples and anchor compatibility on frame pairs."""
    r = a.rank
    frame = [a.frame_coeffs(i) for i in range(r)]
    witness = None
    for i, j, k in combinations(range(r), 3):
        jac = [Expr.zero(a.base)] * r
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            inner = a.bracket_coeffs(frame[y], frame[z])
            outer = a.bracket_coeffs(frame[x], inner)
            jac = [p + q for p, q in zip(jac, outer)]
        bad = next((m for m in range(r) if not jac[m].is_zero()), None)
        if bad is not None:
            witness = f"jacobi[{i + 1},{j + 1},{k + 1}] has e_{bad + 1} component {jac[bad]}"
            break
    items = [CheckItem("jacobi identity on the frame", witness is None, witness)]
    witness = None
    for i in range(r):
        for j in range(i + 1, r):
            lhs = lie_bracket(a.anchor[i], a.anchor[j])
            rhs = a.rho(a.bracket_coeffs(frame[i], frame[j]))
            diff = lhs - rhs
            bad = next((m for m, c in enumerate(diff.components) if not c.is_zero()), None)
            if bad is not None:
                coord = a.base.coords[bad]
                witness = f"anchor breaks [e_{i + 1},e_{j + 1}]: d_{coord} component {diff.components[bad]}"
                break
        if witness:
            break
    items.append(CheckItem("anchor preserves brackets", witness is None, witness))
    return Report(tuple(items))


def dual_patch(a: AlgebroidPatch) -> Patch:
    """Total patch of the dual bundle: base coordinates then xi_1..xi_r."""
    fiber = tuple(f"xi_{i + 1}" for i in range(a.rank))
    clash = set(fiber) & set(a.base.coords)
    if clash:
        raise WrongShape(f"dual fiber names collide with base coordinates: {sorted(clash)}")
    return Patch(a.base.name + "_dual", a.base.coords + fiber)


def dual_linear_poisson(a: AlgebroidPatch) -> Bivector:
    """The fiberwise-linear Poisson bivector on the dual total patch."""
    rep = check_lie_algebroid(a)
    if not rep.passed:
        raise NotAlgebroid(rep.witness)
    total = dual_patch(a)
    n, r = a.base.dim, a.rank
    entries = {}
    for i in range(n):
        for fa in range(r):
            rho = a.anchor[fa].components[i].inject(total)
            if not rho.is_zero():
                entries[(i, n + fa)] = rho
    for fa in range(r):
        for fb in range(fa + 1, r):
            acc = Expr.zero(total)
            for k in range(r):
                c = a.structure[fa][fb][k]
                acc = acc - c.inject(total) * Expr.coord(total, f"xi_{k + 1}")
            if not acc.is_zero():
                entries[(n + fa, n + fb)] = acc
    return Bivector(total, entries)


# -- Lie bialgebroids ---------------------------------------------------------------


def _add_wedge(table: dict, i: int, j: int, coeff: Expr) -> None:
    if i == j or coeff.is_zero():
        return
    if i > j:
        i, j, coeff = j, i, -coeff
    table[(i, j)] = table.get((i, j), Expr.zero(coeff.patch)) + coeff


def _dual_differential_section(dual: AlgebroidPatch, u) -> dict:
    """d_* u as a wedge table: (d_*u)(xi_a, xi_b) with the dual anchor and bracket."""
    out = {}
    for fa in range(dual.rank):
        for fb in range(fa + 1, dual.rank):
            acc = dual.anchor[fa].apply(u[fb]) - dual.anchor[fb].apply(u[fa])
            for k in range(dual.rank):
                acc = acc - dual.structure[fa][fb][k] * u[k]
            _add_wedge(out, fa, fb, acc)
    return out


def _frame_bracket_wedge(a: AlgebroidPatch, b: int, table: dict) -> dict:
    """[e_b, P] for a wedge table P, extending the bracket as a degree-0 derivation."""
    out = {}
    rho_b = a.anchor[b]
    for (m, l), coeff in table.items():
        _add_wedge(out, m, l, rho_b.apply(coeff))
        for k in range(a.rank):
            _add_wedge(out, k, l, coeff * a.structure[b][m][k])
            _add_wedge(out, m, k, coeff * a.structure[b][l][k])
    return out


def _wedge_sub(p: dict, q: dict, patch: Patch) -> dict:
    out = dict(p)
    for key, coeff in q.items():
        out[key] = out.get(key, Expr.zero(patch)) - coeff
    return out


def _wedge_add(p: dict, q: dict, patch: Patch) -> dict:
    out = dict(p)
    for key, coeff in q.items():
        out[key] = out.get(key, Expr.zero(patch)) + coeff
    return out


def check_lie_bialgebroid(a: AlgebroidPatch, dual: AlgebroidPatch) -> Report:
    """Derivation condition d_*[u, v] = [d_*u, v] + [u, d_*v] on frame pairs.

    d_* is the differential of the dual structure acting on sections and
    wedge tables of the primary bundle; [P, v] = -[v, P] converts the
    first Schouten term to the derivation extension used here.
    """
    if dual.base != a.base:
        raise PatchMismatch("dual structure on a different base")
    if dual.rank != a.rank:
        raise WrongShape("dual structure must have the same rank")
    if a.rank > 4:
        raise RankTooLarge("bialgebroid check supports rank at most 4")
    for side, name in ((a, "primary"), (dual, "dual")):
        rep = check_lie_algebroid(side)
        if not rep.passed:
            raise NotAlgebroid(f"{name} structure: {rep.witness}")
    witness = None
    frame = [a.frame_coeffs(i) for i in range(a.rank)]
    d_frame = [_dual_differential_section(dual, f) for f in frame]
    for fa in range(a.rank):
        for fb in range(fa + 1, a.rank):
            lhs = _dual_differential_section(dual, a.bracket_coeffs(frame[fa], frame[fb]))
            # condition: d_*[e_a,e_b] + [e_b, d_*e_a] - [e_a, d_*e_b] = 0
            diff = _wedge_add(lhs, _frame_bracket_wedge(a, fb, d_frame[fa]), a.base)
            diff = _wedge_sub(diff, _frame_bracket_wedge(a, fa, d_frame[fb]), a.base)
            bad = next((key for key in sorted(diff) if not diff[key].is_zero()), None)
            if bad is not None:
                witness = (
                    f"derivation fails on (e_{fa + 1},e_{fb + 1}) at "
                    f"e_{bad[0] + 1}^e_{bad[1] + 1}: {diff[bad]}"
                )
                break
        if witness:
            break
    return Report((CheckItem("derivation condition on frame pairs", witness is None, witness),))


# -- IM 2-forms ------------------------------------------------------------------------


@dataclass(frozen=True)
class IMTwoForm:
    """A bundle map into covectors, one one-form per frame section."""

    sigma: tuple[KForm, ...]

    def __post_init__(self):
        for s in self.sigma:
            if s.degree != 1:
                raise WrongShape("IM data must consist of one-forms")
            if s.patch != self.sigma[0].patch:
                raise PatchMismatch("IM one-forms on different patches")


def im_from_two_form(a: AlgebroidPatch, b: KForm) -> IMTwoForm:
    """sigma(e_a) = i_{rho(e_a)} b, the flat map of b along the anchor."""
    if b.degree != 2:
        raise WrongShape("flat map needs a two-form")
    if b.patch != a.base:
        raise PatchMismatch("two-form on a different patch")
    return IMTwoForm(tuple(interior_product(v, b) for v in a.anchor))


def check_im_two_form(a: AlgebroidPatch, s: IMTwoForm) -> Report:
    """The two IM identities on frame pairs plus a function-multiple spot check."""
    rep = check_lie_algebroid(a)
    if not rep.passed:
        raise NotAlgebroid(rep.witness)
    if len(s.sigma) != a.rank:
        raise WrongShape("need one form per frame section")
    if s.sigma and s.sigma[0].patch != a.base:
        raise PatchMismatch("IM data on a different patch")
    r = a.rank
    witness = None
    for i in range(r):
        for j in range(i, r):
            p = s.sigma[i].evaluate(a.anchor[j]) + s.sigma[j].evaluate(a.anchor[i])
            if not p.is_zero():
                witness = f"<sigma(e_{i + 1}), rho(e_{j + 1})> + <sigma(e_{j + 1}), rho(e_{i + 1})> = {p}"
                break
        if witness:
            break
    items = [CheckItem("pairing with the anchor is antisymmetric", witness is None, witness)]

    def bracket_side(i, j):
        acc = KForm.zero(a.base, 1)
        for k in range(r):
            acc = acc + s.sigma[k].scale(a.structure[i][j][k])
        return acc

    def lie_side(i, j):
        out = lie_derivative(a.anchor[i], s.sigma[j]) - lie_derivative(a.anchor[j], s.sigma[i])
        return out + exterior_derivative(KForm.function(s.sigma[i].evaluate(a.anchor[j])))

    witness = None
    for i in range(r):
        for j in range(i + 1, r):
            diff = bracket_side(i, j) - lie_side(i, j)
            if diff != KForm.zero(a.base, 1):
                witness = f"sigma[e_{i + 1},e_{j + 1}] deviates by {diff}"
                break
        if witness:
            break
    items.append(CheckItem("bracket identity on frame pairs", witness is None, witness))

    witness = None
    if a.base.dim and r >= 2 and items[0].passed and items[1].passed:
        f = Expr.one(a.base) + Expr.coord(a.base, a.base.coords[0])
        for i in range(r):
            for j in range(r):
                if i == j:
                    continue
                # [f e_i, e_j] = f [e_i, e_j] - rho(e_j)(f) e_i
                lhs = bracket_side(i, j).scale(f) - s.sigma[i].scale(a.anchor[j].apply(f))
                rhs = lie_derivative(a.anchor[i].scale(f), s.sigma[j])
                rhs = rhs - lie_derivative(a.anchor[j], s.sigma[i].scale(f))
                rhs = rhs + exterior_derivative(
                    KForm.function(s.sigma[i].scale(f).evaluate(a.anchor[j]))
                )
                diff = lhs - rhs
                if diff != KForm.zero(a.base, 1):
                    witness = f"function multiple on (e_{i + 1},e_{j + 1}) deviates by {diff}"
                    break
            if witness:
                break
    items.append(CheckItem("function-multiple consistency", witness is None, witness))
    return Report(tuple(items))


# -- IM foliations -----------------------------------------------------------------------


@dataclass(frozen=True)
class IMFoliation:
    """Foliation data: tangent generators, frame columns spanning K, connection.

    nabla[j][m][l] is the coefficient of the l-th quotient class in the
    derivative of the m-th class along f_m[j]; None means the trivial
    connection.  Quotient classes are the frame sections outside k_sub in
    increasing index order.
    """

    f_m: tuple[VField, ...]
    k_sub: tuple[int, ...]
    nabla: tuple | None = None

    def __post_init__(self):
        if tuple(sorted(set(self.k_sub))) != self.k_sub:
            raise WrongShape("k_sub must be strictly increasing")
        for v in self.f_m:
            if v.patch != self.f_m[0].patch:
                raise PatchMismatch("foliation fields on different patches")


def _connection(f: IMFoliation, rank: int, base: Patch):
    quotient = [m for m in range(rank) if m not in f.k_sub]
    nq, nf = len(quotient), len(f.f_m)
    if f.nabla is None:
        zero = Expr.zero(base)
        return quotient, [[[zero] * nq for _ in range(nq)] for _ in range(nf)]
    if len(f.nabla) != nf or any(
        len(p) != nq or any(len(row) != nq for row in p) for p in f.nabla
    ):
        raise WrongShape("connection table must be n_f x n_q x n_q")
    return quotient, [[list(row) for row in plane] for plane in f.nabla]


def _span_coefficients(fields, target: VField):
    """Coefficients writing target in the span of fields, or None."""
    if not fields:
        return [] if target.is_zero() else None
    patch = target.patch
    rows = [[f.components[i] for f in fields] for i in range(patch.dim)]
    try:
        return solve_linear(rows, list(target.components))
    except Inconsistent:
        return None


def check_im_foliation(a: AlgebroidPatch, f: IMFoliation) -> Report:
    """The four foliation bullets, verified on frame generators.

    Flat sections are represented by the quotient frame classes; the
    connection enters through the flatness bullet and the flatness of
    bracket classes.
    """
    if f.f_m and f.f_m[0].patch != a.base:
        raise PatchMismatch("foliation on a different patch")
    for m in f.k_sub:
        if not 0 <= m < a.rank:
            raise WrongShape(f"k_sub index {m} out of range")
    if f.f_m:
        rows = [[v.components[i] for v in f.f_m] for i in range(a.base.dim)]
        if generic_rank(rows) != len(f.f_m):
            raise RankDeficient("foliation generators are generically dependent")
    k_anchors = [a.anchor[m] for m in f.k_sub]
    for m, v in zip(f.k_sub, k_anchors):
        if _span_coefficients(f.f_m, v) is None:
            raise AnchorNotTangent(f"rho(e_{m + 1}) is not tangent to the foliation")
    quotient, nabla = _connection(f, a.rank, a.base)
    frame = [a.frame_coeffs(i) for i in range(a.rank)]
    items = []

    # bullet 1: curvature of nabla, with [f_i, f_j] expanded in the foliation
    witness = None
    nf, nq = len(f.f_m), len(quotient)
    for i in range(nf):
        if witness:
            break
        for j in range(i + 1, nf):
            lam = _span_coefficients(f.f_m, lie_bracket(f.f_m[i], f.f_m[j]))
            if lam is None:
                witness = f"[f_{i + 1},f_{j + 1}] leaves the foliation span"
                break
            for m in range(nq):
                for l in range(nq):
                    curv = f.f_m[i].apply(nabla[j][m][l]) - f.f_m[j].apply(nabla[i][m][l])
                    for mid in range(nq):
                        curv = curv + nabla[i][mid][l] * nabla[j][m][mid]
                        curv = curv - nabla[j][mid][l] * nabla[i][m][mid]
                    # expansion coefficients can be rational functions
                    total = RatExpr(curv)
                    for s in range(nf):
                        total = total - lam[s] * RatExpr(nabla[s][m][l])
                    if not total.is_zero():
                        witness = f"curvature(f_{i + 1},f_{j + 1}) on class {m + 1}: {total}"
                        break
                if witness:
                    break
            if witness:
                break
    items.append(CheckItem("connection is flat", witness is None, witness))

    # bullet 2: brackets of quotient generators with K stay in K
    witness = None
    for m in quotient:
        for k in f.k_sub:
            br = a.bracket_coeffs(frame[m], frame[k])
            bad = next((l for l in quotient if not br[l].is_zero()), None)
            if bad is not None:
                witness = f"[e_{m + 1},e_{k + 1}] has class component e_{bad + 1} = {br[bad]}"
                break
        if witness:
            break
    items.append(CheckItem("brackets with K stay in K", witness is None, witness))

    # bullet 3: bracket classes of quotient generators are flat
    witness = None
    for mi in range(nq):
        if witness:
            break
        for mj in range(mi + 1, nq):
            br = a.bracket_coeffs(frame[quotient[mi]], frame[quotient[mj]])
            cls = [br[l] for l in quotient]
            for j in range(nf):
                for l in range(nq):
                    d = f.f_m[j].apply(cls[l])
                    for mid in range(nq):
                        d = d + nabla[j][mid][l] * cls[mid]
                    if not d.is_zero():
                        witness = (
                            f"class of [e_{quotient[mi] + 1},e_{quotient[mj] + 1}] is not "
                            f"flat along f_{j + 1}: {d}"
                        )
                        break
                if witness:
                    break
            if witness:
                break
    items.append(CheckItem("bracket classes are flat mod K", witness is None, witness))

    # bullet 4: anchors of quotient generators preserve the foliation
    witness = None
    for m in quotient:
        for j in range(nf):
            br = lie_bracket(a.rho(frame[m]), f.f_m[j])
            if _span_coefficients(f.f_m, br) is None:
                witness = f"[rho(e_{m + 1}), f_{j + 1}] leaves the foliation span"
                break
        if witness:
            break
    items.append(CheckItem("anchor flows preserve the foliation", witness is None, witness))
    return Report(tuple(items))


# -- Lie bialgebras --------------------------------------------------------------------


@dataclass(frozen=True)
class LieBialgebraData:
    """A Lie algebra over a point patch and constant structure for its dual."""

    g: AlgebroidPatch
    dual_c: Structure

    def __post_init__(self):
        if self.g.base.dim != 0:
            raise WrongShape("bialgebra data needs an algebra over a point patch")
        r = self.g.rank
        if len(self.dual_c) != r or any(
            len(p) != r or any(len(row) != r for row in p) for p in self.dual_c
        ):
            raise WrongShape("dual structure tensor must be rank x rank x rank")
        for a in range(r):
            for b in range(r):
                for k in range(r):
                    if self.dual_c[a][b][k] != -self.dual_c[b][a][k]:
                        raise WrongShape("dual structure must be antisymmetric")


def check_lie_bialgebra(d: LieBialgebraData, ideal=None) -> Report:
    """Cocycle condition and dual Jacobi, optionally after an ideal quotient."""
    g = d.g
    rep = check_lie_algebroid(g)
    if not rep.passed:
        raise NotLie(rep.witness)
    r = g.rank
    if ideal is None:
        ideal = ()
    ideal = tuple(sorted(set(ideal)))
    for m in ideal:
        if not 0 <= m < r:
            raise WrongShape(f"ideal index {m} out of range")
    quotient = [m for m in range(r) if m not in ideal]
    frame = [g.frame_coeffs(i) for i in range(r)]
    for i in range(r):
        for m in ideal:
            br = g.bracket_coeffs(frame[i], frame[m])
            bad = next((q for q in quotient if not br[q].is_zero()), None)
            if bad is not None:
                raise NotIdeal(
                    f"[e_{i + 1},e_{m + 1}] has quotient component e_{bad + 1} = {br[bad]}"
                )
    items = []

    # the dual of the quotient is the annihilator: it must close under the dual bracket
    witness = None
    for ai, qa in enumerate(quotient):
        for qb in quotient[ai + 1 :]:
            bad = next((m for m in ideal if not d.dual_c[qa][qb][m].is_zero()), None)
            if bad is not None:
                witness = (
                    f"[xi_{qa + 1},xi_{qb + 1}]* has annihilator-breaking component "
                    f"xi_{bad + 1} = {d.dual_c[qa][qb][bad]}"
                )
                break
        if witness:
            break
    items.append(CheckItem("dual bracket restricts to the annihilator", witness is None, witness))

    nq = len(quotient)
    point = g.base
    cbar = [[[g.structure[quotient[x]][quotient[y]][quotient[z]] for z in range(nq)] for y in range(nq)] for x in range(nq)]
    cstar = [[[d.dual_c[quotient[x]][quotient[y]][quotient[z]] for z in range(nq)] for y in range(nq)] for x in range(nq)]

    # Jacobi for the (quotient) dual algebra
    witness = None
    for x, y, z in combinations(range(nq), 3):
        for k in range(nq):
            acc = Expr.zero(point)
            for s in range(nq):
                acc = acc + cstar[x][y][s] * cstar[s][z][k]
                acc = acc + cstar[y][z][s] * cstar[s][x][k]
                acc = acc + cstar[z][x][s] * cstar[s][y][k]
            if not acc.is_zero():
                witness = f"dual jacobi[{x + 1},{y + 1},{z + 1}] component {k + 1}: {acc}"
                break
        if witness:
            break
    items.append(CheckItem("dual structure satisfies jacobi", witness is None, witness))

    # cocycle: delta[x, y] = ad_x delta(y) - ad_y delta(x)
    def delta(m):
        out = {}
        for x in range(nq):
            for y in range(x + 1, nq):
                _add_wedge(out, x, y, cstar[x][y][m])
        return out

    def ad_wedge(x, table):
        out = {}
        for (i, j), coeff in table.items():
            for k in range(nq):
                _add_wedge(out, k, j, coeff * cbar[x][i][k])
                _add_wedge(out, i, k, coeff * cbar[x][j][k])
        return out

    witness = None
    for x in range(nq):
        if witness:
            break
        for y in range(x + 1, nq):
            lhs = {}
            for m in range(nq):
                for key, coeff in delta(m).items():
                    _add_wedge(lhs, key[0], key[1], coeff * cbar[x][y][m])
            rhs = _wedge_sub(ad_wedge(x, delta(y)), ad_wedge(y, delta(x)), point)
            diff = _wedge_sub(lhs, rhs, point)
            bad = next((key for key in sorted(diff) if not diff[key].is_zero()), None)
            if bad is not None:
                witness = (
                    f"cocycle fails on (e_{x + 1},e_{y + 1}) at "
                    f"e_{bad[0] + 1}^e_{bad[1] + 1}: {diff[bad]}"
                )
                break
    items.append(CheckItem("dual cocycle condition", witness is None, witness))
    return Report(tuple(items))


# -- linearity of frames on a vector bundle total patch ------------------------------------


def check_linearity(l: Frame, n_base: int) -> Report:
    """Invariance of the span under the fiber scaling action with a formal parameter.

    With h_t(x, u) = (x, tu), compares the span of the frame at (x, tu)
    against the pointwise image (T h_t X, t (T h_t^-1)* alpha) of the span
    at (x, u); equality is generic-rank equality of the stacked matrices
    over the patch extended by t.
    """
    lag = check_lagrangian(l)
    if not lag.passed:
        raise NotLagrangian(lag.witness)
    patch = l.patch
    n = patch.dim
    if not 0 <= n_base <= n:
        raise WrongShape("base coordinate count out of range")
    (tname,) = fresh_names("t", 1, set(patch.coords))
    ext = Patch(patch.name + "_scaled", patch.coords + (tname,))
    t = Expr.coord(ext, tname)
    values = [Expr.coord(ext, c) for c in patch.coords]
    for i in range(n_base, n):
        values[i] = values[i] * t
    a_cols, b_cols = [], []
    for s in l.secs:
        comps = s.coefficients()
        a_cols.append([c.substitute(values, ext) for c in comps])
        inj = [c.inject(ext) for c in comps]
        col = []
        for i in range(n):
            col.append(inj[i] if i < n_base else inj[i] * t)
        for i in range(n):
            col.append(inj[n + i] * t if i < n_base else inj[n + i])
        b_cols.append(col)
    rows_a = [[col[r] for col in a_cols] for r in range(2 * n)]
    rows_b = [[col[r] for col in b_cols] for r in range(2 * n)]
    ra = generic_rank(rows_a)
    rb = generic_rank(rows_b)
    joint = generic_rank([rows_a[r] + rows_b[r] for r in range(2 * n)])
    ok = ra == rb == joint
    witness = None if ok else f"scaled span rank {ra}, action image rank {rb}, joint {joint}"
    return Report((CheckItem("span is invariant under fiber scaling", ok, witness),))
