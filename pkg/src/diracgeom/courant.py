"""Generalized sections, Courant bracket, and Dirac structure checks.

A generalized section is a pair (vector field, one-form) on one patch.  The
pairing and bracket are

    <(X, a), (Y, b)> = a(Y) + b(X)
    [[(X, a), (Y, b)]] = ([X, Y], L_X b - i_Y da)

and the integrability obstruction of a Lagrangian frame is the trilinear
tensor mu(i, j, k) = <[[s_i, s_j]], s_k>, which vanishes identically exactly
when the spanned subbundle is Dirac.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cartan import (
    Bivector,
    KForm,
    VField,
    exterior_derivative,
    interior_product,
    lie_bracket,
    lie_derivative,
    sharp_bivector,
)
from .errors import NotLagrangian, PatchMismatch, RankDeficient
from .report import CheckItem, Report
from .symalg import Expr, ExprMatrix, Patch, generic_rank, nullspace


@dataclass(frozen=True)
class GSec:
    """Section of TM + T*M: a vector field and a one-form."""

    vf: VField
    of: KForm

    def __post_init__(self):
        if self.of.degree != 1:
            raise ValueError("form part must have degree 1")
        if self.vf.patch != self.of.patch:
            raise PatchMismatch("vector and form parts on different patches")

    @property
    def patch(self) -> Patch:
        return self.vf.patch

    @staticmethod
    def zero(patch: Patch) -> "GSec":
        return GSec(VField.zero(patch), KForm.zero(patch, 1))

    def __add__(self, other: "GSec") -> "GSec":
        return GSec(self.vf + other.vf, self.of + other.of)

    def __sub__(self, other: "GSec") -> "GSec":
        return GSec(self.vf - other.vf, self.of - other.of)

    def __neg__(self) -> "GSec":
        return GSec(-self.vf, -self.of)

    def scale(self, f: Expr) -> "GSec":
        return GSec(self.vf.scale(f), self.of.scale(f))

    def coefficients(self) -> list[Expr]:
        """Stacked component vector (vector components, then form components)."""
        return list(self.vf.components) + list(self.of.components())

    def __str__(self):
        return f"({self.vf}; {self.of})"


@dataclass(frozen=True)
class Frame:
    """Ordered generating sections for a would-be Dirac structure.

    The container itself is loose; check_lagrangian verifies the span is
    Lagrangian (isotropic of generic rank n) and reports failures.
    """

    patch: Patch
    secs: tuple[GSec, ...]

    def __post_init__(self):
        for s in self.secs:
            if s.patch != self.patch:
                raise PatchMismatch("section on a different patch")

    def __len__(self):
        return len(self.secs)

    def coefficient_matrix(self) -> ExprMatrix:
        """2n x k matrix whose columns are the stacked section components."""
        n2 = 2 * self.patch.dim
        cols = [s.coefficients() for s in self.secs]
        rows = [[col[r] for col in cols] for r in range(n2)]
        if not cols:
            rows = [[] for _ in range(n2)]
        return ExprMatrix.from_rows(self.patch, rows)


@dataclass(frozen=True)
class DiracReport:
    lagrangian_ok: bool
    lagrangian_witness: str | None
    integrable_ok: bool | None
    integrable_witness: str | None

    @property
    def passed(self) -> bool:
        return self.lagrangian_ok and self.integrable_ok is True

    @property
    def witness(self) -> str | None:
        if not self.lagrangian_ok:
            return self.lagrangian_witness
        if self.integrable_ok is False:
            return self.integrable_witness
        return None

    def __str__(self):
        if self.passed:
            return "dirac: pass"
        return f"dirac: fail [{self.witness}]"


# -- pairing and bracket ---------------------------------------------------------


def pairing(a1: GSec, a2: GSec) -> Expr:
    """<(X, a), (Y, b)> = a(Y) + b(X)."""
    if a1.patch != a2.patch:
        raise PatchMismatch("sections on different patches")
    return a1.of.evaluate(a2.vf) + a2.of.evaluate(a1.vf)


def courant_bracket(a1: GSec, a2: GSec) -> GSec:
    """[[(X, a), (Y, b)]] = ([X, Y], L_X b - i_Y da)."""
    if a1.patch != a2.patch:
        raise PatchMismatch("sections on different patches")
    x, a = a1.vf, a1.of
    y, b = a2.vf, a2.of
    return GSec(lie_bracket(x, y), lie_derivative(x, b) - interior_product(y, exterior_derivative(a)))


# -- frame constructors ------------------------------------------------------------


def graph_two_form(w: KForm) -> Frame:
    """Sections (d_i, i_{d_i} w) spanning the graph of a two-form."""
    if w.degree != 2:
        raise ValueError("graph_two_form needs a two-form")
    patch = w.patch
    secs = []
    for c in patch.coords:
        e = VField.coordinate(patch, c)
        secs.append(GSec(e, interior_product(e, w)))
    return Frame(patch, tuple(secs))


def graph_bivector(p: Bivector) -> Frame:
    """Sections (p^#(dx^i), dx^i) spanning the graph of a bivector."""
    patch = p.patch
    secs = []
    for c in patch.coords:
        a = KForm.d_coord(patch, c)
        secs.append(GSec(sharp_bivector(p, a), a))
    return Frame(patch, tuple(secs))


def foliation_frame(fields: list[VField], patch: Patch | None = None) -> Frame:
    """Frame for F + Ann(F): the fields, then polynomial annihilator one-forms.

    The fields must be generically independent (RankDeficient otherwise).
    ``patch`` is only needed when the list is empty.
    """
    if fields:
        patch = fields[0].patch
    elif patch is None:
        raise ValueError("empty foliation needs an explicit patch")
    for f in fields:
        if f.patch != patch:
            raise PatchMismatch("foliation field on a different patch")
    n = patch.dim
    r = len(fields)
    if r:
        span_rows = [[f.components[i] for i in range(n)] for f in fields]
        if generic_rank(span_rows) != r:
            raise RankDeficient(f"{r} fields span generic rank {generic_rank(span_rows)}")
        ann = nullspace(span_rows)
    else:
        ann = [
            [Expr.one(patch) if j == i else Expr.zero(patch) for j in range(n)]
            for i in range(n)
        ]
    secs = [GSec(f, KForm.zero(patch, 1)) for f in fields]
    for a in ann:
        secs.append(GSec(VField.zero(patch), KForm.one_form(patch, a)))
    return Frame(patch, tuple(secs))


def bfield_transform(l: Frame, b: KForm) -> Frame:
    """Gauge transform (X, a) -> (X, a + i_X b)."""
    if b.degree != 2:
        raise ValueError("b-field must be a two-form")
    if b.patch != l.patch:
        raise PatchMismatch("b-field on a different patch")
    secs = tuple(GSec(s.vf, s.of + interior_product(s.vf, b)) for s in l.secs)
    return Frame(l.patch, secs)


# -- checks -----------------------------------------------------------------------


def check_lagrangian(l: Frame) -> Report:
    """Isotropy of all section pairs plus generic maximality (rank = dim)."""
    items = []
    iso_witness = None
    for i in range(len(l.secs)):
        if iso_witness:
            break
        for j in range(i, len(l.secs)):
            p = pairing(l.secs[i], l.secs[j])
            if not p.is_zero():
                iso_witness = f"pairing[{i + 1},{j + 1}] = {p}"
                break
    items.append(CheckItem("isotropic", iso_witness is None, iso_witness))
    n = l.patch.dim
    rank = generic_rank(l.coefficient_matrix()) if l.secs else 0
    max_ok = rank == n and len(l.secs) == n
    witness = None if max_ok else f"generic rank {rank} with {len(l.secs)} sections, need {n}"
    items.append(CheckItem("maximal", max_ok, witness))
    return Report(tuple(items))


def courant_tensor(l: Frame) -> dict[tuple[int, int, int], Expr]:
    """mu(i, j, k) = <[[s_i, s_j]], s_k> on all index triples (0-based keys).

    Requires a Lagrangian frame; on one, mu is tensorial and totally
    antisymmetric, and vanishes identically exactly for Dirac structures.
    """
    lag = check_lagrangian(l)
    if not lag.passed:
        raise NotLagrangian(lag.witness)
    return _mu_entries(l)


def _mu_entries(l: Frame) -> dict[tuple[int, int, int], Expr]:
    n = len(l.secs)
    brackets = {}
    for i in range(n):
        for j in range(n):
            brackets[(i, j)] = courant_bracket(l.secs[i], l.secs[j])
    out = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                out[(i, j, k)] = pairing(brackets[(i, j)], l.secs[k])
    return out


def check_dirac(l: Frame) -> DiracReport:
    """Lagrangian check plus vanishing of the Courant tensor."""
    lag = check_lagrangian(l)
    if not lag.passed:
        return DiracReport(False, lag.witness, None, None)
    mu = _mu_entries(l)
    for (i, j, k) in sorted(mu):
        if not mu[(i, j, k)].is_zero():
            witness = f"mu[{i + 1},{j + 1},{k + 1}] = {mu[(i, j, k)]}"
            return DiracReport(True, None, False, witness)
    return DiracReport(True, None, True, None)


def same_span(l1: Frame, l2: Frame) -> bool:
    """Generic span equality of two frames on one patch."""
    if l1.patch != l2.patch:
        raise PatchMismatch("frames on different patches")
    m1 = l1.coefficient_matrix()
    m2 = l2.coefficient_matrix()
    r1 = generic_rank(m1)
    r2 = generic_rank(m2)
    if r1 != r2:
        return False
    joint = m1.augment([[row[c] for row in m2.entries] for c in range(m2.ncols)])
    return generic_rank(joint) == r1
