"""Vector fields, differential forms of degree <= 3, bivectors, polynomial maps.

Conventions fixed once and used everywhere:

* ``(X ^ Y)(a, b) = a(X) b(Y) - a(Y) b(X)``, so a bivector ``p`` stores the
  coefficients ``p[i, j] = p(dx^i, dx^j)`` for ``i < j``.
* ``sharp_bivector(p, a)^i = sum_j p[j, i] a_j``, i.e. ``p^#(a) = p(a, .)``.
  For ``p = dx ^ dy`` this sends ``dx`` to ``d_y`` and ``dy`` to ``-d_x``.
* Forms store coefficients on strictly increasing index tuples; evaluation is
  the determinant convention, ``(dx ^ dy)(d_x, d_y) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import DegreeTooHigh, DegreeZero, NotInverse, PatchMismatch
from .symalg import Expr, ExprMatrix, Patch

MAX_DEGREE = 3


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 on repeated entries."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class VField:
    """Vector field: one component per coordinate."""

    patch: Patch
    components: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.components) != self.patch.dim:
            raise ValueError("need one component per coordinate")
        for c in self.components:
            if c.patch != self.patch:
                raise PatchMismatch("component on a different patch")

    @staticmethod
    def zero(patch: Patch) -> "VField":
        return VField(patch, tuple(Expr.zero(patch) for _ in patch.coords))

    @staticmethod
    def coordinate(patch: Patch, name: str) -> "VField":
        i = patch.index(name)
        comps = [Expr.zero(patch)] * patch.dim
        comps[i] = Expr.one(patch)
        return VField(patch, tuple(comps))

    def apply(self, f: Expr) -> Expr:
        """Directional derivative X(f)."""
        acc = Expr.zero(self.patch)
        for comp, coord in zip(self.components, self.patch.coords):
            acc = acc + comp * f.differentiate(coord)
        return acc

    def __add__(self, other: "VField") -> "VField":
        if other.patch != self.patch:
            raise PatchMismatch("vector fields on different patches")
        return VField(self.patch, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VField") -> "VField":
        return self + (-other)

    def __neg__(self) -> "VField":
        return VField(self.patch, tuple(-c for c in self.components))

    def scale(self, f: Expr) -> "VField":
        return VField(self.patch, tuple(f * c for c in self.components))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __str__(self):
        parts = []
        for comp, coord in zip(self.components, self.patch.coords):
            if comp.is_zero():
                continue
            cs = str(comp)
            if cs == "1":
                parts.append(f"d_{coord}")
            elif "+" in cs or (cs.count("-") and not cs.startswith("-")) or " " in cs:
                parts.append(f"({cs})*d_{coord}")
            else:
                parts.append(f"{cs}*d_{coord}")
        return " + ".join(parts) if parts else "0"


class KForm:
    """Differential form of degree 0..3 with polynomial coefficients."""

    __slots__ = ("patch", "degree", "coeffs")

    def __init__(self, patch: Patch, degree: int, coeffs: Mapping[tuple[int, ...], Expr]):
        if degree < 0 or degree > MAX_DEGREE:
            raise DegreeTooHigh(f"degree {degree} outside 0..{MAX_DEGREE}")
        clean: dict[tuple[int, ...], Expr] = {}
        for idx, e in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"index {idx} not strictly increasing of length {degree}")
            if any(i < 0 or i >= patch.dim for i in idx):
                raise ValueError(f"index {idx} out of range")
            if e.patch != patch:
                raise PatchMismatch("coefficient on a different patch")
            if not e.is_zero():
                clean[idx] = e
        object.__setattr__(self, "patch", patch)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError("KForm is immutable")

    @staticmethod
    def zero(patch: Patch, degree: int) -> "KForm":
        return KForm(patch, degree, {})

    @staticmethod
    def function(f: Expr) -> "KForm":
        return KForm(f.patch, 0, {(): f})

    @staticmethod
    def one_form(patch: Patch, components: Sequence[Expr]) -> "KForm":
        return KForm(patch, 1, {(i,): c for i, c in enumerate(components)})

    @staticmethod
    def d_coord(patch: Patch, name: str) -> "KForm":
        return KForm(patch, 1, {(patch.index(name),): Expr.one(patch)})

    def coeff(self, idx: tuple[int, ...]) -> Expr:
        return self.coeffs.get(tuple(idx), Expr.zero(self.patch))

    def signed_coeff(self, idx: Sequence[int]) -> Expr:
        """Coefficient with arbitrary index order (antisymmetric extension)."""
        sign = _perm_sign(idx)
        if sign == 0:
            return Expr.zero(self.patch)
        value = self.coeff(tuple(sorted(idx)))
        return value if sign == 1 else -value

    def components(self) -> tuple[Expr, ...]:
        """Degree-1 forms as a coefficient vector."""
        if self.degree != 1:
            raise ValueError("components() needs a one-form")
        return tuple(self.coeff((i,)) for i in range(self.patch.dim))

    def evaluate(self, *fields: VField) -> Expr:
        """Multilinear antisymmetric evaluation on vector fields."""
        if len(fields) != self.degree:
            raise ValueError(f"need {self.degree} vector fields")
        for v in fields:
            if v.patch != self.patch:
                raise PatchMismatch("vector field on a different patch")
        if self.degree == 0:
            return self.coeff(())
        acc = Expr.zero(self.patch)
        for idx, c in self.coeffs.items():
            det = _det([[fields[col].components[row] for col in range(self.degree)] for row in idx])
            acc = acc + c * det
        return acc

    def __add__(self, other: "KForm") -> "KForm":
        if other.patch != self.patch or other.degree != self.degree:
            raise PatchMismatch("can only add forms of one degree on one patch")
        keys = set(self.coeffs) | set(other.coeffs)
        return KForm(self.patch, self.degree, {k: self.coeff(k) + other.coeff(k) for k in keys})

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.patch, self.degree, {k: -v for k, v in self.coeffs.items()})

    def scale(self, f: Expr) -> "KForm":
        return KForm(self.patch, self.degree, {k: f * v for k, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return (
            self.patch == other.patch
            and self.degree == other.degree
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.patch, self.degree, frozenset(self.coeffs.items())))

    def __str__(self):
        if self.degree == 0:
            return str(self.coeff(()))
        if not self.coeffs:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            mono = "^".join(f"d{self.patch.coords[i]}" for i in idx)
            cs = str(c)
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            elif " " in cs:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"KForm({self})"


def _det(rows: list[list[Expr]]) -> Expr:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        return (
            rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0])
        )
    raise DegreeTooHigh("determinants only up to 3x3 are needed")


class Bivector:
    """Antisymmetric (2,0)-tensor: entries p[i, j] = p(dx^i, dx^j) for i < j."""

    __slots__ = ("patch", "entries")

    def __init__(self, patch: Patch, entries: Mapping[tuple[int, int], Expr]):
        clean: dict[tuple[int, int], Expr] = {}
        for (i, j), e in entries.items():
            if not (0 <= i < j < patch.dim):
                raise ValueError(f"entry index ({i}, {j}) not increasing in range")
            if e.patch != patch:
                raise PatchMismatch("entry on a different patch")
            if not e.is_zero():
                clean[(i, j)] = e
        object.__setattr__(self, "patch", patch)
        object.__setattr__(self, "entries", clean)

    def __setattr__(self, *a):
        raise AttributeError("Bivector is immutable")

    @staticmethod
    def zero(patch: Patch) -> "Bivector":
        return Bivector(patch, {})

    def entry(self, i: int, j: int) -> Expr:
        """Signed entry p(dx^i, dx^j) for any index pair."""
        if i == j:
            return Expr.zero(self.patch)
        if i < j:
            return self.entries.get((i, j), Expr.zero(self.patch))
        return -self.entries.get((j, i), Expr.zero(self.patch))

    def __add__(self, other: "Bivector") -> "Bivector":
        if other.patch != self.patch:
            raise PatchMismatch("bivectors on different patches")
        keys = set(self.entries) | set(other.entries)
        return Bivector(self.patch, {k: self.entries.get(k, Expr.zero(self.patch)) + other.entries.get(k, Expr.zero(self.patch)) for k in keys})

    def __neg__(self) -> "Bivector":
        return Bivector(self.patch, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "Bivector") -> "Bivector":
        return self + (-other)

    def scale(self, f: Expr) -> "Bivector":
        return Bivector(self.patch, {k: f * v for k, v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, Bivector):
            return NotImplemented
        return self.patch == other.patch and self.entries == other.entries

    def __hash__(self):
        return hash((self.patch, frozenset(self.entries.items())))

    def __str__(self):
        if not self.entries:
            return "0"
        parts = []
        for (i, j) in sorted(self.entries):
            c = self.entries[(i, j)]
            mono = f"d_{self.patch.coords[i]}^d_{self.patch.coords[j]}"
            cs = str(c)
            if cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append(f"-{mono}")
            elif " " in cs:
                parts.append(f"({cs})*{mono}")
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"Bivector({self})"


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map between patches: one component per target coordinate."""

    source: Patch
    target: Patch
    components: tuple[Expr, ...]

    def __post_init__(self):
        if len(self.components) != self.target.dim:
            raise ValueError("need one component per target coordinate")
        for c in self.components:
            if c.patch != self.source:
                raise PatchMismatch("component on a patch other than the source")

    @staticmethod
    def identity(patch: Patch) -> "PolyMap":
        return PolyMap(patch, patch, tuple(Expr.coord(patch, c) for c in patch.coords))

    def apply(self, point: Sequence[Expr], ppatch: Patch | None = None) -> list[Expr]:
        """Value on a symbolic point (exprs over any parameter patch).

        ``ppatch`` is only needed when the source is zero-dimensional, where
        the empty point cannot carry the parameter patch itself.
        """
        if len(point) != self.source.dim:
            raise ValueError("point has wrong length")
        if point:
            ppatch = point[0].patch
        elif ppatch is None:
            raise ValueError("zero-dimensional source needs an explicit parameter patch")
        values = list(point)
        return [c.substitute(values, ppatch) for c in self.components]

    def compose(self, other: "PolyMap") -> "PolyMap":
        """self o other."""
        if other.target != self.source:
            raise PatchMismatch("maps do not chain")
        comps = tuple(c.substitute(list(other.components), other.source) for c in self.components)
        return PolyMap(other.source, self.target, comps)

    def pullback_scalar(self, f: Expr) -> Expr:
        if f.patch != self.target:
            raise PatchMismatch("scalar not on the target patch")
        return f.substitute(list(self.components), self.source)

    def jacobian(self) -> ExprMatrix:
        """Rows = target components, columns = source coordinates."""
        rows = [
            [c.differentiate(x) for x in self.source.coords] for c in self.components
        ]
        return ExprMatrix.from_rows(self.source, rows)

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            c == Expr.coord(self.source, x) for c, x in zip(self.components, self.source.coords)
        )

    def __str__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"{self.source.name} -> {self.target.name}: ({comps})"


# -- operations -----------------------------------------------------------------


def lie_bracket(x: VField, y: VField) -> VField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    if x.patch != y.patch:
        raise PatchMismatch("vector fields on different patches")
    comps = tuple(x.apply(yc) - y.apply(xc) for xc, yc in zip(x.components, y.components))
    return VField(x.patch, comps)


def exterior_derivative(w: KForm) -> KForm:
    """d on forms of degree <= 2."""
    if w.degree > 2:
        raise DegreeTooHigh("exterior derivative supported for degree <= 2")
    patch = w.patch
    out: dict[tuple[int, ...], Expr] = {}
    for idx in combinations(range(patch.dim), w.degree + 1):
        acc = Expr.zero(patch)
        for m, i in enumerate(idx):
            rest = idx[:m] + idx[m + 1:]
            c = w.coeff(rest)
            if not c.is_zero():
                term = c.differentiate(patch.coords[i])
                acc = acc + (term if m % 2 == 0 else -term)
        if not acc.is_zero():
            out[idx] = acc
    return KForm(patch, w.degree + 1, out)


def interior_product(x: VField, w: KForm) -> KForm:
    """i_X w; requires degree >= 1."""
    if w.degree == 0:
        raise DegreeZero("cannot contract a function")
    if x.patch != w.patch:
        raise PatchMismatch("operands on different patches")
    patch = w.patch
    out: dict[tuple[int, ...], Expr] = {}
    for idx in combinations(range(patch.dim), w.degree - 1):
        acc = Expr.zero(patch)
        for i in range(patch.dim):
            if x.components[i].is_zero():
                continue
            c = w.signed_coeff((i,) + idx)
            if not c.is_zero():
                acc = acc + x.components[i] * c
        if not acc.is_zero():
            out[idx] = acc
    return KForm(patch, w.degree - 1, out)


def lie_derivative(x: VField, w: KForm) -> KForm:
    """Cartan magic formula L_X = i_X d + d i_X (degree <= 2)."""
    if w.degree > 2:
        raise DegreeTooHigh("Lie derivative supported for degree <= 2")
    if w.degree == 0:
        return KForm.function(x.apply(w.coeff(())))
    return interior_product(x, exterior_derivative(w)) + exterior_derivative(
        interior_product(x, w)
    )


def wedge(a: KForm, b: KForm) -> KForm:
    """Wedge product (determinant convention), result degree <= 3."""
    if a.patch != b.patch:
        raise PatchMismatch("forms on different patches")
    deg = a.degree + b.degree
    if deg > MAX_DEGREE:
        raise DegreeTooHigh(f"wedge degree {deg} exceeds {MAX_DEGREE}")
    patch = a.patch
    out: dict[tuple[int, ...], Expr] = {}
    for ia, ca in a.coeffs.items():
        for ib, cb in b.coeffs.items():
            sign = _perm_sign(ia + ib)
            if sign == 0:
                continue
            key = tuple(sorted(ia + ib))
            add = ca * cb if sign == 1 else -(ca * cb)
            cur = out.get(key, Expr.zero(patch))
            out[key] = cur + add
    return KForm(patch, deg, out)


def sharp_bivector(p: Bivector, a: KForm) -> VField:
    """p^#(a) = p(a, .); component i is sum_j p[j, i] a_j."""
    if a.degree != 1:
        raise ValueError("sharp needs a one-form")
    if a.patch != p.patch:
        raise PatchMismatch("operands on different patches")
    patch = p.patch
    comps = []
    for i in range(patch.dim):
        acc = Expr.zero(patch)
        for j in range(patch.dim):
            aj = a.coeff((j,))
            if not aj.is_zero():
                acc = acc + p.entry(j, i) * aj
        comps.append(acc)
    return VField(patch, tuple(comps))


def poisson_bracket(p: Bivector, f: Expr, g: Expr) -> Expr:
    """{f, g} = p(df, dg)."""
    patch = p.patch
    acc = Expr.zero(patch)
    for (i, j), c in p.entries.items():
        xi, xj = patch.coords[i], patch.coords[j]
        acc = acc + c * (f.differentiate(xi) * g.differentiate(xj) - f.differentiate(xj) * g.differentiate(xi))
    return acc


def schouten_jacobiator(p: Bivector) -> dict[tuple[int, int, int], Expr]:
    """Jacobiator Jac(i,j,k) = sum_cyc {x^i, {x^j, x^k}} on increasing triples.

    Vanishing of every entry is the Poisson condition.
    """
    patch = p.patch
    out: dict[tuple[int, int, int], Expr] = {}
    for (i, j, k) in combinations(range(patch.dim), 3):
        acc = Expr.zero(patch)
        for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
            # {x^a, p(dx^b, dx^c)} = sum_m p[a, m] d_m p[b, c]
            pbc = p.entry(b, c)
            for m in range(patch.dim):
                pam = p.entry(a, m)
                if not pam.is_zero():
                    acc = acc + pam * pbc.differentiate(patch.coords[m])
        out[(i, j, k)] = acc
    return out


def pullback_form(f: PolyMap, w: KForm) -> KForm:
    """f^* w for w on the target of f."""
    if w.patch != f.target:
        raise PatchMismatch("form not on the target patch")
    src = f.source
    jac = f.jacobian()
    if w.degree == 0:
        return KForm.function(f.pullback_scalar(w.coeff(())))
    out: dict[tuple[int, ...], Expr] = {}
    for idx_src in combinations(range(src.dim), w.degree):
        acc = Expr.zero(src)
        for idx_tgt, c in w.coeffs.items():
            minor = _det([[jac.entries[r][s] for s in idx_src] for r in idx_tgt])
            if not minor.is_zero():
                acc = acc + f.pullback_scalar(c) * minor
        if not acc.is_zero():
            out[idx_src] = acc
    return KForm(src, w.degree, out)


def pushforward_bivector(f: PolyMap, f_inv: PolyMap, p: Bivector) -> Bivector:
    """f_* p expressed on the target, using the supplied two-sided inverse."""
    if p.patch != f.source:
        raise PatchMismatch("bivector not on the source patch")
    if f_inv.source != f.target or f_inv.target != f.source:
        raise NotInverse("inverse goes between the wrong patches")
    if not f.compose(f_inv).is_identity() or not f_inv.compose(f).is_identity():
        raise NotInverse("supplied map is not a two-sided inverse")
    jac = f.jacobian()
    tgt = f.target
    out: dict[tuple[int, int], Expr] = {}
    for (k, l) in combinations(range(tgt.dim), 2):
        acc = Expr.zero(f.source)
        for (i, j), c in p.entries.items():
            acc = acc + c * (
                jac.entries[k][i] * jac.entries[l][j] - jac.entries[k][j] * jac.entries[l][i]
            )
        if not acc.is_zero():
            out[(k, l)] = f_inv.pullback_scalar(acc)
    return Bivector(tgt, out)
