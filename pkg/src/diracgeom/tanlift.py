"""Vertical and tangent lifts, the canonical maps J, Theta, R, and lifted frames.

Coordinate naming is deterministic so that iterated constructions agree by
equality of patches:

  tangent_patch    x -> x, x_dot        (second lift uses del_x, del_x_dot)
  cotangent_patch  x -> x, p_x

The lift formulas below are the closed coordinate forms pinned down by the
defining identities

  X^v(f^v) = 0        X^v(f^T) = (Xf)^v      X^T(f^v) = (Xf)^v
  X^T(f^T) = (Xf)^T   a^v(X^T) = (a(X))^v    a^T(X^T) = (a(X))^T

which the test suite re-verifies on random inputs.
"""

from dataclasses import dataclass

from .cartan import KForm, PolyMap, VField, wedge
from .courant import Frame, GSec, check_lagrangian, _mu_entries
from .errors import NotLagrangian, WrongShape
from .report import CheckItem, Report
from .symalg import Expr, Patch

VELOCITY_SUFFIX = "_dot"
SECOND_ORDER_PREFIX = "del_"
MOMENTUM_PREFIX = "p_"


def is_tangent_total(patch: Patch) -> bool:
    """True when the second half of the coordinates names velocities of the first."""
    n, odd = divmod(patch.dim, 2)
    if odd or n == 0:
        return False
    head, tail = patch.coords[:n], patch.coords[n:]
    if tail == tuple(c + VELOCITY_SUFFIX for c in head):
        return True
    return tail == tuple(SECOND_ORDER_PREFIX + c for c in head)


def is_cotangent_total(patch: Patch) -> bool:
    n, odd = divmod(patch.dim, 2)
    if odd or n == 0:
        return False
    return patch.coords[n:] == tuple(MOMENTUM_PREFIX + c for c in patch.coords[:n])


def _extend(base: Patch, new_names: tuple[str, ...], name: str) -> Patch:
    clash = set(new_names) & set(base.coords)
    if clash or len(set(new_names)) != len(new_names):
        raise WrongShape(f"lifted coordinate names collide: {sorted(clash) or new_names}")
    return Patch(name, base.coords + new_names)


@dataclass(frozen=True)
class TangentPatch:
    """A base patch together with its doubled total patch (positions, velocities)."""

    base: Patch
    total: Patch

    @property
    def velocity_names(self) -> tuple[str, ...]:
        return self.total.coords[self.base.dim:]


@dataclass(frozen=True)
class CotangentPatch:
    """A base patch together with its doubled total patch (positions, momenta)."""

    base: Patch
    total: Patch

    @property
    def momentum_names(self) -> tuple[str, ...]:
        return self.total.coords[self.base.dim:]


def tangent_patch(base: Patch) -> TangentPatch:
    if is_tangent_total(base):
        vel = tuple(SECOND_ORDER_PREFIX + c for c in base.coords)
    else:
        vel = tuple(c + VELOCITY_SUFFIX for c in base.coords)
    return TangentPatch(base, _extend(base, vel, "T" + base.name))


def cotangent_patch(base: Patch) -> CotangentPatch:
    mom = tuple(MOMENTUM_PREFIX + c for c in base.coords)
    return CotangentPatch(base, _extend(base, mom, "Tstar" + base.name))


def _check_kind(kind: str) -> None:
    if kind not in ("vertical", "tangent"):
        raise ValueError(f"kind must be 'vertical' or 'tangent', got {kind!r}")


def lift_function(f: Expr, kind: str) -> Expr:
    """f^v = f reinterpreted; f^T = sum of velocity * df/dx."""
    _check_kind(kind)
    tp = tangent_patch(f.patch)
    if kind == "vertical":
        return f.inject(tp.total)
    acc = Expr.zero(tp.total)
    for c, v in zip(f.patch.coords, tp.velocity_names):
        acc = acc + Expr.coord(tp.total, v) * f.differentiate(c).inject(tp.total)
    return acc


def lift_vector_field(x: VField, kind: str) -> VField:
    """X^v feeds the components into the velocity slots; X^T adds their derivative flow."""
    _check_kind(kind)
    tp = tangent_patch(x.patch)
    n = x.patch.dim
    zero = Expr.zero(tp.total)
    if kind == "vertical":
        comps = [zero] * n + [c.inject(tp.total) for c in x.components]
        return VField(tp.total, tuple(comps))
    comps = [c.inject(tp.total) for c in x.components]
    for i in range(n):
        comps.append(lift_function(x.components[i], "tangent"))
    return VField(tp.total, tuple(comps))


def lift_one_form(a: KForm, kind: str) -> KForm:
    """a^v keeps the dx components; a^T pairs lifted coefficients with dx and dx_dot."""
    _check_kind(kind)
    if a.degree != 1:
        raise ValueError("only one-forms lift here")
    tp = tangent_patch(a.patch)
    n = a.patch.dim
    zero = Expr.zero(tp.total)
    comps = list(a.components())
    if kind == "vertical":
        out = [c.inject(tp.total) for c in comps] + [zero] * n
    else:
        out = [lift_function(c, "tangent") for c in comps]
        out += [c.inject(tp.total) for c in comps]
    return KForm.one_form(tp.total, out)


def lift_section(s: GSec, kind: str) -> GSec:
    return GSec(lift_vector_field(s.vf, kind), lift_one_form(s.of, kind))


def tangent_map(f: PolyMap) -> PolyMap:
    """Tangent functor: (x, v) -> (f(x), Df(x) v)."""
    src = tangent_patch(f.source)
    tgt = tangent_patch(f.target)
    comps = [c.inject(src.total) for c in f.components]
    jac = f.jacobian()
    for row in jac.entries:
        acc = Expr.zero(src.total)
        for entry, v in zip(row, src.velocity_names):
            acc = acc + entry.inject(src.total) * Expr.coord(src.total, v)
        comps.append(acc)
    return PolyMap(src.total, tgt.total, tuple(comps))


def canonical_involution(tt: TangentPatch) -> PolyMap:
    """The block swap (x, x_dot, del_x, del_x_dot) -> (x, del_x, x_dot, del_x_dot)."""
    if not is_tangent_total(tt.base):
        raise WrongShape("canonical involution needs the tangent of a tangent total patch")
    n = tt.base.dim // 2
    c = tt.total.coords
    order = c[:n] + c[2 * n : 3 * n] + c[n : 2 * n] + c[3 * n :]
    comps = tuple(Expr.coord(tt.total, name) for name in order)
    return PolyMap(tt.total, tt.total, comps)


def tulczyjew_map(tt: TangentPatch) -> PolyMap:
    """The permutation (x, p, x_dot, p_dot) -> (x, x_dot, p_dot, p) into T*TM.

    ``tt`` must be the tangent patch of a cotangent total patch; the target is
    the cotangent patch of the tangent total patch of the shared base, which
    carries the same coordinate names in a different order.
    """
    if not is_cotangent_total(tt.base):
        raise WrongShape("Tulczyjew map needs the tangent of a cotangent total patch")
    n = tt.base.dim // 2
    c = tt.total.coords
    x, p, xd, pd = c[:n], c[n : 2 * n], c[2 * n : 3 * n], c[3 * n :]
    base_name = tt.base.name
    if base_name.startswith("Tstar"):
        base_name = base_name[len("Tstar"):]
    target = Patch("TstarT" + base_name, x + xd + p + pd)
    order = x + xd + pd + p
    comps = tuple(Expr.coord(tt.total, name) for name in order)
    return PolyMap(tt.total, target, comps)


def legendre_map(base: Patch, rank: int) -> PolyMap:
    """R: T*A* -> T*A, (x, xi, p, u) -> (x, u, -p, xi), for a rank-r bundle pair."""
    if rank < 0:
        raise WrongShape("rank must be nonnegative")
    fiber = tuple(f"u_{a + 1}" for a in range(rank))
    dual_fiber = tuple(f"xi_{a + 1}" for a in range(rank))
    a_total = _extend(base, fiber, base.name + "_A")
    astar_total = _extend(base, dual_fiber, base.name + "_Astar")
    src = cotangent_patch(astar_total).total
    tgt = cotangent_patch(a_total).total
    n = base.dim
    comps = []
    for c in base.coords:
        comps.append(Expr.coord(src, c))
    for name in dual_fiber:
        comps.append(Expr.coord(src, MOMENTUM_PREFIX + name))
    for c in base.coords:
        comps.append(-Expr.coord(src, MOMENTUM_PREFIX + c))
    for name in dual_fiber:
        comps.append(Expr.coord(src, name))
    assert len(comps) == tgt.dim and 2 * (n + rank) == tgt.dim
    return PolyMap(src, tgt, tuple(comps))


def canonical_symplectic(ct: CotangentPatch) -> KForm:
    """omega = sum of dq^i wedge dp_i on a cotangent total patch."""
    acc = KForm.zero(ct.total, 2)
    for q, p in zip(ct.base.coords, ct.momentum_names):
        acc = acc + wedge(KForm.d_coord(ct.total, q), KForm.d_coord(ct.total, p))
    return acc


def tangent_lift_dirac(l: Frame) -> Frame:
    """Frame of tangent lifts followed by vertical lifts of the sections."""
    tp = tangent_patch(l.patch)
    secs = [lift_section(s, "tangent") for s in l.secs]
    secs += [lift_section(s, "vertical") for s in l.secs]
    return Frame(tp.total, tuple(secs))


def check_tangent_mu_identity(l: Frame) -> Report:
    """Compare the Courant tensor of the lifted frame against the lifted tensor.

    Generators are indexed with the tangent lifts first, so entry (i, j, k)
    with all indices below n is the all-tangent block.  Verified blocks:
    all-tangent equals the tangent lift of the base tensor, entries with two
    or more vertical generators vanish, and one-vertical entries equal the
    vertical lift of the base entry at the same positions.
    """
    lag = check_lagrangian(l)
    if not lag.passed:
        raise NotLagrangian(lag.witness)
    n = len(l.secs)
    mu = _mu_entries(l)
    mu_lift = _mu_entries(tangent_lift_dirac(l))

    def label(i, j, k):
        parts = [f"{m + 1}^v" if m >= n else f"{m + 1}^T" for m in (i, j, k)]
        return "mu_T[" + ",".join(parts) + "]"

    items = []
    witness = None
    for (i, j, k), v in sorted(mu.items()):
        want = lift_function(v, "tangent")
        if mu_lift[(i, j, k)] != want:
            witness = f"{label(i, j, k)} = {mu_lift[(i, j, k)]}, expected {want}"
            break
    items.append(CheckItem("all-tangent block is the lifted tensor", witness is None, witness))

    witness = None
    for (i, j, k), v in sorted(mu_lift.items()):
        if sum(1 for m in (i, j, k) if m >= n) >= 2 and not v.is_zero():
            witness = f"{label(i, j, k)} = {v}"
            break
    items.append(CheckItem("multi-vertical entries vanish", witness is None, witness))

    witness = None
    for (i, j, k), v in sorted(mu_lift.items()):
        verts = [m >= n for m in (i, j, k)]
        if sum(verts) != 1:
            continue
        base = tuple(m - n if m >= n else m for m in (i, j, k))
        want = lift_function(mu[base], "vertical")
        if v != want:
            witness = f"{label(i, j, k)} = {v}, expected {want}"
            break
    items.append(CheckItem("one-vertical entries are vertical lifts", witness is None, witness))
    return Report(tuple(items))
