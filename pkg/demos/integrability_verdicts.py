#!/usr/bin/env python3
# Graphs of two-forms and bivectors: the engine decides integrability exactly.

from diracgeom.cartan import Bivector, KForm, VField, wedge
from diracgeom.courant import check_dirac, foliation_frame, graph_bivector, graph_two_form
from diracgeom.symalg import Expr, Patch

R3 = Patch("R3", ("x", "y", "z"))
x = Expr.coord(R3, "x")
z = Expr.coord(R3, "z")

dx_dy = wedge(KForm.d_coord(R3, "x"), KForm.d_coord(R3, "y"))

closed = dx_dy.scale(1 + x)
print("omega = (1 + x) dx^dy")
print(" ", check_dirac(graph_two_form(closed)))

not_closed = dx_dy.scale(z)
print("omega = z dx^dy")
print(" ", check_dirac(graph_two_form(not_closed)))

# the rotational bivector satisfies Jacobi, the cyclic one does not
x1, x2, x3 = (Expr.coord(R3, c) for c in R3.coords)
so3 = Bivector(R3, {(0, 1): x3, (1, 2): x1, (0, 2): -x2})
print("pi = x3 d1^d2 + x1 d2^d3 - x2 d1^d3")
print(" ", check_dirac(graph_bivector(so3)))

cyclic = Bivector(R3, {(0, 1): x1, (1, 2): x2, (0, 2): -x3})
print("pi = x1 d1^d2 + x2 d2^d3 - x3 d1^d3")
print(" ", check_dirac(graph_bivector(cyclic)))

# distributions count too: spans integrate exactly when involutive
flat = foliation_frame((VField.coordinate(R3, "x"), VField.coordinate(R3, "y")))
print("span(Dx, Dy)")
print(" ", check_dirac(flat))

twisted = foliation_frame(
    (
        VField.coordinate(R3, "x"),
        VField.coordinate(R3, "y").scale(x) + VField.coordinate(R3, "z"),
    )
)
print("span(Dx, x Dy + Dz)")
print(" ", check_dirac(twisted))
