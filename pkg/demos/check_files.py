#!/usr/bin/env python3
# The check-file front end: declare objects, run verdicts, read one report.

import tempfile

from diracgeom.cli import emit_report, run_checkfile

TEXT = """\
# a closed and a non-closed graph side by side
let M = patch(x, y, z)
let good = graph_two_form((1 + x)*dx^dy)
let bad = graph_two_form(z*dx^dy)

check dirac good
check dirac bad
check lagrangian bad

# groupoid constructions work the same way
let G = heisenberg3()
check groupoid_axioms G
check lie_algebroid lie_algebroid_of(G)
"""

with tempfile.NamedTemporaryFile("w", suffix=".check", delete=False) as fh:
    fh.write(TEXT)
    path = fh.name

report = run_checkfile(path)
print(emit_report(report, "text").decode("utf-8"))
print("exit code would be", report.exit_code)
