"""Hamiltonian k-functions of the complex Schwarz system, against the printed table.

Run with ``python demos/schwarz_table.py`` (about half a minute). Rows h2..h5
reproduce the printed values exactly. h1 and h6 are recomputed from the form
and compared, and the differences are reported rather than asserted.
"""
from kontact.corpus import run_example

report = run_example("schwarz")
print(f"{report.name}: {report.counts}")

for e in report.entries:
    if e.check != "hamiltonians":
        continue
    mark = {"match": "  ", "divergence": "~ ", "failure": "! "}[e.status]
    detail = e.detail if e.status != "match" else ""
    print(f"{mark}{e.id:24s} {e.status:10s} {detail[:110]}")

print("\nother divergences from the printed values:")
for e in report.by_status("divergence"):
    if e.check != "hamiltonians":
        print(f"  {e.id}: {e.detail[:140]}")
