"""Walk through the five-dimensional nilpotent control system.

Run with ``python demos/control_system.py``. Starts from the two control
fields, grows the Lie algebra they generate, rebuilds the two-contact form
from the commuting symmetries, and then looks at the Hamiltonian side.
"""
from kontact.corpus import load_example
from kontact.kcontact import (
    bracket_table,
    build_kcontact,
    hamiltonian_function,
    kcontact_structure,
    verify_kcontact,
)
from kontact.liesys import bracket_closure, companion_system, projectability_check


def show_table(title, table, labels, bracket="[{}, {}]"):
    print(title)
    for (a, b), row in sorted(table.items()):
        if row:
            combo = " + ".join(labels[g] if c == 1 else f"{c}*{labels[g]}" for g, c in sorted(row.items()))
            print("  " + bracket.format(labels[a], labels[b]), "=", combo)


doc = load_example("control")
X1, X2 = doc.field_list(["X1", "X2"])
print("X1 =", X1)
print("X2 =", X2)

closure = bracket_closure([X1, X2], ["X1", "X2"])
print(f"\nthe two controls generate a {closure.dim}-dimensional algebra")
show_table("structure constants:", closure.table(), closure.labels)

# symmetries commute with every X, so their duals give an invariant form
eta = build_kcontact(doc.field_list(["Y1", "Y2", "Y3"]), doc.field_list(["X4", "X5"]))
rep = verify_kcontact(eta)
print(f"\nbuilt eta: k={rep.k}, ok={rep.ok}")
for a, w in enumerate(eta.components, start=1):
    print(f"  eta^{a} = {w}")

s = kcontact_structure(eta)
for a, R in enumerate(s.reeb, start=1):
    print(f"  R{a} = {R}")

X = doc.field_list([f"X{i}" for i in range(1, 6)])
hams = [hamiltonian_function(Xi, s) for Xi in X]
print("\nHamiltonian k-functions (components along e1, e2):")
for i, h in enumerate(hams, start=1):
    print(f"  h{i} = ({', '.join(str(c) for c in h)})")

show_table("\nk-contact brackets:", bracket_table(hams, X, s), [f"h{i}" for i in range(1, 6)], "{{{}, {}}}")

print("\nprojectable:", projectability_check(X, eta).ok)
for theta in ([1, 0], [0, 1]):
    comp = companion_system(hams, X, s, theta)
    print(f"companion system along {theta}: M is nilpotent of order {comp.nilpotency}")
