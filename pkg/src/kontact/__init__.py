"""Exact symbolic toolkit for k-contact Lie systems.

Rational-function expressions on a coordinate chart, exterior calculus on
vector fields and forms, k-contact structures with their Reeb fields and
Hamiltonian k-functions, Lie-algebra closure of vector fields, and numeric
RK4 checks of the resulting constants of motion.
"""

from .errors import KontactError
from .expr import Chart, Expr, parse
from .exterior import (
    DiffForm,
    KFunction,
    VectorField,
    VectorForm,
    apply_field,
    ext_deriv,
    interior,
    lie_bracket,
    wedge,
)
from .kcontact import (
    build_kcontact,
    hamiltonian_check,
    hamiltonian_function,
    kcontact_structure,
    verify_kcontact,
)
from .liesys import bracket_closure, structure_constants

__version__ = "0.1.0"

__all__ = [
    "KontactError",
    "Chart",
    "Expr",
    "parse",
    "VectorField",
    "DiffForm",
    "KFunction",
    "VectorForm",
    "apply_field",
    "ext_deriv",
    "interior",
    "lie_bracket",
    "wedge",
    "verify_kcontact",
    "kcontact_structure",
    "hamiltonian_function",
    "hamiltonian_check",
    "build_kcontact",
    "bracket_closure",
    "structure_constants",
]
