"""Exception hierarchy shared by every kontact module."""


class KontactError(Exception):
    """Base class. ``code`` is the short machine-readable kind."""

    code = "KontactError"

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.context = context

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


def _kind(name: str, doc: str, *extra: type) -> type:
    return type(name, (KontactError, *extra), {"code": name, "__doc__": doc})


class ExprSyntaxError(KontactError, ValueError):
    """Malformed expression text. ``position`` is a 0-based column."""

    code = "SyntaxError"

    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at column {position}: {text!r}", text=text, position=position)
        self.position = position
        self.text = text


UnknownSymbol = _kind("UnknownSymbol", "Identifier is neither a chart variable nor a declared constant.")
ZeroDenominator = _kind("ZeroDenominator", "Division by an expression that is identically zero.", ZeroDivisionError)
PoleAtPoint = _kind("PoleAtPoint", "Denominator vanishes at the evaluation point.")
UnboundSymbol = _kind("UnboundSymbol", "Evaluation point misses a value for a free symbol.")
ChartMismatch = _kind("ChartMismatch", "Objects live on different charts.")
DegreeZero = _kind("DegreeZero", "Operation undefined on 0-forms.")
LengthMismatch = _kind("LengthMismatch", "Vector-valued objects have different numbers of components.")
NotKContact = _kind("NotKContact", "The form fails one of the k-contact rank conditions.")
SingularSolve = _kind("SingularSolve", "Linear system has no unique solution.")
RankComputationOverflow = _kind("RankComputationOverflow", "Elimination exceeded its growth budget.")
NotHamiltonianInput = _kind("NotHamiltonianInput", "A field is not Hamiltonian for the given form.")
NoAnnihilator = _kind("NoAnnihilator", "Distribution has no annihilating forms.")
SymmetryFailure = _kind("SymmetryFailure", "A proposed symmetry does not commute or preserve the distribution.")
SpanFailure = _kind("SpanFailure", "Distribution and symmetries do not span the tangent space.")
NotMaxNonintegrable = _kind("NotMaxNonintegrable", "Curvature pairing of the distribution is degenerate.")
NotProjectable = _kind("NotProjectable", "Function is not invariant under the Reeb fields.")
NotClosed = _kind("NotClosed", "Bracket closure did not terminate within its budget.")
DegenerateFrame = _kind("DegenerateFrame", "Fields are not a frame of the tangent space.")
LambdaNotConstant = _kind("LambdaNotConstant", "Reeb derivatives do not close with constant coefficients.")
DependentProjections = _kind("DependentProjections", "Projected functions are linearly dependent.")
SampleNotOnZeroSet = _kind("SampleNotOnZeroSet", "Sample point is not on the zero set of the projected momenta.")
PoleEncountered = _kind("PoleEncountered", "Numerical evaluation hit a pole.")
DegenerateSeeds = _kind("DegenerateSeeds", "Particular solutions are not pairwise distinct.")
UnknownExample = _kind("UnknownExample", "No registered corpus example with this name.")
InputError = _kind("InputError", "Input document is malformed.")
