"""Exception hierarchy shared across the package.

Every error raised by library code derives from CompidentError so the CLI
can translate any failure into a machine-readable JSON document.
"""


class CompidentError(Exception):
    """Base class for all library errors."""


# --- model ---------------------------------------------------------------

class MalformedSpec(CompidentError):
    """Model document does not conform to the JSON schema."""


class InvalidModel(CompidentError):
    """Model document is well-formed but semantically invalid."""


# --- polynomial ----------------------------------------------------------

class MissingAssignment(CompidentError):
    """Evaluation point does not assign every variable of the polynomial."""


class NegativeIndexBelowConvention(CompidentError):
    """Elementary symmetric index below -1 (only e_{-1}=0 is defined)."""


class InexactDivision(CompidentError):
    """Exact polynomial division requested but the divisor does not divide."""


# --- ioeq ----------------------------------------------------------------

class NotAnOutput(CompidentError):
    """Requested compartment is not an output of the model."""


# --- ident ---------------------------------------------------------------

class UncoveredVariable(CompidentError):
    """Coefficient map mentions a variable missing from the parameter list."""


class NotStronglyConnected(CompidentError):
    """Rank criterion requires strong connectivity; verdict refused."""


class ZeroDivisorCoefficient(CompidentError):
    """Quotient transform would divide by the zero polynomial."""


# --- cycle / catenary ----------------------------------------------------

class NotACycle(CompidentError):
    """Operation requires a directed-cycle model."""


class NotCatenary(CompidentError):
    """Operation requires a catenary model."""


class UndefinedForAdjacentPair(CompidentError):
    """e1*(i,j) is undefined when the output immediately precedes the input."""


class NotApplicable(CompidentError):
    """Minimal-submodel construction does not apply to this model."""


class PreconditionViolated(CompidentError):
    """Closed-form operation called outside its stated domain."""


# --- singular ------------------------------------------------------------

class NotIdentifiable(CompidentError):
    """Singular locus is undefined for unidentifiable models."""


class TooLarge(CompidentError):
    """Symbolic computation refused beyond the feasibility guard."""


class UnsolvableConstraint(CompidentError):
    """Hyperplane has no variable with an invertible coefficient mod p."""


# --- cli -----------------------------------------------------------------

class IoFailure(CompidentError):
    """Report emission failed."""
