"""Exception hierarchy.

Every failure mode raised by the toolkit derives from :class:`PoorToriError`.
The CLI maps the three families below onto exit codes.
"""


class PoorToriError(Exception):
    """Base class for all toolkit errors."""


class InputError(PoorToriError, ValueError):
    """Precondition violations: bad degree, non-prime modulus, malformed input."""


class CertificateError(PoorToriError):
    """A hypothesis could not be certified (exit code 2)."""


class BudgetError(PoorToriError):
    """A search budget or working precision was exhausted (exit code 3)."""


class ErrDegenerate(InputError):
    pass


class ErrDegreeTooSmall(InputError):
    pass


class ErrNotPrime(InputError):
    pass


class ErrDenominatorNotInvertible(InputError):
    pass


class ErrDegreeDrop(InputError):
    pass


class ErrNotSquarefree(InputError):
    pass


class ErrRamifiedPrime(InputError):
    pass


class ErrZeroConstantTerm(InputError):
    pass


class ErrNoTransitivity(CertificateError):
    pass


class ErrOracleScope(InputError):
    pass


class ErrBadDegree(InputError):
    pass


class ErrBadCount(InputError):
    pass


class ErrInvalidQuadruple(CertificateError):
    pass


class ErrUnsupportedShape(InputError):
    pass


class ErrPrecision(BudgetError):
    pass


class ErrFormulaMismatch(PoorToriError):
    """Closed-form and resultant discriminants disagree. Always a bug."""


class ErrExcludedPrime(InputError):
    pass


class ErrSearchBudget(BudgetError):
    pass


class ErrRealRoot(CertificateError):
    pass


class ErrConjugacy(CertificateError):
    pass


class ErrDegenerateLattice(BudgetError):
    pass


class ErrNotMonic(InputError):
    pass


class ErrDependent(InputError):
    pass


class ErrSchema(InputError):
    pass


class ErrInternalConsistency(PoorToriError):
    """Two independent methods disagreed. Always a bug."""
