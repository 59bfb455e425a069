"""Exception hierarchy shared by every module of the package."""


class MembraneBoundsError(Exception):
    """Base class for all errors raised by membrane_bounds."""


class InvalidMatrixError(MembraneBoundsError, ValueError):
    """Matrix is not symmetric positive definite with unit determinant."""


class InvalidDilatationError(MembraneBoundsError, ValueError):
    """Complex dilatation has modulus >= 1."""


class DomainError(MembraneBoundsError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ParameterError(MembraneBoundsError, ValueError):
    """Invalid catalog or meshing parameter."""


class StencilError(MembraneBoundsError):
    """Finite-difference stencil left the domain of the map."""


class OrientationError(MembraneBoundsError):
    """Jacobian is non-positive where an orientation-preserving map was expected."""


class VerificationError(MembraneBoundsError):
    """A catalog self-check exceeded its tolerance.

    Attributes
    ----------
    entry, check : str
        Which entry and which check failed.
    witness : complex
        Sample point where the worst residual was observed.
    residual : float
    """

    def __init__(self, entry, check, witness, residual, tol):
        self.entry = entry
        self.check = check
        self.witness = witness
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"{entry}: check {check!r} failed at z={witness!r} "
            f"(residual {residual:.3e} > tol {tol:.1e})"
        )


class QuadratureError(MembraneBoundsError):
    """Quadrature overflowed or did not settle under refinement."""


class MeshingError(MembraneBoundsError):
    """Triangulation of a domain failed."""


class AssemblyError(MembraneBoundsError):
    """Coefficient field is not positive definite on some triangle."""


class ConvergenceError(MembraneBoundsError):
    """Iterative eigensolver hit its iteration cap.

    The last iterate is kept on ``last`` for diagnosis.
    """

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class IdentityViolation(MembraneBoundsError):
    """Direct and weighted-image eigenvalues disagree beyond tolerance."""
