"""Exception types shared across the package.

The CLI maps these onto exit codes: problem-format errors exit 2,
infeasibility exits 3, anything else exits 4.
"""


class CtgsError(Exception):
    """Base class for all package errors."""


class ProblemFormatError(CtgsError):
    """Raised when an input file or value fails validation.

    ``pointer`` is a JSON-pointer-style path into the offending document.
    """

    def __init__(self, message, pointer=""):
        super().__init__(message if not pointer else f"{pointer}: {message}")
        self.pointer = pointer
        self.message = message


class InfeasibleProblemError(CtgsError):
    """Raised when a well-formed problem admits no solution.

    Examples: the signal space is not uniformly bandlimited, or no
    admissible vertex sequence exists for the filtration.
    """


class ScaleLimitError(CtgsError):
    """Raised when a brute-force enumeration guard is exceeded."""


class ReconstructionError(CtgsError):
    """Raised when a recovery linear system is rank deficient or inconsistent."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
