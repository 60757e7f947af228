"""Exception types shared across the engine."""


class NCLaurentError(Exception):
    """Base class for all engine errors."""


class NotMonicOrUnitConstant(NCLaurentError):
    """H must satisfy h_0 = 1 and h_n = 1."""


class DegreeZero(NCLaurentError):
    """H must have degree at least 1."""


class NotReversible(NCLaurentError):
    """H fails h_i = h_{n-i} and non-reversible input was not allowed."""


class InvalidH(NCLaurentError):
    """An operation received an H it cannot work with."""


class NotLaurent(NCLaurentError):
    """An element expected to be Laurent contains denominator blocks.

    Carries a reproduction bundle: for an iterate this contradicts the
    certified Laurent phenomenon and therefore signals an engine bug,
    never a mathematical discovery.
    """

    def __init__(self, message, bundle=None):
        super().__init__(message)
        self.bundle = bundle or {}


class NotLaurentInput(NCLaurentError):
    """Operation defined only on Laurent elements got a non-Laurent one."""


class NotDivisible(NCLaurentError):
    """Exact commutative division failed; falsifies Laurentness upstream."""


class BudgetExceeded(NCLaurentError):
    """Iteration exceeded the configured k / term-count / wall-clock budget."""


class ZeroDivisor(NCLaurentError):
    """Left division by the zero element."""


class IndexOutOfRange(NCLaurentError):
    """Fan index outside the range the ray recursions support."""


class ChartMismatch(NCLaurentError):
    """A resolution chart identity failed; carries the identity name."""

    def __init__(self, message, failing=None):
        super().__init__(message)
        self.failing = failing or []


class SingularH(NCLaurentError):
    """H evaluated at a sample matrix is not invertible; resample."""


class CoeffDenominatorDivisibleByP(NCLaurentError):
    """A rational coefficient cannot be reduced modulo the chosen prime."""


class UsageError(NCLaurentError):
    """Bad CLI arguments or config."""
