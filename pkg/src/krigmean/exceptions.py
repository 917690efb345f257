"""Exception types raised across the package."""


class KrigingError(Exception):
    """Base class for all package errors."""


class DegenerateSeries(KrigingError, ValueError):
    """The series has zero variance, so correlations are undefined."""


class CorrelationNotPD(KrigingError, ValueError):
    """The correlation matrix could not be Cholesky-factorized."""


class SingularSystem(KrigingError, ValueError):
    """A solve was attempted without a valid factorization."""


class NoRootInRange(KrigingError):
    """No sign change and no residual within tolerance over the scanned indices."""


class MalformedCsv(KrigingError, ValueError):
    pass


class EmptyInput(KrigingError, ValueError):
    pass
