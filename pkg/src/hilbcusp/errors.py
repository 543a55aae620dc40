"""Exception hierarchy. Every error carries a short machine-readable kind."""


class HilbcuspError(Exception):
    kind = "error"


class InvalidFieldError(HilbcuspError, ValueError):
    kind = "invalid-field"


class InvalidArgumentError(HilbcuspError, ValueError):
    kind = "invalid-argument"


class LatticeViolationError(InvalidArgumentError):
    kind = "lattice-violation"


class NoSolutionError(HilbcuspError, ValueError):
    kind = "no-solution"


class NoFundamentalUnitError(HilbcuspError, ValueError):
    kind = "no-fundamental-unit"


class ResourceLimitError(HilbcuspError, RuntimeError):
    kind = "resource-limit"


class UnsupportedConfigurationError(HilbcuspError, ValueError):
    kind = "unsupported-configuration"
