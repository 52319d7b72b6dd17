"""Exception types shared across the package.

Every error raised deliberately by fraclab derives from FraclabError, so callers
can catch one base class. Parameter-validation errors also derive from
ValueError to stay friendly to generic validation code.
"""


class FraclabError(Exception):
    """Base class for all fraclab errors."""


class InvalidParameterError(FraclabError, ValueError):
    """An argument is outside its documented domain."""


class UnsupportedOrderError(InvalidParameterError):
    """Fractional order s outside the supported band [0.05, 0.95]."""


class UnsupportedModelError(FraclabError):
    """The requested operation is not defined for this model kind."""


class DiagonalPairError(InvalidParameterError):
    """A jump-kernel quantity was requested at i == j, where it is undefined."""


class IllConditionedCheckError(FraclabError):
    """A diagnostic cannot produce a trustworthy verdict at these parameters."""


class QuadratureError(FraclabError):
    """A quadrature rule could not meet its configured accuracy target."""


class ConfigError(FraclabError):
    """A run configuration file or CLI invocation is malformed."""


SUPPORTED_ORDER_MIN = 0.05
SUPPORTED_ORDER_MAX = 0.95


def require_order(s: float) -> float:
    """Validate a fractional order against the supported band and return it."""
    s = float(s)
    if not (SUPPORTED_ORDER_MIN <= s <= SUPPORTED_ORDER_MAX):
        raise UnsupportedOrderError(
            f"fractional order s={s} outside supported band "
            f"[{SUPPORTED_ORDER_MIN}, {SUPPORTED_ORDER_MAX}]"
        )
    return s
