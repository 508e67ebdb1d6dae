"""Small input-validation helpers shared by the estimators and the harness."""

import math
import numbers


class ValidationError(ValueError):
    """Raised when a value or a config field violates its contract.

    ``path`` points at the offending config field (``environment.segments[0].start``)
    when the error comes from config validation.
    """

    def __init__(self, message, path=None):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


def check_probability(value, name="value", *, open_interval=False):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if math.isnan(value):
        raise ValidationError(f"{name} is NaN")
    if open_interval:
        if not 0.0 < value < 1.0:
            raise ValidationError(f"{name} must lie in (0, 1), got {value}")
    elif not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_int(value, name="value", *, min_value=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if min_value is not None and value < min_value:
        raise ValidationError(f"{name} must be >= {min_value}, got {value}")
    return value


def check_nonnegative(value, name="value"):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ValidationError(f"{name} must be a real number, got {value!r}")
    value = float(value)
    if not value >= 0.0 or math.isinf(value):
        raise ValidationError(f"{name} must be finite and >= 0, got {value}")
    return value
