"""Bernoulli KL divergence and the KL confidence bounds built on it.

All functions are pure and operate on Python floats; the policies call them
once per arm per step so they avoid numpy overhead on scalars.
"""

import math
import numbers

from ._validation import ValidationError, check_int, check_nonnegative, check_probability

#: Absolute tolerance on the returned confidence endpoint.
BISECTION_TOL = 1e-9
#: Hard cap on bisection halvings; 2**-100 is far below the tolerance.
BISECTION_MAX_ITER = 100

_F3 = math.log(3.0) + 3.0 * math.log(math.log(3.0))


def _kl(x, y):
    # Unchecked divergence used inside the solvers.
    if x == y:
        return 0.0
    if y <= 0.0 or y >= 1.0:
        return math.inf
    # branch forms mirror each other so d(1-x, 1-y) == d(x, y) bit for bit
    # whenever 1-x and 1-y are exact
    if x == 0.0:
        return math.log(1.0 / (1.0 - y))
    if x == 1.0:
        return math.log(1.0 / y)
    d = x * _log_ratio(x, y, x - y) + (1.0 - x) * _log_ratio(1.0 - x, 1.0 - y, y - x)
    return max(d, 0.0)


def _log_ratio(a, b, diff):
    # log(a / b) with diff = a - b computed exactly; log1p keeps the error
    # relative to |a - b| when a is near b
    r = diff / b
    return math.log1p(r) if abs(r) < 0.5 else math.log(a / b)


def bern_kl(x, y):
    """KL divergence between Bernoulli(x) and Bernoulli(y).

    Uses ``0 * log 0 = 0``; the result is ``inf`` when ``y`` sits on the
    boundary of [0, 1] and differs from ``x``.

    >>> bern_kl(0.5, 0.5)
    0.0
    >>> bern_kl(0.3, 1.0)
    inf
    """
    x = check_probability(x, "x")
    y = check_probability(y, "y")
    return _kl(x, y)


def bern_kl_deriv(x, y):
    """Partial derivative of ``bern_kl`` with respect to its first argument."""
    x = check_probability(x, "x", open_interval=True)
    y = check_probability(y, "y", open_interval=True)
    return math.log(x / y) - math.log((1.0 - x) / (1.0 - y))


def exploration_fn(x):
    """Exploration budget ``log x + 3 log log x``, clamped to its value at 3.

    The unclamped form is negative or undefined below ``e``; every ``x`` in
    ``[1, 3)`` is mapped to ``exploration_fn(3)``.
    """
    if isinstance(x, bool) or not isinstance(x, numbers.Real) or math.isnan(x):
        raise ValidationError(f"x must be a real number, got {x!r}")
    if x < 1:
        raise ValidationError(f"exploration_fn requires x >= 1, got {x}")
    if x < 3:
        return _F3
    lx = math.log(x)
    return lx + 3.0 * math.log(lx)


def _check_solver_args(lambda_hat, n, budget):
    lambda_hat = check_probability(lambda_hat, "lambda_hat")
    n = check_int(n, "n", min_value=1)
    budget = check_nonnegative(budget, "budget")
    return lambda_hat, n, budget


def _upper(lambda_hat, n, budget):
    if budget == 0.0:
        return lambda_hat
    if n * _kl(lambda_hat, 1.0) <= budget:
        return 1.0
    level = budget / n
    lo, hi = lambda_hat, 1.0
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _kl(lambda_hat, mid) <= level:
            lo = mid
        else:
            hi = mid
    return lo


def _lower(lambda_hat, n, budget):
    if budget == 0.0:
        return lambda_hat
    if n * _kl(lambda_hat, 0.0) <= budget:
        return 0.0
    level = budget / n
    lo, hi = 0.0, lambda_hat
    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_TOL:
            break
        mid = 0.5 * (lo + hi)
        if _kl(lambda_hat, mid) <= level:
            hi = mid
        else:
            lo = mid
    return hi


def kl_upper_bound(lambda_hat, n, budget):
    """Largest ``q`` in ``[lambda_hat, 1]`` with ``n * d(lambda_hat, q) <= budget``.

    Solved by bisection; the returned point is always feasible and lies within
    ``BISECTION_TOL`` of the exact endpoint.

    Parameters
    ----------
    lambda_hat : float
        Empirical mean in [0, 1].
    n : int
        Number of observations behind ``lambda_hat`` (>= 1).
    budget : float
        Nonnegative right-hand side, typically ``exploration_fn(t)``.
    """
    return _upper(*_check_solver_args(lambda_hat, n, budget))


def kl_lower_bound(lambda_hat, n, budget):
    """Smallest ``q`` in ``[0, lambda_hat]`` with ``n * d(lambda_hat, q) <= budget``."""
    return _lower(*_check_solver_args(lambda_hat, n, budget))
