"""Bandit policies for corrupted, piecewise-stationary feedback.

Every policy is a scikit-learn style estimator: hyperparameters are plain
constructor arguments (so ``get_params``/``set_params``/``clone`` work), and
``reset()`` plays the role of ``fit``, creating the learned state in
attributes with a trailing underscore. The interaction loop is

    arm = policy.select_arm()
    policy.update(arm, feedback)

``update`` never sees the realized reward, only the corrupted feedback.
"""

import math
from functools import lru_cache

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.exceptions import NotFittedError

from ._validation import ValidationError, check_int
from .corruption import CorruptionScheme
from .kl import _lower, _upper, exploration_fn
from .window import WindowStats

DOUBLING_INITIAL_HORIZON = 128


def default_window(horizon, n_changes):
    """Window ``sqrt(4 e T / (L + 4))`` rounded half-up, at least 1.

    >>> default_window(10000, 4)
    117
    """
    T = check_int(horizon, "horizon", min_value=1)
    L = check_int(n_changes, "n_changes", min_value=0)
    raw = math.sqrt(4.0 * math.e * T / (L + 4))
    return max(1, math.floor(raw + 0.5))


@lru_cache(maxsize=1 << 18)
def _feedback_bound(lambda_hat, n, budget, upper):
    return _upper(lambda_hat, n, budget) if upper else _lower(lambda_hat, n, budget)


def corrupted_index(lambda_hat, n, budget, scheme):
    """Optimistic reward index from a feedback mean, or ``inf`` when ``n == 0``.

    The KL confidence interval is built on the feedback scale; its upper end
    (increasing scheme) or lower end (decreasing scheme) is clamped into the
    image of the scheme and mapped back to the reward scale.
    """
    if n == 0:
        return math.inf
    bound = _feedback_bound(lambda_hat, n, budget, scheme.increasing)
    lo, hi = scheme.image
    return min(1.0, max(0.0, scheme.inverse(min(hi, max(lo, bound)))))


def _argmax_lowest(values):
    best, best_val = 0, values[0]
    for a in range(1, len(values)):
        if values[a] > best_val:
            best, best_val = a, values[a]
    return best


class _Policy(BaseEstimator):
    def _check_reset(self):
        if not hasattr(self, "t_"):
            raise NotFittedError(f"{type(self).__name__} is not initialized; call reset() first")


class SlidingWindowKLUCB(_Policy):
    """Sliding-window KL-UCB on corrupted feedback (SW-KLUCB-CF).

    Parameters
    ----------
    n_arms : int
        Number of arms, at least 2.
    horizon : int
        Known number of steps.
    window : int or "auto"
        Window length in steps. ``"auto"`` uses :func:`default_window`
        with ``n_changes``.
    n_changes : int
        Number of stationary segments assumed when ``window="auto"``.
    schemes : sequence of CorruptionScheme, optional
        Known corruption function per arm; identity when omitted.
    """

    def __init__(self, n_arms=2, horizon=1000, window="auto", n_changes=1, schemes=None):
        self.n_arms = n_arms
        self.horizon = horizon
        self.window = window
        self.n_changes = n_changes
        self.schemes = schemes

    def _resolve_window(self):
        if self.window == "auto":
            return default_window(self.horizon_, self.n_changes)
        return check_int(self.window, "window", min_value=1)

    def reset(self):
        self.n_arms_ = check_int(self.n_arms, "n_arms", min_value=2)
        self.horizon_ = check_int(self.horizon, "horizon", min_value=1)
        self.window_ = self._resolve_window()
        schemes = self.schemes
        if schemes is None:
            schemes = [CorruptionScheme.identity()] * self.n_arms_
        schemes = tuple(schemes)
        if len(schemes) != self.n_arms_:
            raise ValidationError(f"expected {self.n_arms_} schemes, got {len(schemes)}")
        self.schemes_ = schemes
        self.stats_ = WindowStats(self.n_arms_, self.window_)
        self.t_ = 0
        return self

    def budget(self):
        """Exploration budget at the current decision step."""
        self._check_reset()
        return exploration_fn(max(1, min(self.t_, self.window_)))

    def compute_index(self, arm, budget=None):
        self._check_reset()
        stats = self.stats_
        n = stats.count(arm)
        if n == 0:
            return math.inf
        if budget is None:
            budget = self.budget()
        return corrupted_index(stats.mean(arm), n, budget, self.schemes_[arm])

    def indices(self):
        budget = self.budget()
        return [self.compute_index(a, budget) for a in range(self.n_arms_)]

    def select_arm(self):
        self._check_reset()
        if self.t_ < self.n_arms_:
            return self.t_
        return _argmax_lowest(self.indices())

    def update(self, arm, feedback):
        self._check_reset()
        if self.t_ >= self.horizon_:
            raise RuntimeError(f"horizon {self.horizon_} exhausted")
        self.stats_.push(arm, feedback)
        self.t_ += 1
        return self


class KLUCBCF(SlidingWindowKLUCB):
    """Stationary KL-UCB on corrupted feedback: the window spans the horizon."""

    def __init__(self, n_arms=2, horizon=1000, schemes=None):
        self.n_arms = n_arms
        self.horizon = horizon
        self.schemes = schemes

    def _resolve_window(self):
        return self.horizon_


class OraclePolicy(_Policy):
    """Pulls the currently best arm; reads the true means (simulation only)."""

    def __init__(self, environment=None):
        self.environment = environment

    def reset(self):
        if self.environment is None:
            raise ValidationError("OraclePolicy needs the environment")
        self.n_arms_ = self.environment.n_arms
        self.t_ = 0
        return self

    def select_arm(self):
        self._check_reset()
        return self.environment.oracle_best(self.t_ + 1)[0]

    def update(self, arm, feedback):
        self._check_reset()
        self.t_ += 1
        return self


class UniformPolicy(_Policy):
    def __init__(self, n_arms=2, random_state=None):
        self.n_arms = n_arms
        self.random_state = random_state

    def reset(self):
        self.n_arms_ = check_int(self.n_arms, "n_arms", min_value=2)
        self.rng_ = np.random.default_rng(self.random_state)
        self.t_ = 0
        return self

    def select_arm(self):
        self._check_reset()
        return int(self.rng_.integers(self.n_arms_))

    def update(self, arm, feedback):
        self._check_reset()
        self.t_ += 1
        return self


def epoch_seed(random_state, epoch):
    return int(np.random.SeedSequence([random_state, epoch]).generate_state(1, np.uint64)[0])


class DoublingTrick(_Policy):
    """Runs ``base_policy`` on horizon guesses ``T0, 2 T0, 4 T0, ...``.

    Each epoch starts from a fresh clone of ``base_policy`` with ``horizon``
    set to the epoch length (so an ``"auto"`` window is recomputed). When the
    base policy has a ``random_state`` parameter, epoch ``k`` receives
    ``epoch_seed(random_state, k)``.
    """

    def __init__(self, base_policy=None, initial_horizon=DOUBLING_INITIAL_HORIZON, random_state=0):
        self.base_policy = base_policy
        self.initial_horizon = initial_horizon
        self.random_state = random_state

    def reset(self):
        if self.base_policy is None:
            raise ValidationError("DoublingTrick needs a base_policy")
        self.initial_horizon_ = check_int(self.initial_horizon, "initial_horizon", min_value=1)
        self.t_ = 0
        self.epoch_ = -1
        self.restarts_ = []
        self._start_epoch()
        return self

    def epoch_policy(self, epoch):
        """Fresh, reset policy for ``epoch`` exactly as the wrapper builds it."""
        names = self.base_policy.get_params(deep=False)
        params = {}
        if "horizon" in names:
            params["horizon"] = self.initial_horizon_ * 2**epoch
        if "random_state" in names:
            params["random_state"] = epoch_seed(self.random_state, epoch)
        return clone(self.base_policy).set_params(**params).reset()

    def _start_epoch(self):
        self.epoch_ += 1
        self.epoch_start_ = self.t_
        self.restarts_.append(self.t_)
        self.epoch_length_ = self.initial_horizon_ * 2**self.epoch_
        self.current_ = self.epoch_policy(self.epoch_)

    def select_arm(self):
        self._check_reset()
        if self.t_ - self.epoch_start_ >= self.epoch_length_:
            self._start_epoch()
        return self.current_.select_arm()

    def update(self, arm, feedback):
        self._check_reset()
        self.current_.update(arm, feedback)
        self.t_ += 1
        return self
