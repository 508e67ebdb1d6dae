"""Corruption functions, randomized-response channels and local privacy.

A corruption scheme maps an arm's mean reward to the mean of the feedback the
learner actually sees. Randomized-response channels induce affine schemes;
arbitrary strictly monotone maps are also accepted.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._validation import ValidationError, check_nonnegative, check_probability

MONOTONICITY_GRID = 1025
_INVERSE_TOL = 1e-12
_IMAGE_TOL = 1e-12


@dataclass(frozen=True)
class RandomizedResponseMatrix:
    """Binary channel from reward bit to feedback bit.

    ``p00 = P[feedback=0 | reward=0]`` and ``p11 = P[feedback=1 | reward=1]``.
    """

    p00: float
    p11: float

    def __post_init__(self):
        p00 = check_probability(self.p00, "p00")
        p11 = check_probability(self.p11, "p11")
        if p00 + p11 == 1.0:
            raise ValidationError(
                f"p00 + p11 must differ from 1 (got p00={p00}, p11={p11}); "
                "the induced corruption function would be constant"
            )
        object.__setattr__(self, "p00", p00)
        object.__setattr__(self, "p11", p11)

    @property
    def slope(self):
        return self.p00 + self.p11 - 1.0

    def as_array(self):
        """Column-stochastic 2x2 matrix ``M[feedback, reward]``."""
        return np.array([[self.p00, 1.0 - self.p11], [1.0 - self.p00, self.p11]])


class CorruptionScheme:
    """A known strictly monotone map from reward mean to feedback mean.

    Build instances with :meth:`from_matrix`, :meth:`identity`,
    :meth:`staircase` or :meth:`custom`; the plain constructor is internal.
    """

    def __init__(self, forward, inverse, *, channel=None, kind="custom-monotone"):
        self._forward = forward
        self._inverse = inverse
        self.channel = channel
        self.kind = kind
        g0, g1 = float(forward(0.0)), float(forward(1.0))
        self.increasing = g1 > g0
        self.image = (min(g0, g1), max(g0, g1))

    @classmethod
    def from_matrix(cls, matrix):
        if not isinstance(matrix, RandomizedResponseMatrix):
            matrix = RandomizedResponseMatrix(*matrix)
        intercept = 1.0 - matrix.p00
        slope = matrix.slope

        def forward(x):
            return intercept + slope * x

        def inverse(y):
            return (y - intercept) / slope

        return cls(forward, inverse, channel=matrix, kind="affine-from-matrix")

    @classmethod
    def identity(cls):
        return cls.from_matrix(RandomizedResponseMatrix(1.0, 1.0))

    @classmethod
    def staircase(cls, epsilon):
        return cls.from_matrix(staircase_matrix(epsilon))

    @classmethod
    def custom(cls, forward):
        """Wrap an arbitrary continuous, strictly monotone ``forward`` on [0, 1].

        Strictness is checked on a 1,025-point grid. The inverse is evaluated
        by bisection to 1e-12.
        """
        grid = np.linspace(0.0, 1.0, MONOTONICITY_GRID)
        values = np.array([float(forward(x)) for x in grid])
        if np.any(values < 0.0) or np.any(values > 1.0) or np.any(np.isnan(values)):
            raise ValidationError("corruption function must map [0, 1] into [0, 1]")
        steps = np.diff(values)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValidationError("corruption function is not strictly monotone on [0, 1]")
        increasing = steps[0] > 0

        def inverse(y):
            lo, hi = 0.0, 1.0
            while hi - lo > _INVERSE_TOL:
                mid = 0.5 * (lo + hi)
                if (forward(mid) < y) == increasing:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)

        return cls(forward, inverse, kind="custom-monotone")

    def forward(self, x):
        return self._forward(x)

    def inverse(self, y):
        return self._inverse(y)

    def to_dict(self):
        if self.channel is None:
            raise ValidationError("custom corruption functions cannot be serialized")
        return {"type": "rr", "p00": self.channel.p00, "p11": self.channel.p11}

    @classmethod
    def from_dict(cls, data):
        kind = data.get("type")
        if kind == "rr":
            return cls.from_matrix(RandomizedResponseMatrix(data["p00"], data["p11"]))
        if kind == "staircase":
            return cls.staircase(data["epsilon"])
        if kind == "identity":
            return cls.identity()
        raise ValidationError(f"unknown corruption scheme type {kind!r}")

    def __eq__(self, other):
        if not isinstance(other, CorruptionScheme):
            return NotImplemented
        if self.channel is not None or other.channel is not None:
            return self.channel == other.channel
        return self is other

    def __hash__(self):
        return hash(self.channel) if self.channel is not None else id(self)

    def __repr__(self):
        if self.channel is not None:
            return f"CorruptionScheme(p00={self.channel.p00!r}, p11={self.channel.p11!r})"
        return f"CorruptionScheme(kind={self.kind!r}, increasing={self.increasing})"


def g_of(scheme, x):
    """Feedback mean produced by reward mean ``x``."""
    x = check_probability(x, "x")
    return float(scheme.forward(x))


def g_inv(scheme, y):
    """Reward mean whose feedback mean is ``y``.

    Raises ``ValidationError`` when ``y`` lies outside the image of the scheme.
    """
    lo, hi = scheme.image
    if not lo - _IMAGE_TOL <= y <= hi + _IMAGE_TOL:
        raise ValidationError(f"{y} is outside the image [{lo}, {hi}] of the corruption function")
    return min(1.0, max(0.0, float(scheme.inverse(min(hi, max(lo, y))))))


def corrupt_bit(matrix, reward, rng):
    """Pass one reward bit through the channel, using exactly one uniform draw."""
    u = rng.random()
    if reward:
        return 1 if u < matrix.p11 else 0
    return 1 if u >= matrix.p00 else 0


def _channel_probs(matrix):
    # Privacy is also defined for the degenerate p00 + p11 = 1 channel, which
    # RandomizedResponseMatrix refuses, so plain (p00, p11) pairs are accepted.
    if isinstance(matrix, RandomizedResponseMatrix):
        return matrix.p00, matrix.p11
    p00, p11 = matrix
    return check_probability(p00, "p00"), check_probability(p11, "p11")


def ldp_epsilon(matrix):
    """Smallest epsilon for which the channel is epsilon-locally private.

    This is the log of the largest likelihood ratio between the two reward
    values over both feedback outcomes. Returns ``inf`` when some outcome is
    possible under one reward value but not the other.

    ``matrix`` is a :class:`RandomizedResponseMatrix` or a ``(p00, p11)`` pair.
    """
    p00, p11 = _channel_probs(matrix)
    pairs = ((p00, 1.0 - p11), (1.0 - p11, p00), (p11, 1.0 - p00), (1.0 - p00, p11))
    worst = 0.0
    for num, den in pairs:
        if den == 0.0:
            if num > 0.0:
                return math.inf
            continue
        worst = max(worst, num / den)
    return math.log(worst)


def staircase_matrix(epsilon):
    """Symmetric channel ``p00 = p11 = e^eps / (1 + e^eps)``.

    Among binary channels that are epsilon-locally private it maximizes
    ``p00 + p11``, i.e. the slope of the induced corruption function.
    """
    epsilon = check_nonnegative(epsilon, "epsilon")
    if epsilon == 0.0:
        raise ValidationError("epsilon must be > 0")
    p = 1.0 / (1.0 + math.exp(-epsilon))
    return RandomizedResponseMatrix(p, p)


def verify_ldp(matrix, epsilon):
    return ldp_epsilon(matrix) <= epsilon + 1e-12
