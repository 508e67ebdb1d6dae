"""Piecewise-stationary Bernoulli bandits with corrupted feedback."""

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import ValidationError, check_int, check_probability
from .corruption import CorruptionScheme, corrupt_bit

FEEDBACK_MODES = ("channel", "parametric")


@dataclass(frozen=True)
class SegmentSpec:
    """Reward means in force from ``start`` (1-based, inclusive) to the next segment."""

    start: int
    means: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", check_int(self.start, "start", min_value=1))
        means = tuple(check_probability(m, f"means[{i}]") for i, m in enumerate(self.means))
        object.__setattr__(self, "means", means)


@dataclass(frozen=True)
class EnvironmentSpec:
    """A horizon-``T`` bandit whose means change abruptly at segment starts.

    The number of segments is the number of changes counted from ``t=1``.
    ``schemes`` defaults to the noiseless channel for every arm.
    """

    n_arms: int
    horizon: int
    segments: tuple
    schemes: tuple = None
    feedback_mode: str = "channel"
    _starts: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = check_int(self.n_arms, "K", min_value=2)
        T = check_int(self.horizon, "T", min_value=1)
        segments = tuple(
            s if isinstance(s, SegmentSpec) else SegmentSpec(s["start"], s["means"])
            for s in self.segments
        )
        if not segments:
            raise ValidationError("at least one segment is required", "segments")
        if segments[0].start != 1:
            raise ValidationError(
                f"first segment must start at t=1 (first breakpoint), got {segments[0].start}",
                "segments[0].start",
            )
        for i, seg in enumerate(segments):
            if len(seg.means) != k:
                raise ValidationError(f"expected {k} means, got {len(seg.means)}", f"segments[{i}].means")
            if i and seg.start <= segments[i - 1].start:
                raise ValidationError("segment starts must be strictly increasing", f"segments[{i}].start")
        if segments[-1].start > T:
            raise ValidationError(
                f"segment starts after the horizon ({segments[-1].start} > {T})",
                f"segments[{len(segments) - 1}].start",
            )
        schemes = self.schemes
        if schemes is None:
            schemes = (CorruptionScheme.identity(),) * k
        schemes = tuple(
            s if isinstance(s, CorruptionScheme) else CorruptionScheme.from_dict(s) for s in schemes
        )
        if len(schemes) != k:
            raise ValidationError(f"expected {k} schemes, got {len(schemes)}", "schemes")
        if self.feedback_mode not in FEEDBACK_MODES:
            raise ValidationError(f"must be one of {FEEDBACK_MODES}", "feedback_mode")
        if self.feedback_mode == "channel":
            for a, s in enumerate(schemes):
                if s.channel is None:
                    raise ValidationError(
                        "channel mode needs a randomized-response matrix for every arm",
                        f"schemes[{a}]",
                    )
        object.__setattr__(self, "n_arms", k)
        object.__setattr__(self, "horizon", T)
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "_starts", tuple(s.start for s in segments))

    @property
    def n_changes(self):
        return len(self.segments)

    def segment_index(self, t):
        if not 1 <= t <= self.horizon:
            raise ValidationError(f"t={t} outside [1, {self.horizon}]")
        return bisect.bisect_right(self._starts, t) - 1

    def means_at(self, t):
        return self.segments[self.segment_index(t)].means

    def oracle_best(self, t):
        """Best arm at ``t`` (lowest id on ties) and its mean."""
        means = self.means_at(t)
        best = max(range(self.n_arms), key=lambda a: (means[a], -a))
        return best, means[best]

    def sample_step(self, arm, t, rng):
        """Draw ``(reward, feedback)`` for pulling ``arm`` at step ``t``."""
        mu = self.means_at(t)[arm]
        reward = 1 if rng.random() < mu else 0
        scheme = self.schemes[arm]
        if self.feedback_mode == "channel":
            feedback = corrupt_bit(scheme.channel, reward, rng)
        else:
            feedback = 1 if rng.random() < scheme.forward(mu) else 0
        return reward, feedback

    def truncated(self, horizon):
        """Same environment cut at an earlier horizon."""
        segs = tuple(s for s in self.segments if s.start <= horizon)
        return EnvironmentSpec(self.n_arms, horizon, segs, self.schemes, self.feedback_mode)

    def to_dict(self):
        return {
            "K": self.n_arms,
            "T": self.horizon,
            "segments": [{"start": s.start, "means": list(s.means)} for s in self.segments],
            "schemes": [s.to_dict() for s in self.schemes],
            "feedback_mode": self.feedback_mode,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["K"],
            data["T"],
            tuple(data["segments"]),
            data.get("schemes"),
            data.get("feedback_mode", "channel"),
        )


def generate_instance(n_arms, horizon, n_changes, min_gap, seed, *, schemes=None,
                      feedback_mode="channel", max_tries=10_000):
    """Random piecewise-stationary instance.

    Segments are at least ``ceil(T / (2L))`` steps long, the gap between the
    best and second-best arm is at least ``min_gap`` in every segment, and the
    best arm changes at every breakpoint.
    """
    k = check_int(n_arms, "K", min_value=2)
    T = check_int(horizon, "T", min_value=1)
    L = check_int(n_changes, "L", min_value=1)
    if not 0.0 < min_gap < 1.0:
        raise ValidationError(f"min_gap must lie in (0, 1), got {min_gap}")
    if L > T / 2:
        raise ValidationError(f"cannot place {L} segments in horizon {T} (need L <= T/2)")
    rng = np.random.default_rng(seed)

    spacing = math.ceil(T / (2 * L))
    slack = T - L * spacing
    extra = np.sort(rng.integers(0, slack + 1, size=L - 1))
    starts = [1] + [1 + (i + 1) * spacing + int(extra[i]) for i in range(L - 1)]

    segments = []
    prev_best = None
    for start in starts:
        for _ in range(max_tries):
            means = rng.random(k)
            order = np.argsort(-means, kind="stable")
            best = int(order[0])
            if means[order[0]] - means[order[1]] >= min_gap and best != prev_best:
                break
        else:
            raise ValidationError(f"no means with gap >= {min_gap} found in {max_tries} draws")
        prev_best = best
        segments.append(SegmentSpec(start, tuple(float(m) for m in means)))
    return EnvironmentSpec(k, T, tuple(segments), schemes, feedback_mode)


def swap_environment(horizon, epsilon=2.0, feedback_mode="channel"):
    """Three arms, three segments, the best arm moving at each change.

    Segments start at ``1``, ``T/2`` and ``3T/4``. The arm that dominates the
    long first segment turns bad later, which is what traps policies that
    average over the whole history.
    """
    T = check_int(horizon, "T", min_value=8)
    means = ((0.9, 0.2, 0.5), (0.3, 0.8, 0.5), (0.1, 0.3, 0.7))
    starts = (1, T // 2 + 1, 3 * T // 4 + 1)
    schemes = (CorruptionScheme.staircase(epsilon),) * 3
    return EnvironmentSpec(
        3, T, tuple(SegmentSpec(s, m) for s, m in zip(starts, means)), schemes, feedback_mode
    )
