"""Per-arm statistics over the last ``w`` time steps."""

from collections import deque

from ._validation import check_int, check_probability


class EmptyWindowError(LookupError):
    """The arm has no observation inside the current window."""


class WindowStats:
    """Sliding-window counts and feedback sums for ``n_arms`` arms.

    The window runs over time steps, not over per-arm pulls: each push
    occupies one slot and the oldest slot is evicted once ``window_size``
    steps are held.

    >>> s = WindowStats(2, window_size=2)
    >>> for arm, fb in [(0, 1), (1, 0), (0, 1)]:
    ...     _ = s.push(arm, fb)
    >>> s.count(0), s.count(1), s.sum(0)
    (1, 1, 1.0)
    """

    def __init__(self, n_arms, window_size):
        self.n_arms = check_int(n_arms, "n_arms", min_value=1)
        self.window_size = check_int(window_size, "window_size", min_value=1)
        self.history = deque()
        self._counts = [0] * self.n_arms
        self._sums = [0.0] * self.n_arms

    def push(self, arm, feedback):
        if not 0 <= arm < self.n_arms:
            raise IndexError(f"arm {arm} out of range for {self.n_arms} arms")
        feedback = check_probability(feedback, "feedback")
        if len(self.history) == self.window_size:
            old_arm, old_fb = self.history.popleft()
            self._counts[old_arm] -= 1
            self._sums[old_arm] -= old_fb
            if self._counts[old_arm] == 0:
                # drop accumulated rounding from non-binary feedback
                self._sums[old_arm] = 0.0
        self.history.append((arm, feedback))
        self._counts[arm] += 1
        self._sums[arm] += feedback
        return self

    def count(self, arm):
        return self._counts[arm]

    def sum(self, arm):
        return self._sums[arm]

    def mean(self, arm):
        n = self._counts[arm]
        if n == 0:
            raise EmptyWindowError(f"arm {arm} has no observation in the window")
        return min(1.0, max(0.0, self._sums[arm] / n))

    def __len__(self):
        return len(self.history)

    def __repr__(self):
        return (
            f"WindowStats(n_arms={self.n_arms}, window_size={self.window_size}, "
            f"counts={self._counts})"
        )
