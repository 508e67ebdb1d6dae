"""Explicit finite-horizon regret bound for the sliding-window policy.

For every arm that is suboptimal in at least one segment, the expected number
of pulls up to ``T`` is bounded by

    (L + 4) w  +  4eT / (w log w)
      + sum_i f(w) / d_i
      + sum_i sqrt(2 pi) sqrt(d'_i^2 / d_i^3) sqrt(f(w))
      + sum_i 2 (d'_i / d_i)^2
      + 5

where the sums run over segments ``i`` in which the arm is suboptimal,
``d_i = d(g(mu_{a,i}), g(mu*_i))`` and ``d'_i`` is its derivative in the first
argument. Rewards lie in [0, 1], so the regret bound is the sum over arms.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._validation import ValidationError, check_int
from .kl import bern_kl, bern_kl_deriv, exploration_fn

TERM_NAMES = ("window_term", "drift_term", "kl_term", "sqrt_term", "deriv_term", "constant")


class DegenerateGapError(ValidationError):
    """A suboptimal arm's feedback mean coincides with the optimal one."""


@dataclass
class ArmBound:
    arm: int
    window_term: float = 0.0
    drift_term: float = 0.0
    kl_term: float = 0.0
    sqrt_term: float = 0.0
    deriv_term: float = 0.0
    constant: float = 5.0
    segments: list = field(default_factory=list)

    @property
    def total(self):
        return sum(getattr(self, name) for name in TERM_NAMES)


@dataclass
class BoundReport:
    horizon: int
    window: int
    n_changes: int
    arms: list

    @property
    def regret_bound(self):
        return sum(a.total for a in self.arms)

    def to_dict(self):
        return {
            "horizon": self.horizon,
            "window": self.window,
            "n_changes": self.n_changes,
            "regret_bound": self.regret_bound,
            "arms": [dict(asdict(a), total=a.total) for a in self.arms],
        }


def regret_bound(env, window):
    """Itemized bound on ``E[N_a(T)]`` per arm and on the regret of ``env``.

    Raises :class:`DegenerateGapError` when a suboptimal arm has the same
    feedback mean as the optimum would produce through its own scheme.
    """
    w = check_int(window, "window", min_value=1)
    T, L = env.horizon, env.n_changes
    fw = exploration_fn(w)
    drift = 4.0 * math.e * T / (w * math.log(w)) if w > 1 else math.inf

    arms = []
    for a in range(env.n_arms):
        scheme = env.schemes[a]
        bound = None
        for i, seg in enumerate(env.segments):
            best = max(seg.means)
            mu = seg.means[a]
            if mu >= best:
                continue
            lam, lam_star = scheme.forward(mu), scheme.forward(best)
            d = bern_kl(lam, lam_star)
            if d == 0.0:
                raise DegenerateGapError(
                    f"arm {a} in segment {i}: feedback mean {lam} equals g(mu*) = {lam_star}"
                )
            if not (0.0 < lam < 1.0 and 0.0 < lam_star < 1.0):
                raise ValidationError(
                    f"arm {a} in segment {i}: bound needs feedback means inside (0, 1), "
                    f"got {lam} and {lam_star}"
                )
            dp = bern_kl_deriv(lam, lam_star)
            if bound is None:
                bound = ArmBound(a, window_term=(L + 4) * w, drift_term=drift)
            bound.kl_term += fw / d
            bound.sqrt_term += math.sqrt(2.0 * math.pi) * math.sqrt(dp * dp / d**3) * math.sqrt(fw)
            bound.deriv_term += 2.0 * (dp / d) ** 2
            bound.segments.append(i)
        if bound is not None:
            arms.append(bound)
    return BoundReport(T, w, L, arms)


def bound_curve(env, window, ts):
    """Regret bound of ``env`` cut at each horizon in ``ts`` (0 at ``t = 0``)."""
    out = np.empty(len(ts))
    for j, t in enumerate(ts):
        out[j] = 0.0 if t == 0 else regret_bound(env.truncated(int(t)), window).regret_bound
    return out
