"""Sliding-window KL-UCB for non-stationary bandits with locally private feedback."""

from .bounds import BoundReport, regret_bound
from .config import ConfigError, ExperimentConfig, load_config
from .corruption import (
    CorruptionScheme,
    RandomizedResponseMatrix,
    corrupt_bit,
    g_inv,
    g_of,
    ldp_epsilon,
    staircase_matrix,
    verify_ldp,
)
from .environment import EnvironmentSpec, SegmentSpec, generate_instance, swap_environment
from .experiment import run_experiment
from .kl import bern_kl, bern_kl_deriv, exploration_fn, kl_lower_bound, kl_upper_bound
from .policies import (
    KLUCBCF,
    DoublingTrick,
    OraclePolicy,
    SlidingWindowKLUCB,
    UniformPolicy,
    default_window,
)
from .window import EmptyWindowError, WindowStats

__version__ = "0.1.0"
