"""Seeded replications, regret accounting, aggregation and file output."""

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .policies import (
    KLUCBCF,
    DoublingTrick,
    OraclePolicy,
    SlidingWindowKLUCB,
    UniformPolicy,
    default_window,
)

FORMAT_VERSION = "swklucb-results/1"
JOBS_ENV = "SWKLUCB_JOBS"


def derive_seed(base_seed, policy_index, replication):
    """64-bit seed for one (policy, replication) work unit."""
    seq = np.random.SeedSequence([base_seed, policy_index, replication])
    return int(seq.generate_state(1, np.uint64)[0])


def policy_labels(policies):
    labels, seen = [], {}
    for p in policies:
        base = p.get("name", p["policy"])
        seen[base] = seen.get(base, 0) + 1
        labels.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return labels


def build_policy(entry, env, seed):
    kind = entry["policy"]
    K, T = env.n_arms, env.horizon
    L = entry.get("n_changes", env.n_changes)
    if kind == "sw-klucb-cf":
        return SlidingWindowKLUCB(K, T, entry.get("window", "auto"), L, env.schemes)
    if kind == "klucb-cf":
        return KLUCBCF(K, T, env.schemes)
    if kind == "oracle":
        return OraclePolicy(env)
    if kind == "uniform":
        return UniformPolicy(K, random_state=seed)
    if kind == "sw-klucb-cf-doubling":
        base = SlidingWindowKLUCB(K, T, "auto", L, env.schemes)
        return DoublingTrick(base, entry.get("initial_horizon", 128), random_state=seed)
    raise ValueError(f"unknown policy {kind!r}")


def resolved_window(entry, env):
    """Window a policy entry runs with, or ``None`` for policies without one."""
    if entry["policy"] == "sw-klucb-cf":
        w = entry.get("window", "auto")
        return default_window(env.horizon, entry.get("n_changes", env.n_changes)) if w == "auto" else w
    if entry["policy"] == "klucb-cf":
        return env.horizon
    return None


def step_means(env):
    """``(T, K)`` array of reward means, row ``t-1`` for step ``t``."""
    out = np.empty((env.horizon, env.n_arms))
    bounds = [s.start - 1 for s in env.segments] + [env.horizon]
    for seg, lo, hi in zip(env.segments, bounds, bounds[1:]):
        out[lo:hi] = seg.means
    return out


@dataclass
class RunRecord:
    """One simulated run. ``regret[t]`` is cumulative pseudo-regret after ``t`` steps."""

    policy: str
    policy_index: int
    replication: int
    seed: int
    pulls: np.ndarray
    rewards: np.ndarray
    feedback: np.ndarray
    regret: np.ndarray

    @property
    def realized_reward(self):
        return int(self.rewards.sum())

    def pull_counts(self, n_arms):
        return np.bincount(self.pulls, minlength=n_arms)


def simulate(policy, env, seed):
    """Run ``policy`` on ``env`` for the full horizon.

    The environment and the policy draw from separate streams spawned from
    ``seed``. The policy only ever receives feedback.
    """
    env_rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    policy.reset()
    T = env.horizon
    pulls = np.empty(T, dtype=np.int64)
    rewards = np.empty(T, dtype=np.int8)
    feedback = np.empty(T, dtype=np.int8)
    for t in range(1, T + 1):
        arm = policy.select_arm()
        reward, fb = env.sample_step(arm, t, env_rng)
        policy.update(arm, fb)
        pulls[t - 1] = arm
        rewards[t - 1] = reward
        feedback[t - 1] = fb
    means = step_means(env)
    gaps = means.max(axis=1) - means[np.arange(T), pulls]
    regret = np.concatenate(([0.0], np.cumsum(gaps)))
    return pulls, rewards, feedback, regret


def _run_unit(args):
    config_dict, policy_index, replication = args
    config = ExperimentConfig.from_dict(config_dict)
    env = config.environment
    entry = config.policies[policy_index]
    seed = derive_seed(config.base_seed, policy_index, replication)
    policy = build_policy(entry, env, seed)
    pulls, rewards, feedback, regret = simulate(policy, env, seed)
    label = policy_labels(config.policies)[policy_index]
    return RunRecord(label, policy_index, replication, seed, pulls, rewards, feedback, regret)


def record_times(horizon, granularity="log-spaced", points=512):
    if granularity == "every-step":
        return np.arange(horizon + 1)
    ts = np.unique(np.round(np.geomspace(1, horizon, points)).astype(np.int64))
    return np.concatenate(([0], ts))


@dataclass
class RegretCurve:
    policy: str
    t: np.ndarray
    seeds: list
    per_seed: np.ndarray  # (n_seeds, len(t))

    @property
    def mean(self):
        return self.per_seed.mean(axis=0)

    @property
    def std(self):
        return self.per_seed.std(axis=0)


def aggregate(runs, ts):
    """Group runs by policy and sample their regret at ``ts``."""
    curves = {}
    for run in runs:
        curve = curves.setdefault(run.policy, ([], []))
        curve[0].append(run.seed)
        curve[1].append(run.regret[ts])
    return {
        name: RegretCurve(name, np.asarray(ts), seeds, np.vstack(rows))
        for name, (seeds, rows) in curves.items()
    }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list
    curves: dict


def resolve_jobs(jobs=None):
    if jobs is None:
        jobs = int(os.environ.get(JOBS_ENV, "1"))
    return max(1, jobs)


def run_experiment(config, jobs=None):
    """Simulate every (policy, replication) pair of ``config``.

    Work units may run on a process pool; results are collected in canonical
    (policy, replication) order so the output never depends on scheduling.
    """
    config_dict = config.to_dict()
    units = [
        (config_dict, p, r) for p in range(len(config.policies)) for r in range(config.replications)
    ]
    jobs = resolve_jobs(jobs)
    if jobs == 1:
        runs = [_run_unit(u) for u in units]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_unit, units))
    env = config.environment
    ts = record_times(env.horizon, config.record_granularity, config.record_points)
    return ExperimentResult(config, runs, aggregate(runs, ts))


def _fmt(x):
    return format(float(x), ".17g")


def curve_records(curves):
    """Flat ``(policy, seed, t, regret)`` records: per seed, then mean and std."""
    records = []
    for name, curve in curves.items():
        for seed, row in zip(curve.seeds, curve.per_seed):
            records.extend((name, str(seed), int(t), float(v)) for t, v in zip(curve.t, row))
        for tag, row in (("mean", curve.mean), ("std", curve.std)):
            records.extend((name, tag, int(t), float(v)) for t, v in zip(curve.t, row))
    return records


def _run_summaries(result):
    K = result.config.environment.n_arms
    return [
        {
            "policy": run.policy,
            "replication": run.replication,
            "seed": run.seed,
            "final_regret": float(run.regret[-1]),
            "realized_reward": run.realized_reward,
            "pull_counts": [int(c) for c in run.pull_counts(K)],
        }
        for run in result.runs
    ]


def _header_lines(config):
    return [
        f"# format_version: {FORMAT_VERSION}",
        "# config: " + json.dumps(config.to_dict(), sort_keys=True),
    ]


def emit(result, path=None, fmt=None):
    """Write ``regret.<fmt>`` and ``runs.<fmt>`` into directory ``path``.

    Returns the list of written files. Reals are written with 17 significant
    digits, UTF-8, LF line endings.
    """
    config = result.config
    out_dir = Path(path if path is not None else config.output_path)
    fmt = fmt or config.output_format
    records = curve_records(result.curves)
    summaries = _run_summaries(result)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        regret_path = out_dir / f"regret.{fmt}"
        runs_path = out_dir / f"runs.{fmt}"
        if fmt == "csv":
            buf = io.StringIO(newline="")
            for line in _header_lines(config):
                buf.write(line + "\n")
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["policy", "seed", "t", "regret"])
            writer.writerows((p, s, t, _fmt(v)) for p, s, t, v in records)
            _write(regret_path, buf.getvalue())

            buf = io.StringIO(newline="")
            for line in _header_lines(config):
                buf.write(line + "\n")
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["policy", "replication", "seed", "final_regret", "realized_reward", "pull_counts"])
            for s in summaries:
                writer.writerow([
                    s["policy"], s["replication"], s["seed"], _fmt(s["final_regret"]),
                    s["realized_reward"], " ".join(map(str, s["pull_counts"])),
                ])
            _write(runs_path, buf.getvalue())
        elif fmt == "json":
            doc = {
                "format_version": FORMAT_VERSION,
                "config": config.to_dict(),
                "records": [
                    {"policy": p, "seed": s, "t": t, "regret": float(_fmt(v))} for p, s, t, v in records
                ],
            }
            _write(regret_path, json.dumps(doc, indent=1, sort_keys=True) + "\n")
            doc = {"format_version": FORMAT_VERSION, "config": config.to_dict(), "runs": summaries}
            _write(runs_path, json.dumps(doc, indent=1, sort_keys=True) + "\n")
        else:
            raise ValueError(f"unknown output format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write results to {out_dir}: {exc}") from exc
    return [regret_path, runs_path]


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv_records(path):
    """Parse a ``regret.csv`` back into ``(policy, seed, t, regret)`` records."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    next(reader)
    return [(p, s, int(t), float(v)) for p, s, t, v in reader]
