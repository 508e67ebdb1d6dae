"""Experiment configuration: loading, schema validation, normalization."""

import copy
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema

from ._validation import ValidationError
from .corruption import CorruptionScheme
from .environment import EnvironmentSpec, generate_instance

SCHEMA_VERSION = 1


class ConfigError(ValidationError):
    """One or more config fields are invalid; ``errors`` holds ``(path, message)`` pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{p or '<root>'}: {m}" for p, m in self.errors))


@lru_cache(maxsize=None)
def config_schema():
    text = resources.files("swklucb").joinpath("config.schema.json").read_text()
    return json.loads(text)


def _format_path(parts):
    out = ""
    for part in parts:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def build_environment(env_data):
    if "generate" in env_data:
        g = env_data["generate"]
        scheme = g.get("scheme")
        schemes = None if scheme is None else (CorruptionScheme.from_dict(scheme),) * g["K"]
        return generate_instance(
            g["K"], g["T"], g["L"], g["min_gap"], g["seed"],
            schemes=schemes, feedback_mode=g.get("feedback_mode", "channel"),
        )
    return EnvironmentSpec.from_dict(env_data)


@dataclass(frozen=True)
class ExperimentConfig:
    """Normalized experiment description.

    ``environment_data`` keeps the environment exactly as written (explicit
    spec or generator parameters) so the config round-trips losslessly;
    :attr:`environment` builds the :class:`EnvironmentSpec` on demand.
    """

    environment_data: dict
    policies: tuple
    replications: int = 1
    base_seed: int = 0
    output_path: str = "results"
    output_format: str = "csv"
    record_granularity: str = "log-spaced"
    record_points: int = 512

    @property
    def environment(self):
        return build_environment(self.environment_data)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "environment": copy.deepcopy(self.environment_data),
            "policies": [dict(p) for p in self.policies],
            "replications": self.replications,
            "base_seed": self.base_seed,
            "output": {"path": self.output_path, "format": self.output_format},
            "record_granularity": self.record_granularity,
            "record_points": self.record_points,
        }

    def replace(self, **changes):
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return ExperimentConfig(**data)

    @classmethod
    def from_dict(cls, data):
        validate_config(data)
        output = data.get("output", {})
        return cls(
            environment_data=copy.deepcopy(data["environment"]),
            policies=tuple(dict(p) for p in data["policies"]),
            replications=data.get("replications", 1),
            base_seed=data.get("base_seed", 0),
            output_path=output.get("path", "results"),
            output_format=output.get("format", "csv"),
            record_granularity=data.get("record_granularity", "log-spaced"),
            record_points=data.get("record_points", 512),
        )


def validate_config(data):
    """Check ``data`` against the JSON schema and the model invariants.

    Raises :class:`ConfigError` listing every problem with its field path.
    """
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        problems = []
        for err in errors:
            # oneOf failures are more readable through their best sub-error
            best = jsonschema.exceptions.best_match([err]) if err.context else err
            problems.append((_format_path(best.absolute_path), best.message))
        raise ConfigError(problems)
    try:
        env = build_environment(data["environment"])
    except ValidationError as exc:
        prefix = "environment.generate" if "generate" in data["environment"] else "environment"
        path = f"{prefix}.{exc.path}" if exc.path else prefix
        raise ConfigError([(path, exc.message)]) from None
    except KeyError as exc:
        raise ConfigError([("environment", f"missing field {exc}")]) from None
    problems = []
    for i, p in enumerate(data["policies"]):
        if p["policy"] == "klucb-cf" and "window" in p:
            problems.append((f"policies[{i}].window", "klucb-cf always uses the full horizon"))
        if p["policy"] == "sw-klucb-cf-doubling" and isinstance(p.get("window"), int):
            problems.append((f"policies[{i}].window", "doubling recomputes the window per epoch"))
    if problems:
        raise ConfigError(problems)
    return env


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([("", f"not valid JSON: {exc}")]) from None
    return ExperimentConfig.from_dict(data)
