import json

import pytest
from hypothesis import settings

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")


def small_config(tmp_path, **overrides):
    cfg = {
        "schema_version": 1,
        "environment": {
            "K": 3,
            "T": 600,
            "segments": [
                {"start": 1, "means": [0.8, 0.3, 0.5]},
                {"start": 301, "means": [0.2, 0.9, 0.5]},
            ],
            "schemes": [{"type": "staircase", "epsilon": 2.0}] * 3,
        },
        "policies": [
            {"policy": "sw-klucb-cf"},
            {"policy": "klucb-cf"},
            {"policy": "oracle"},
            {"policy": "uniform"},
            {"policy": "sw-klucb-cf-doubling", "initial_horizon": 64},
        ],
        "replications": 3,
        "base_seed": 12345,
        "output": {"path": str(tmp_path / "out"), "format": "csv"},
        "record_granularity": "log-spaced",
        "record_points": 64,
    }
    cfg.update(overrides)
    return cfg


@pytest.fixture
def config_file(tmp_path):
    def write(**overrides):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(small_config(tmp_path, **overrides)))
        return path

    return write


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
