from __future__ import annotations

import numpy as np
import pytest

from pluripot.config import RunConfig
from pluripot.verify import run_suite

# acceptance criterion outcomes, printed in the terminal summary
_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number: int, label: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number:02d} {status} {label}"
    if detail:
        line += f"  [{detail}]"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(_ACCEPTANCE_LINES)):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_config() -> RunConfig:
    return RunConfig()  # pinned defaults: seed 20260808, s=0.9, 1e6 MC samples


@pytest.fixture(scope="session")
def suite_reports(acceptance_config):
    """Lazily computed suite reports shared across acceptance tests."""
    cache: dict = {}

    def get(name: str):
        if name not in cache:
            cache[name] = run_suite(name, acceptance_config)
        return cache[name]

    return get


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=0xF00D))
