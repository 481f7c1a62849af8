from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def configs_dir() -> Path:
    return ROOT / "configs"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(label, passed, detail)``."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(label: str, passed: bool, detail: str) -> bool:
        lines.append(f"{'PASS' if passed else 'FAIL'}  {label:<48} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
