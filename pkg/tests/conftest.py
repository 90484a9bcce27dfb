from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from polar_scl.codebook import construct_monte_carlo, extend_with_crc
from polar_scl.crc import get_scheme

# compiled kernels make first calls slow; timing is not what these tests check
settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def code_1024():
    """(1024, 512) code designed at 2 dB with the default construction budget."""
    return construct_monte_carlo(10, 512, 2.0)


@pytest.fixture(scope="session")
def crc_codes():
    """(1024, 512) payload codes extended with each CRC, keyed by name."""
    return {name: extend_with_crc(10, 512, get_scheme(name), 2.0) for name in ("crc4", "crc8", "crc16")}


_criterion_lines: list[str] = []


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one PASS/FAIL line for the summary."""

    def record(k: int, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
        _criterion_lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
