from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from koszulkit import corpus as corpus_mod
from koszulkit.cdg import build_cdg_dual
from koszulkit.linalg import Field
from koszulkit.twisted import build_two_sided

settings.register_profile("ci", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def QQ():
    return Field.parse("q")


@pytest.fixture(scope="session")
def F5():
    return Field.parse("fp:5")


@pytest.fixture(scope="session")
def entries():
    return {e.name: e for e in corpus_mod.corpus()}


@functools.cache
def cdg(name: str, N: int = 3):
    return build_cdg_dual(corpus_mod.get(name).presentation, N)


@functools.cache
def two_sided(name: str, N: int, M: int, opposite: bool = False):
    return build_two_sided(corpus_mod.get(name).presentation, N, M, opposite)


@pytest.fixture(scope="session")
def cdg_of():
    return cdg


@pytest.fixture(scope="session")
def two_sided_of():
    return two_sided


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(k for k in mod.RESULTS if isinstance(k, int)):
        terminalreporter.write_line(mod.RESULTS[k])
