import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from pseudomode.model import CouplingKind, ModeNetwork, n_modes_for  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

KINDS = list(CouplingKind)


def random_network(rng, kind, *, g=None, drive_mode=None, kerr_scale=0.05, chi_scale=0.03):
    n = n_modes_for(kind)
    omegas = rng.uniform(0.5, 3.0, n)
    kerrs = rng.uniform(-kerr_scale, kerr_scale, n)
    chi = rng.uniform(-chi_scale, chi_scale, (n, n))
    chi = np.triu(chi, 1)
    chi = chi + chi.T
    g = rng.uniform(0.01, 0.3) if g is None else g
    return ModeNetwork.build(omegas, kerrs, chi, kind=kind, g=g, drive_mode=drive_mode)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
