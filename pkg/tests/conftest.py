import numpy as np
import pytest

from supplynet import _backend
from supplynet.model import Network, generate_setup


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.BACKEND
    _backend.use(request.param)
    yield request.param
    _backend.use(previous)


def random_net(seed: int, n_range=(3, 10), m_range=(2, 20), n_producers=1) -> Network:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    n_dem = int(rng.integers(1, n - n_producers + 1))
    setup = generate_setup(n, n_producers, n_dem, seed)
    all_edges = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = int(rng.integers(m_range[0], min(m_range[1], len(all_edges)) + 1))
    pick = rng.choice(len(all_edges), size=m, replace=False)
    return Network(setup, tuple(all_edges[i] for i in pick))


#: (criterion, passed, detail) lines recorded by the acceptance checks
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
