import numpy as np
import pytest

from excir import _backend, _pykernels
from excir.data import DataTable

try:
    from excir import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

KERNELS = [pytest.param(_pykernels, id="python")]
if compiled_kernels is not None:
    KERNELS.append(pytest.param(compiled_kernels, id="cython"))


@pytest.fixture(params=KERNELS)
def kernels(request):
    return request.param


@pytest.fixture
def force_python_backend(monkeypatch):
    """Route core accumulation through the numpy fallback."""
    from excir import core

    monkeypatch.setattr(core, "_accumulate_kernel", _pykernels.accumulate)
    monkeypatch.setattr(_backend, "kernels", _pykernels)


def random_table(rng, n, d, heavy=False, outputs=("y",)):
    X = rng.standard_normal((n, d))
    if heavy:
        mask = rng.random((n, d)) < 0.5
        X[mask] = rng.standard_t(2, size=int(mask.sum()))
    beta = rng.normal(size=d)
    outs = {}
    for k, name in enumerate(outputs):
        outs[name] = X @ np.roll(beta, k) + rng.standard_normal(n)
    names = tuple(f"x{j}" for j in range(d))
    return DataTable(X, names, outs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
