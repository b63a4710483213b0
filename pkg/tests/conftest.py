import numpy as np
import pytest

from mfstab import _kernels_py
from mfstab._backend import BACKEND
from mfstab.subgeo import Subspace, orthonormalize


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_subspace(rng, m, r):
    return orthonormalize(rng.standard_normal((m, r)))


def low_rank(rng, m, n, r):
    return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))


def backends():
    out = [_kernels_py]
    if BACKEND == "cython":
        from mfstab import _kernels
        out.append(_kernels)
    return out


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
