import numpy as np
import pytest

from moduli_lab import build_chart, find_central_rep, lie_context
from moduli_lab.streams import stream

# acceptance outcomes, filled by tests/test_acceptance.py and printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = (passed, line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k][1])


# name -> (group, genus, strategy, keyword arguments)
CHART_SPECS = {
    "u1-g2-trivial": ("u1", 2, "trivial", {}),
    "u1-g3-diagonal": ("u1", 3, "diagonal", {}),
    "su2-g1-pauli": ("su2", 1, "pauli-genus1", {}),
    "su2-g2-trivial": ("su2", 2, "trivial", {}),
    "su2-g2-diagonal": ("su2", 2, "diagonal", {}),
    "su2-g2-random": ("su2", 2, "random-polish", {}),
    "su2-g3-twisted": ("su2", 3, "random-polish", {"twist": 1}),
    "u2-g1-twisted": ("u2", 1, "random-polish", {"central_target": [np.pi]}),
    "u2-g2-diagonal": ("u2", 2, "diagonal", {}),
    "u2-g2-random": ("u2", 2, "random-polish", {}),
}

_CACHE = {}


def make_chart(name: str):
    if name not in _CACHE:
        gid, genus, strategy, kw = CHART_SPECS[name]
        rep = find_central_rep(lie_context(gid), genus, strategy, rng=stream(0, f"tests/{name}"), **kw)
        _CACHE[name] = build_chart(rep, rng=stream(0, f"tests/{name}/stabilizer"))
    return _CACHE[name]


@pytest.fixture(params=sorted(CHART_SPECS))
def chart(request):
    return make_chart(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
