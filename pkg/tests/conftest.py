import numpy as np
import pytest

from dynastic_olg import ModelParameters, baseline_parameters, solve_steady_state

BASELINE_TEXT = """\
# baseline scenario
name = baseline
gamma1 = 1
gamma_ph = 0.5
gamma2 = 1
gamma_c = 0.9
alpha = 0.4
tau = 0.3
phi = 0.1
wbar = 1
eps = 0.2
eta = 0.2
theta = 0.2
R = 1.5
bequest = zero
"""


def draw_params(rng):
    """One random point of the parameter domain used by the property tests."""
    return ModelParameters(
        gamma1=rng.uniform(0.5, 1.5), gamma_ph=rng.uniform(0.5, 1.5),
        gamma2=rng.uniform(0.5, 1.5), gamma_c=rng.uniform(0.5, 1.5),
        alpha=rng.uniform(0.1, 0.9), tau=rng.uniform(0.15, 0.5),
        phi=rng.uniform(0.02, 0.3), wbar=rng.uniform(0.5, 2.0),
        eps=rng.uniform(0.05, 0.25), eta=rng.uniform(0.05, 0.25),
        theta=rng.uniform(0.05, 0.25), R=rng.uniform(1.0, 2.0),
        bequest=0.0 if rng.random() < 0.5 else rng.uniform(0.0, 1e-3),
    )


@pytest.fixture(scope="session")
def baseline():
    return baseline_parameters()


@pytest.fixture(scope="session")
def baseline_state(baseline):
    out = solve_steady_state(baseline)
    assert out.converged
    return out.state


@pytest.fixture(scope="session")
def random_draws():
    rng = np.random.default_rng(20240611)
    return [draw_params(rng) for _ in range(50)]


@pytest.fixture
def baseline_config(tmp_path):
    path = tmp_path / "baseline.cfg"
    path.write_text(BASELINE_TEXT)
    return path


_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")
    config.stash[_ACCEPTANCE] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    results = item.config.stash[_ACCEPTANCE]
    failed = report.failed or (report.when == "call" and report.outcome != "passed")
    if report.when == "call" or failed:
        previous = results.get(number, (title, True))[1]
        results[number] = (title, previous and not failed)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash[_ACCEPTANCE]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}")
