import pytest

from entropic_nc.model import default_observables, entangled_state, product_state

ENTANGLED_OPT = (3.4899, 2.9012)
PRODUCT_OPT = (2.9306, -5.7112)


@pytest.fixture(scope="session")
def obs():
    return default_observables()


@pytest.fixture(scope="session")
def ent_state():
    return entangled_state(*ENTANGLED_OPT)


@pytest.fixture(scope="session")
def prod_state():
    return product_state(*PRODUCT_OPT)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit criteria for the package")


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in getattr(rep, "nodeid", "") and (rep.when == "call" or outcome == "error"):
                lines.append((rep.nodeid.split("::", 1)[1], "PASS" if outcome == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{verdict}  {name}")
