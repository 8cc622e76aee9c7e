from pathlib import Path

import pytest

from riskgame.game import DEFAULT_STRATEGIES, DetectionMatrix
from riskgame.scenario import load_scenario

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

TABLE1 = {
    "Keylogger": {"Syscall": "96.53", "Packets": "88.76", "Merged": "96.35"},
    "Cryptominer": {"Syscall": "96.14", "Packets": "96.54", "Merged": "97.76"},
    "Ransomware": {"Syscall": "99.92", "Packets": "99.38", "Merged": "99.91"},
}


@pytest.fixture
def table1() -> DetectionMatrix:
    return DetectionMatrix.from_percent(TABLE1, DEFAULT_STRATEGIES)


@pytest.fixture
def paper_path() -> Path:
    return FIXTURES / "paper.json"


@pytest.fixture
def paper(paper_path):
    return load_scenario(paper_path)


_acceptance: list[tuple[str, str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _acceptance.append((str(marker.args[0]), item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for crit, name, outcome in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {crit}: {name}")
