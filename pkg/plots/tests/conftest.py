"""Shared fixtures.

The acceptance tests consume real reproduction output; the fixture
below generates it once per session by driving the benchmark suite's
command line, which keeps the coupling to the documented text
interface and nothing else.
"""

import subprocess
import sys
from typing import List

import pytest

_ACCEPTANCE_LINES: List[str] = []


@pytest.fixture
def verdict():
    """Print a pass/fail line per criterion before asserting it."""

    def check(name: str, ok: bool, detail: str) -> None:
        line = f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance verdicts")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig2_dir(tmp_path_factory):
    """CSV output of the suite's second exhibit, regenerated fresh.

    Driven through a subprocess on purpose: this package must work
    from the files alone, so the tests never import the suite.
    """
    out = tmp_path_factory.mktemp("fig2")
    cmd = [
        sys.executable,
        "-m",
        "dbbo.cli",
        "reproduce",
        "fig2",
        "--out",
        str(out),
        "--override",
        "runs_per_cell=100",
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        pytest.fail(f"exhibit reproduction failed:\n{proc.stderr[-2000:]}")
    return out


@pytest.fixture(scope="session")
def fig2_file(fig2_dir):
    """Locate a unique reproduction output file by glob pattern."""

    def find(pattern: str):
        matches = sorted(fig2_dir.glob(pattern))
        assert len(matches) == 1, f"{pattern!r} matched {matches}"
        return matches[0]

    return find


@pytest.fixture
def write_csv(tmp_path):
    """Write a small CSV into the test's temp dir; returns its path."""

    def write(name, header, rows):
        path = tmp_path / name
        lines = [",".join(header)]
        lines += [",".join(str(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        return path

    return write
