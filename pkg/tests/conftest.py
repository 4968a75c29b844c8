import pytest

from sckr.frontend import parse

EX1_TEXT = """\
context ctop level 0.
context cbot level 1.
cbot < ctop.
module ctop { D(A => B). }
module cbot { A(a). -B(a). }
"""

EX2_TEXT = """\
context ctop level 0.
context cbot level 1.
cbot < ctop.
module ctop { D(A => B). }
module cbot { A(a). }
"""

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def ex1():
    return parse(EX1_TEXT)


@pytest.fixture
def ex2():
    return parse(EX2_TEXT)


@pytest.fixture
def ex1_file(tmp_path):
    p = tmp_path / "ex1.ckr"
    p.write_text(EX1_TEXT)
    return p


@pytest.fixture
def ex2_file(tmp_path):
    p = tmp_path / "ex2.ckr"
    p.write_text(EX2_TEXT)
    return p


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
