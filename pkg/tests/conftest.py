import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# Acceptance tests append "PASS ..." / "FAIL ..." lines here; they are echoed
# after the run so they show up without -s.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(re.search(r"criterion (\d+)", l).group(1))):
            terminalreporter.write_line(line)
