import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sentiframes import read_lexicon  # noqa: E402
from sentiframes.matching import read_alias_table, read_lemma_table  # noqa: E402

DATA = Path(__file__).parent / "data"

_criteria: dict[int, tuple[str, str]] = {}
_notes: dict[int, list[str]] = {}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fig1_lexicon():
    return read_lexicon(DATA / "fig1.lex.json")


@pytest.fixture
def fig1_frame(fig1_lexicon):
    return fig1_lexicon.frames["осудить"]


@pytest.fixture
def micro_lexicon():
    return read_lexicon(DATA / "micro.lex.json")


@pytest.fixture
def micro_lemmas():
    with open(DATA / "micro_lemmas.tsv", encoding="utf-8") as fh:
        return read_lemma_table(fh)


@pytest.fixture
def micro_aliases():
    with open(DATA / "micro_aliases.tsv", encoding="utf-8") as fh:
        return read_alias_table(fh)


@pytest.fixture
def criterion_note(request):
    """Attach a line of detail to the current test's criterion in the summary."""
    (number, _title) = request.node.get_closest_marker("criterion").args
    return lambda text: _notes.setdefault(number, []).append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}[report.outcome]
        prev = _criteria.get(number)
        # one criterion may span several tests; any failure wins
        if prev is None or prev[1] == "PASS" or status == "FAIL":
            _criteria[number] = (title, status)
        if report.skipped and isinstance(report.longrepr, tuple):
            _notes.setdefault(number, []).append(f"skip reason: {report.longrepr[2]}")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {status:<7} {title}")
        for note in _notes.get(number, []):
            for line in note.splitlines():
                terminalreporter.write_line(f"    {line}")
