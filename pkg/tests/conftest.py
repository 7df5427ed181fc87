import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from steato.cohort import build_dataset, cases_from_phantoms  # noqa: E402
from steato.patches import ExtractionConfig  # noqa: E402
from steato.phantom import generate_cohort  # noqa: E402

OPERATING_POINT = ExtractionConfig(patch_size=3, fat_depth=20, bins=32)


@pytest.fixture(scope="session")
def default_cohort():
    """30 normal (contrast 25) + 30 fatty (contrast 5) phantoms."""
    return generate_cohort(30, 30, 25.0, 5.0, seed=0)


@pytest.fixture(scope="session")
def default_cases(default_cohort):
    return cases_from_phantoms(default_cohort)


@pytest.fixture(scope="session")
def default_dataset(default_cases):
    ds, skipped, _ = build_dataset(default_cases, OPERATING_POINT)
    assert not skipped
    return ds


@pytest.fixture(scope="session")
def small_cases():
    """Eight normal + eight fatty phantoms for quick end-to-end checks."""
    return cases_from_phantoms(generate_cohort(8, 8, 25.0, 5.0, seed=1))


@pytest.fixture(scope="session")
def cohort_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cohort")
    generate_cohort(8, 8, 25.0, 5.0, seed=2, out_dir=out)
    return out


# acceptance criteria bookkeeping: one PASS/FAIL line per criterion in the terminal summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = getattr(item, "criterion_detail", "")
    _CRITERIA[number] = (title, "PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict, detail = _CRITERIA[number]
        line = f"criterion {number:>2} {verdict}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def note(request):
    """Attach a short measurement summary to the running criterion."""
    def record(text):
        request.node.criterion_detail = text
        print(f"criterion detail: {text}")
    return record
