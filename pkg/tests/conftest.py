import pytest

from reviewgen.lexicon import default_lexicon
from reviewgen.parsing import segment_sentences
from reviewgen.pipeline import PipelineConfig, bundled, run_all

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    if rep.when == "setup" and rep.passed:
        return
    state = "PASS" if rep.passed else "FAIL"
    prev = _criteria.get(number)
    if prev is None or prev[1] == "PASS":
        _criteria[number] = (title, state)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, state = _criteria[number]
        terminalreporter.write_line(f"AC{number:>2} {state}  {title}")


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def minicorpus_path():
    return bundled("minicorpus.jsonl")


@pytest.fixture(scope="session")
def minicorpus_sentences(minicorpus_path):
    import json
    out = []
    for line in minicorpus_path.read_text(encoding="utf-8").splitlines():
        out.extend(segment_sentences(json.loads(line)["text"]))
    return out


@pytest.fixture(scope="session")
def pipeline_out(tmp_path_factory):
    """A full default pipeline run over the bundled corpus."""
    out = tmp_path_factory.mktemp("pipeline")
    run_all(PipelineConfig(out=out))
    return out
