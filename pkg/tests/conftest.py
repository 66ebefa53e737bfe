import numpy as np
import pytest
from hypothesis import settings

from specmerge.corpus import SimilarityMatrix
from specmerge.evalx import GroupSpec, SyntheticSpec, generate_synthetic_corpus

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_acceptance: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(tag, text): exit criterion, reported in the summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    tag = getattr(report, "_acceptance", None)
    if tag is not None:
        param = report.nodeid.partition("[")[2].rstrip("]")
        text = f"{tag[1]} [{param}]" if param else tag[1]
        _acceptance.append((tag[0], text, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        report._acceptance = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for tag, text, outcome in sorted(_acceptance):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {tag}: {text}")


def random_similarity(rng: np.random.Generator, n: int, density: float = 0.6) -> SimilarityMatrix:
    a = rng.random((n, n)) * (rng.random((n, n)) < density)
    a = np.triu(a, 1)
    return SimilarityMatrix(a + a.T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_corpus():
    groups = tuple(
        GroupSpec(g.name, g.vocab_size, 90, g.min_tokens, g.max_tokens, g.zipf) for g in SyntheticSpec().groups
    )
    return generate_synthetic_corpus(SyntheticSpec(groups=groups, overlap=0.1, seed=5))
