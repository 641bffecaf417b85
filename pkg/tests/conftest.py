import pytest
from hypothesis import HealthCheck, settings

from dissem.graphs import GraphSequence, make_graph

settings.register_profile(
    "default", deadline=None, max_examples=100, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIG1_EDGES = (
    [(5, 3), (5, 2), (2, 4), (4, 1)],
    [(1, 3), (3, 2), (3, 4), (3, 5)],
    [(2, 3), (2, 1), (1, 4), (3, 5)],
)

# K_p(r) as printed under the example figure, r = 1, 2, 3
FIG1_KNOWLEDGE = {
    1: {1: "14", 2: "25", 3: "35", 4: "24", 5: "5"},
    2: {1: "14", 2: "235", 3: "1345", 4: "2345", 5: "35"},
    3: {1: "12345", 2: "235", 3: "12345", 4: "12345", 5: "1345"},
}


@pytest.fixture
def fig1():
    return GraphSequence(5, tuple(make_graph(5, e) for e in FIG1_EDGES))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(results):
        ok, detail = results[criterion]
        terminalreporter.write_line(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")
