import json

import pytest

import ctgs

WORKED_EDGES = [[0, 1], [0, 3], [0, 4], [1, 2], [1, 3], [2, 3], [2, 4]]
WORKED_B = [5, 5, 1, 4, 4]
WORKED_C = [9, 2, 5, "inf", "inf"]


@pytest.fixture(scope="session")
def worked_graph():
    return ctgs.GraphModel.create(5, WORKED_EDGES)


@pytest.fixture(scope="session")
def worked_spectrum(worked_graph):
    return ctgs.eigendecompose(ctgs.build_shift_operator(worked_graph, "laplacian"))


@pytest.fixture(scope="session")
def worked_profile():
    return ctgs.BandwidthProfile.create(WORKED_B, WORKED_C)


@pytest.fixture(scope="session")
def worked_bundle(worked_spectrum, worked_profile):
    """(certificate, finitized profile, filtration, sequence, plan)."""
    return ctgs.plan_problem(worked_spectrum, worked_profile)


@pytest.fixture(scope="session")
def two_path_spectrum():
    graph = ctgs.GraphModel.create(2, [[0, 1]])
    return ctgs.eigendecompose(ctgs.build_shift_operator(graph, "laplacian"))


@pytest.fixture()
def worked_problem_file(tmp_path):
    doc = {
        "n": 5,
        "edges": WORKED_EDGES,
        "B": WORKED_B,
        "C": WORKED_C,
        "options": {"mode": "periodic", "period": 1, "seed": 1, "v_star": [1, 2, 3]},
    }
    path = tmp_path / "worked.json"
    path.write_text(json.dumps(doc))
    return str(path)


# --- acceptance summary ----------------------------------------------------

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        outcome = _ACCEPTANCE[name]
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
