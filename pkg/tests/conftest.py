import re

_CRITERIA = {
    1: "gradient correctness (finite differences)",
    2: "oracle equivalence (louvain / partition / stages)",
    3: "sum-up identity recovery",
    4: "stage structure on end-to-end runs",
    5: "degree-distribution convergence",
    6: "hub preservation in stage 1",
    7: "sampling comparison harness",
    8: "rerun determinism",
}

_results: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    outcome = report.outcome.upper()
    if num in _results and _results[num] == "FAILED":
        return
    _results[num] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for num in sorted(_CRITERIA):
        if num not in _results:
            continue
        status = "PASS" if _results[num] == "PASSED" else _results[num]
        terminalreporter.write_line(f"criterion {num}: {status} - {_CRITERIA[num]}")
