import re


def pytest_runtest_logreport(report):
    """Emit one uncaptured PASS/FAIL line per acceptance criterion."""
    if report.when != "call":
        return
    m = re.search(r"test_acceptance_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    num, name = int(m.group(1)), m.group(2)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {num} ({name}): {verdict}")
