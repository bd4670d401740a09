import pytest

ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, ok, detail)``; the terminal summary lists every criterion."""

    def record(n: int, title: str, ok: bool, detail: str):
        ACCEPTANCE[n] = (title, bool(ok), detail)
        print(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}: {detail}")
    passed = sum(ok for _, ok, _ in ACCEPTANCE.values())
    terminalreporter.write_line(f"{passed}/{len(ACCEPTANCE)} criteria pass")
