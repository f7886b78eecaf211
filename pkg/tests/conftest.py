import pytest

# acceptance results, filled by tests/test_acceptance.py
VERDICTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(VERDICTS):
        ok, detail = VERDICTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def verdict():
    def record(num: int, ok: bool, detail: str) -> bool:
        VERDICTS[num] = (bool(ok), detail)
        print(f"\ncriterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)

    return record
