import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE: list[tuple[str, bool, str]] = []


def record_acceptance(cid: str, passed: bool, detail: str) -> None:
    line = f"{cid:<4} {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    _ACCEPTANCE.append((cid, passed, line))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    order = {f"A{i}": i for i in range(1, 13)}
    for _, _, line in sorted(_ACCEPTANCE, key=lambda r: order.get(r[0], 99)):
        terminalreporter.write_line(line)
    n_pass = sum(p for _, p, _ in _ACCEPTANCE)
    terminalreporter.write_line(f"{n_pass}/{len(_ACCEPTANCE)} criteria passed")
