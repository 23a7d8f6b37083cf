import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
    if mod.AUDIT_REPORT:
        terminalreporter.write_line("")
        terminalreporter.write_line("F+(2^j) audit:")
        for r in mod.AUDIT_REPORT:
            for ln in r.splitlines():
                terminalreporter.write_line(ln)
