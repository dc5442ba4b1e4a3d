"""Collects the one-line criterion verdicts printed after the test run."""

LINES = []


def report(tag: str, ok: bool, detail: str) -> bool:
    line = f"criterion {tag:<3} {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    return ok


def note(tag: str, detail: str) -> None:
    line = f"diagnostic {tag:<2} ----  {detail}"
    LINES.append(line)
    print(line)
