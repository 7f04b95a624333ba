"""Shared store for the per-criterion PASS/FAIL lines printed after the run."""
LINES: dict[int, str] = {}


def record(number: int, title: str, passed: bool, detail: str) -> None:
    LINES[number] = f"{'PASS' if passed else 'FAIL'} [{number:2d}] {title}: {detail}"
    print(LINES[number])
