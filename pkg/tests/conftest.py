import re

import pytest

_VERDICTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_VERDICTS] = {}


@pytest.fixture
def verdict(request):
    """Records one PASS/FAIL line for an acceptance criterion named test_criterion_NN_*."""
    number = int(re.match(r"test_criterion_(\d+)", request.node.originalname).group(1))
    store = request.config.stash[_VERDICTS]
    title = (request.node.function.__doc__ or "").strip().splitlines()[0]

    def record(ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        store[number] = line
        print(line)
        return ok

    yield record
    if number not in store:
        store[number] = f"criterion {number:2d} FAIL  {title}  [error before verdict]"


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_VERDICTS, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for number in sorted(store):
            terminalreporter.write_line(store[number])
