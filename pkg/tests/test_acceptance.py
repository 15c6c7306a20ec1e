"""Acceptance suite: every criterion at its stated tolerance and time budget.

Run directly (``python tests/test_acceptance.py``) for the PASS/FAIL table,
or through pytest, which prints the same table in its terminal summary.
"""

import dataclasses
import sys

import pytest

from gaussian_littlewood import acceptance, cli

ACCEPTANCE_LINES = []
NUMBERS = [num for num, *_ in acceptance.CRITERIA]


@pytest.fixture(scope="module")
def selftest_runs(tmp_path_factory):
    """Run the full selftest twice with the same seed into separate directories."""
    dirs = [tmp_path_factory.mktemp(f"selftest{i}") for i in range(2)]
    results = acceptance.run_all(acceptance.DEFAULT_SEED, outdir=dirs[0], echo=None)
    acceptance.run_all(acceptance.DEFAULT_SEED, outdir=dirs[1], echo=None)
    return {r.number: r for r in results}, dirs


@pytest.mark.parametrize("number", [n for n in NUMBERS if n != 15])
def test_criterion(selftest_runs, number):
    results, _ = selftest_runs
    res = results[number]
    ACCEPTANCE_LINES.append(res.line())
    assert res.passed, f"criterion {number} ({res.name}) failed: {res.details}"
    assert res.in_budget, f"criterion {number} took {res.seconds:.1f}s (budget {res.budget:g}s)"


def test_criterion_15_selftest_replay(selftest_runs):
    results, dirs = selftest_runs
    names = sorted(p.name for p in dirs[0].iterdir())
    identical = names == sorted(p.name for p in dirs[1].iterdir()) and all(
        (dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names
    )
    res = dataclasses.replace(results[15], passed=results[15].passed and identical and bool(names))
    ACCEPTANCE_LINES.append(res.line())
    assert identical, f"selftest artifacts differ between runs: {names}"
    assert res.passed and res.in_budget


def main():
    code = cli.main(["selftest", "--outdir", "selftest-artifacts"])
    sys.exit(code)


if __name__ == "__main__":
    main()
