"""One test per acceptance criterion; each prints a single [PASS]/[FAIL] line.

Suites live in smallheight.suites so the CLI `verify` command runs the same code.
Time limits are enforced inside each suite and count as failures.
"""

import pytest

from smallheight.suites import SUITES, run_suite

SEED = 0

CRITERIA = [
    ("product-formula", 1),
    ("height-sandwich", 2),
    ("duality", 3),
    ("siegel-rational", 4),
    ("siegel-function-field", 5),
    ("cube-fullrank", 6),
    ("cube-sublattice", 7),
    ("count", 8),
    ("count-lower", 9),
    ("count-f", 10),
    ("main", 11),
    ("corollary", 12),
    ("tightness", 13),
    ("grid-oracle", 14),
    ("twisted", 15),
]


def test_every_suite_is_listed():
    assert sorted(n for n, _ in CRITERIA) == sorted(SUITES)


@pytest.mark.parametrize("name,criterion", CRITERIA, ids=[n for n, _ in CRITERIA])
def test_criterion(name, criterion, capsys):
    r = run_suite(name, SEED)
    with capsys.disabled():
        print("\n" + r.line)
    assert r.criterion == criterion
    assert r.checks > 0
    assert r.passed, "\n".join(r.failures[:10])
