#!/usr/bin/env pytest
"""Tests for the seeded acceptance suite."""
from unittest import mock

import numpy as np
import pytest

from witt_windows import selftest
from witt_windows.errors import NotInvertible
from witt_windows.report import Report
from witt_windows.selftest import CRITERIA, TIERS, run_selftest


def test_smoke_tier_passes():
    report = run_selftest(seed=1, tier="smoke")
    assert report.passed, report.render()
    prefixes = {name.split(".", 1)[0] for name in report.rows}
    assert prefixes == {name for name, _ in CRITERIA} | {"determinism"}
    assert report.render().endswith("RESULT overall PASS\n")


def test_smoke_tier_is_deterministic():
    assert run_selftest(3, "smoke").render() == run_selftest(3, "smoke").render()


@pytest.mark.slow
def test_small_tier_passes():
    report = run_selftest(seed=2, tier="small")
    assert report.passed, report.render()


def test_unknown_tier():
    with pytest.raises(ValueError):
        run_selftest(1, "huge")


def test_aborted_criterion_is_a_failure():
    def explode(size, rng):
        raise NotInvertible("no unit")

    with mock.patch.object(selftest, "CRITERIA", [("witt", explode)]):
        report = run_selftest(1, "smoke")
    assert not report.passed
    assert report["witt.runs"].counterexample == "NotInvertible: no unit"
    assert report["determinism"].passed


def test_determinism_covers_every_criterion():
    calls = iter(range(10))

    def drifting(size, rng):
        report = Report("drift")
        report.check(f"call-{next(calls)}", True, "")
        return report

    with mock.patch.object(selftest, "CRITERIA", [("witt", selftest.witt_soundness), ("drift", drifting)]):
        report = run_selftest(1, "smoke")
    assert "drift.call-0" in report
    assert report["witt.ghost-additive"].passed
    assert not report["determinism"].passed
    assert report.render().endswith("RESULT overall FAIL\n")


def test_witt_criterion():
    report = selftest.witt_soundness(TIERS["smoke"], np.random.default_rng(0))
    assert report.passed, report.render()
    assert report["ghost-additive"].samples == 2 * 2 * 2 * TIERS["smoke"].witt_pairs
