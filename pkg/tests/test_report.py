#!/usr/bin/env pytest
"""Unit tests for check reports."""
from witt_windows.errors import NotInvertible
from witt_windows.report import Report


def sample_report():
    report = Report("frame B2", {"p": 3, "N": 5})
    report.check("pi-relation", True)
    report.check("pi-relation", True)
    report.check("f1-linear", True)
    report.check("f1-linear", False, "x = u")
    report.check("f1-linear", False, "x = 2")
    return report


def test_counts_and_first_counterexample():
    report = sample_report()
    assert report["pi-relation"].samples == 2
    assert report["pi-relation"].passed
    row = report["f1-linear"]
    assert (row.samples, row.failures, row.status) == (3, 2, "FAIL")
    assert row.counterexample == "x = u"
    assert not report.passed
    assert [r.check for r in report.failures()] == ["f1-linear"]
    assert "missing" not in report


def test_lazy_counterexample():
    calls = []

    def explain():
        calls.append(1)
        return "expensive"

    report = Report("lazy")
    report.check("a", True, explain)
    assert calls == []
    report.check("a", False, explain)
    assert report["a"].counterexample == "expensive"


def test_guard_turns_package_errors_into_failures():
    report = Report("guard")

    def boom():
        raise NotInvertible("3 is not a unit")

    assert report.guard("invert", lambda: True)
    assert not report.guard("invert", boom)
    assert report["invert"].failures == 1
    assert report["invert"].counterexample == "NotInvertible: 3 is not a unit"


def test_extend_with_prefix():
    report = Report("selftest")
    report.extend(sample_report(), "frames")
    report.extend(sample_report(), "frames")
    assert list(report.rows) == ["frames.pi-relation", "frames.f1-linear"]
    assert report["frames.f1-linear"].samples == 6
    assert report["frames.f1-linear"].failures == 4
    assert report["frames.f1-linear"].counterexample == "x = u"
    plain = Report("plain")
    plain.extend(sample_report())
    assert "pi-relation" in plain


def test_to_frame():
    df = sample_report().to_frame()
    assert list(df.columns) == ["check", "status", "samples", "failures", "counterexample"]
    assert df["status"].tolist() == ["PASS", "FAIL"]
    assert df["samples"].sum() == 5
    assert Report("empty").to_frame().empty


def test_render():
    text = sample_report().render()
    lines = text.splitlines()
    assert lines[:3] == ["# frame B2", "# N: 5", "# p: 3"]
    assert lines[-3:] == [
        "RESULT pi-relation PASS",
        "RESULT f1-linear FAIL",
        "RESULT overall FAIL",
    ]
    assert text.endswith("\n")


def test_render_empty_report_passes():
    assert Report("nothing").render() == "# nothing\nRESULT overall PASS\n"
