"""Check reports."""

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Callable, Dict, List, Optional, Union

import pandas as pd

from .errors import WittWindowsError


log = getLogger("witt-windows")

Counterexample = Union[str, Callable[[], str]]


@dataclass
class CheckRow:
    """Aggregated outcome of one named check."""

    check: str
    samples: int = 0
    failures: int = 0
    counterexample: str = ""

    @property
    def passed(self) -> bool:
        """True when no sample failed."""
        return self.failures == 0

    @property
    def status(self) -> str:
        """``PASS`` or ``FAIL``."""
        return "PASS" if self.passed else "FAIL"


@dataclass
class Report:
    """An ordered collection of named checks.

    Every call to :meth:`check` counts one sample of the named check. The
    first failing sample's counterexample is kept for rendering.

    Parameters
    ----------
    title : str
        First line of the rendered report.
    header : dict, optional
        Job parameters printed under the title (seed, ring, frame, ...).
    """

    title: str
    header: Dict[str, Any] = field(default_factory=dict)
    rows: Dict[str, CheckRow] = field(default_factory=dict)

    def check(self, name: str, ok: bool, counterexample: Counterexample = "") -> bool:
        """Record one sample of check ``name``; returns ``ok``."""
        row = self.rows.setdefault(name, CheckRow(name))
        row.samples += 1
        if not ok:
            row.failures += 1
            if not row.counterexample:
                row.counterexample = counterexample() if callable(counterexample) else counterexample
                log.info(f"check {name} failed: {row.counterexample}")
        return ok

    def guard(self, name: str, fn: Callable[[], bool], counterexample: Counterexample = "") -> bool:
        """Run ``fn`` as one sample of ``name``; package errors count as failures."""
        try:
            ok = bool(fn())
        except WittWindowsError as e:
            return self.check(name, False, f"{type(e).__name__}: {e}")
        return self.check(name, ok, counterexample)

    def extend(self, other: "Report", prefix: Optional[str] = None):
        """Merge the rows of another report, optionally prefixing their names."""
        for row in other.rows.values():
            name = f"{prefix}.{row.check}" if prefix else row.check
            mine = self.rows.setdefault(name, CheckRow(name))
            mine.samples += row.samples
            mine.failures += row.failures
            if row.counterexample and not mine.counterexample:
                mine.counterexample = row.counterexample

    @property
    def passed(self) -> bool:
        """True when every check passed."""
        return all(row.passed for row in self.rows.values())

    def failures(self) -> List[CheckRow]:
        """Rows with at least one failing sample."""
        return [row for row in self.rows.values() if not row.passed]

    def __getitem__(self, name: str) -> CheckRow:
        return self.rows[name]

    def __contains__(self, name: str) -> bool:
        return name in self.rows

    def to_frame(self) -> pd.DataFrame:
        """The checks as a data frame, one row per check."""
        records = [
            {
                "check": row.check,
                "status": row.status,
                "samples": row.samples,
                "failures": row.failures,
                "counterexample": row.counterexample,
            }
            for row in self.rows.values()
        ]
        return pd.DataFrame.from_records(
            records, columns=["check", "status", "samples", "failures", "counterexample"]
        )

    def render(self) -> str:
        """Canonical text form: title, header, table, then one ``RESULT`` line per check."""
        lines = [f"# {self.title}"]
        for key in sorted(self.header):
            lines.append(f"# {key}: {self.header[key]}")
        if self.rows:
            lines.append(self.to_frame().to_string(index=False))
        for row in self.rows.values():
            lines.append(f"RESULT {row.check} {row.status}")
        lines.append(f"RESULT overall {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"
