#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Utility functions."""

from logging import getLogger
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .ring import resolve_truncation


log = getLogger("witt-windows")


def _split(value: Any) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value]
    text = str(value).strip()
    if not text:
        return []
    return [part.strip() for part in text.split(",")]


def convert_value(dtype: str, value: Any) -> Any:
    """Convert ``value`` to the declared ``dtype``.

    Supported types are ``int``, ``float``, ``str``, ``intlist`` (``"1,2"``)
    and ``trunclist`` (``"2,inf"``, where ``inf`` maps to the working bound).
    ``None`` passes through unchanged.
    """
    if value is None:
        return None
    if dtype == "int":
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise TypeError(f"expected an integer, got {value!r}")
        return int(value)
    if dtype == "float":
        if not isinstance(value, (int, float, str)):
            raise TypeError(f"expected a number, got {value!r}")
        return float(value)
    if dtype == "intlist":
        return tuple(int(v) for v in _split(value))
    if dtype == "trunclist":
        return tuple(resolve_truncation(v) for v in _split(value))
    if dtype == "str":
        return str(value).strip()
    raise ValueError(f"unknown dtype {dtype!r}")


def parse_row(
    column_names: Sequence[str], dtypes: Sequence[str], row: Sequence[Any]
) -> Optional[Dict[str, Any]]:
    """Parse a row of raw values into a typed mapping.

    Returns ``None`` when an ``int`` column holds ``None``; raises ``ValueError``
    or ``TypeError`` when a value cannot be converted.
    """
    entry: Dict[str, Any] = {}
    for i, key in enumerate(column_names):
        dtype = dtypes[i]
        if dtype == "int" and row[i] is None:
            log.warning(f"configuration key {key!r} has no value")
            return None
        entry[key] = convert_value(dtype, row[i])
    return entry


def read_key_values(text: str) -> Iterator[Tuple[int, str, str]]:
    """Yield ``(line number, key, value)`` from ``key = value`` text.

    Blank lines and ``#`` comments are skipped. Lines without ``=`` raise
    ``ValueError`` naming the line.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        yield lineno, key.strip(), value.strip()
