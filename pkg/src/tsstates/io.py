"""File ingestion: series CSVs, annotation CSVs, and bench manifests."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import Segmentation, TimeSeries, TsError, validate_series


class ParseError(TsError):
    pass


class RaggedRows(TsError):
    pass


class EmptyFile(TsError):
    pass


class NonMonotonicOffsets(TsError):
    pass


class MissingZeroOffset(TsError):
    pass


class AnnotationMismatch(TsError):
    pass


class ReportMismatch(TsError):
    pass


def _is_numeric_row(row: list) -> bool:
    try:
        for cell in row:
            float(cell)
        return True
    except ValueError:
        return False


def load_series(path, name: str | None = None) -> TimeSeries:
    """Load a CSV with one row per time step and one numeric column per channel.

    A single header row is auto-detected (first row non-numeric). Values are
    parsed as 64-bit floats.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    start = 0
    if not _is_numeric_row(rows[0]):
        start = 1
        if len(rows) == 1:
            raise EmptyFile(f"{path}: header only, no data rows")
    width = len(rows[start])
    data = np.empty((len(rows) - start, width))
    for i, row in enumerate(rows[start:], start=start):
        if len(row) != width:
            raise RaggedRows(f"{path}: line {i + 1} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            try:
                data[i - start, j] = float(cell)
            except ValueError:
                raise ParseError(f"{path}: line {i + 1}, column {j + 1}: "
                                 f"cannot parse {cell!r}") from None
    return validate_series(data, name=name or path.stem)


def load_annotation(path, n: int):
    """Load ground truth as a (Segmentation, per-segment labels) pair.

    Expects a two-column CSV with header ``offset,label``; one row per
    segment, giving its start offset (first row must be 0) and state label.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise EmptyFile(f"{path}: empty annotation file")
    if [c.strip().lower() for c in rows[0]] != ["offset", "label"]:
        raise ParseError(f"{path}: expected header 'offset,label', got {rows[0]!r}")
    offsets, labels = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"{path}: line {i}: expected two fields")
        try:
            offsets.append(int(row[0]))
            labels.append(int(row[1]))
        except ValueError:
            raise ParseError(f"{path}: line {i}: offsets and labels must be integers") from None
    if not offsets:
        raise EmptyFile(f"{path}: no segment rows")
    if offsets[0] != 0:
        raise MissingZeroOffset(f"{path}: first segment must start at offset 0")
    if any(b <= a for a, b in zip(offsets, offsets[1:])):
        raise NonMonotonicOffsets(f"{path}: offsets must be strictly increasing")
    if offsets[-1] >= n:
        raise AnnotationMismatch(f"{path}: offset {offsets[-1]} out of range for n = {n}")
    return Segmentation(cps=tuple(offsets[1:]), n=n), np.array(labels, dtype=np.int64)


def load_manifest(path) -> list:
    """Parse a manifest of ``series_path,annotation_path`` lines ('#' comments)."""
    path = Path(path)
    records = []
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise ParseError(f"{path}: line {i}: expected 'series_path,annotation_path'")
        records.append((parts[0], parts[1]))
    return records
