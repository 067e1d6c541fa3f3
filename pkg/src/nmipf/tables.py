"""Contingency tables, margin targets and the aggregation utilities used by
both transformation engines.

Rows are husbands (or the first classification), columns are wives. The last
row and the last column are the "High" category, so the H,H cell of a 2x2
table is ``cells[1, 1]``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    CutOutOfBoundsError,
    DimensionError,
    InvalidTableError,
    InvalidTargetsError,
)

#: relative tolerance for the equality of row and column grand totals
TOTAL_RTOL = 1e-9

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


def _frozen(values, ndim):
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """An immutable ``n x m`` table of nonnegative masses.

    Construction only checks that the data is two dimensional; call
    :func:`validate` (or :func:`require_valid`) to check the remaining
    invariants. Labels are carried along as metadata and never enter any
    computation.
    """

    cells: np.ndarray
    row_labels: Optional[tuple] = None
    col_labels: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "cells", _frozen(self.cells, 2))
        n, m = self.cells.shape
        if self.row_labels is not None:
            labels = tuple(str(x) for x in self.row_labels)
            if len(labels) != n:
                raise DimensionError(f"{len(labels)} row labels for {n} rows")
            object.__setattr__(self, "row_labels", labels)
        if self.col_labels is not None:
            labels = tuple(str(x) for x in self.col_labels)
            if len(labels) != m:
                raise DimensionError(f"{len(labels)} column labels for {m} columns")
            object.__setattr__(self, "col_labels", labels)

    @property
    def shape(self):
        return self.cells.shape

    @property
    def n_rows(self) -> int:
        return self.cells.shape[0]

    @property
    def n_cols(self) -> int:
        return self.cells.shape[1]

    @property
    def total(self) -> float:
        return float(self.cells.sum())

    def with_cells(self, cells) -> "ContingencyTable":
        """Return a table with new cells and the same labels."""
        return ContingencyTable(cells, self.row_labels, self.col_labels)

    def __eq__(self, other):
        if not isinstance(other, ContingencyTable):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.shape, self.cells.tobytes()))

    def __repr__(self):
        return f"ContingencyTable({self.cells.tolist()!r})"


def as_table(obj) -> ContingencyTable:
    """Coerce an array-like or table to a :class:`ContingencyTable`."""
    if isinstance(obj, ContingencyTable):
        return obj
    return ContingencyTable(obj)


@dataclass(frozen=True, eq=False)
class MarginTargets:
    """Target row totals and column totals with a common grand total."""

    row_totals: np.ndarray
    col_totals: np.ndarray

    def __post_init__(self):
        rows = _frozen(self.row_totals, 1)
        cols = _frozen(self.col_totals, 1)
        if not (np.all(np.isfinite(rows)) and np.all(np.isfinite(cols))):
            raise InvalidTargetsError("margin targets must be finite")
        if np.any(rows < 0) or np.any(cols < 0):
            raise InvalidTargetsError("margin targets must be nonnegative")
        r, c = float(rows.sum()), float(cols.sum())
        if not math.isclose(r, c, rel_tol=TOTAL_RTOL, abs_tol=0.0):
            raise InvalidTargetsError(
                f"row totals sum to {r!r} but column totals sum to {c!r}"
            )
        object.__setattr__(self, "row_totals", rows)
        object.__setattr__(self, "col_totals", cols)

    @property
    def shape(self):
        return (self.row_totals.size, self.col_totals.size)

    @property
    def total(self) -> float:
        return float(self.row_totals.sum())

    def __eq__(self, other):
        if not isinstance(other, MarginTargets):
            return NotImplemented
        return bool(
            np.array_equal(self.row_totals, other.row_totals)
            and np.array_equal(self.col_totals, other.col_totals)
        )

    def __repr__(self):
        return (
            f"MarginTargets(rows={self.row_totals.tolist()!r}, "
            f"cols={self.col_totals.tolist()!r})"
        )


@dataclass(frozen=True)
class AggregationCut:
    """Split after the first ``i`` rows and the first ``j`` columns (1-based)."""

    i: int
    j: int

    def check(self, shape):
        n, m = shape
        if not (1 <= self.i <= n - 1 and 1 <= self.j <= m - 1):
            raise CutOutOfBoundsError(
                f"cut ({self.i}, {self.j}) outside [1, {n - 1}] x [1, {m - 1}]"
            )


def validate(table) -> list[str]:
    """List every invariant the table violates; an empty list means valid."""
    cells = table.cells if isinstance(table, ContingencyTable) else np.asarray(table, dtype=float)
    problems = []
    if cells.ndim != 2:
        return [f"table must be two dimensional, got shape {cells.shape}"]
    n, m = cells.shape
    if n < 2 or m < 2:
        problems.append(f"table must be at least 2x2, got {n}x{m}")
    if not np.all(np.isfinite(cells)):
        problems.append("table contains non-finite cells")
    neg = np.argwhere(cells < 0)
    if neg.size:
        r, c = neg[0]
        problems.append(
            f"negative cell at ({r}, {c}) = {cells[r, c]!r}"
            + (f" and {len(neg) - 1} more" if len(neg) > 1 else "")
        )
    if np.all(np.isfinite(cells)) and not cells.sum() > 0:
        problems.append("grand total must be positive")
    return problems


def require_valid(table) -> ContingencyTable:
    """Return the table if valid, raise :class:`InvalidTableError` otherwise."""
    table = as_table(table)
    problems = validate(table)
    if problems:
        raise InvalidTableError("; ".join(problems))
    return table


def margins(table) -> MarginTargets:
    """Row and column totals of a table."""
    table = require_valid(table)
    return MarginTargets(table.cells.sum(axis=1), table.cells.sum(axis=0))


def check_compatible(table: ContingencyTable, targets: MarginTargets):
    if table.shape != targets.shape:
        raise DimensionError(
            f"table is {table.shape[0]}x{table.shape[1]} but targets are "
            f"{targets.shape[0]}x{targets.shape[1]}"
        )


def aggregate_2x2(table, cut: AggregationCut) -> ContingencyTable:
    """Collapse a table to 2x2 at ``cut``: ``V_i Z W_j^T``.

    Cell ``[0, 0]`` sums rows ``< i`` and columns ``< j`` (0-based), cell
    ``[1, 1]`` (the H,H cell) sums the block strictly below and to the right
    of the cut.
    """
    table = require_valid(table)
    cut.check(table.shape)
    z = table.cells
    i, j = cut.i, cut.j
    out = np.array(
        [
            [z[:i, :j].sum(), z[:i, j:].sum()],
            [z[i:, :j].sum(), z[i:, j:].sum()],
        ]
    )
    return ContingencyTable(out)


def cuts(shape) -> Iterable[AggregationCut]:
    """All aggregation cuts of a table of the given shape, row-major."""
    n, m = shape
    for i in range(1, n):
        for j in range(1, m):
            yield AggregationCut(i, j)


def margin_ratios(table, numerator_rows, denominator_cols, transpose=False) -> float:
    """Ratio of selected row-margin mass to selected column-margin mass.

    Indices are 0-based. With ``transpose=True`` the numerator indices select
    column margins and the denominator indices select row margins, e.g. the
    number of high-educated wives over low-educated husbands.
    """
    t = margins(table)
    num_src, den_src = (t.col_totals, t.row_totals) if transpose else (t.row_totals, t.col_totals)
    num_idx, den_idx = list(numerator_rows), list(denominator_cols)
    if not num_idx or not den_idx:
        raise ValueError("index sets must be nonempty")
    den = float(den_src[den_idx].sum())
    if den == 0:
        raise ZeroDivisionError("denominator margin sum is zero")
    return float(num_src[num_idx].sum()) / den


# -- CSV -------------------------------------------------------------------


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


class CsvFormatError(InvalidTableError):
    """A CSV field could not be parsed; carries 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        loc = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{loc}: {message}" if line is not None else message)
        self.line = line
        self.column = column


def parse_csv(text: str) -> ContingencyTable:
    """Parse a table from CSV text.

    If the top-left field is non-numeric the first row is taken as column
    labels and the first column as row labels. Lines starting with ``#`` and
    blank lines are skipped.
    """
    rows = [
        r
        for r in csv.reader(io.StringIO(text))
        if any(f.strip() for f in r) and not r[0].lstrip().startswith("#")
    ]
    if not rows:
        raise CsvFormatError("empty table")
    labelled = not _is_number(rows[0][0].strip())
    col_labels = row_labels = None
    first_line = 1
    if labelled:
        col_labels = [f.strip() for f in rows[0][1:]]
        rows = rows[1:]
        first_line = 2
        row_labels = [r[0].strip() for r in rows]
    data = []
    width = None
    for k, row in enumerate(rows):
        fields = row[1:] if labelled else row
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise CsvFormatError(f"expected {width} values, got {len(fields)}", line=first_line + k)
        values = []
        for c, f in enumerate(fields):
            try:
                v = float(f)
            except ValueError:
                raise CsvFormatError(
                    f"cannot parse {f.strip()!r} as a number",
                    line=first_line + k,
                    column=c + 1 + (1 if labelled else 0),
                ) from None
            if not math.isfinite(v) or v < 0:
                raise CsvFormatError(
                    f"{f.strip()!r} is not a nonnegative decimal",
                    line=first_line + k,
                    column=c + 1 + (1 if labelled else 0),
                )
            values.append(v)
        data.append(values)
    if col_labels is not None and len(col_labels) != width:
        raise CsvFormatError(f"{len(col_labels)} column labels for {width} columns", line=1)
    return ContingencyTable(np.array(data, dtype=float), row_labels, col_labels)


def read_csv(path) -> ContingencyTable:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())


def format_number(x: float, digits: int = 12) -> str:
    return f"{float(x):.{digits}g}"


def to_csv(table: ContingencyTable, digits: int = 12, round_to_int: bool = False) -> str:
    """Serialize a table; labels are written when present."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    labelled = table.row_labels is not None or table.col_labels is not None
    n, m = table.shape
    if labelled:
        cols = table.col_labels or tuple(f"c{j + 1}" for j in range(m))
        w.writerow([""] + list(cols))
    rows = table.row_labels or tuple(f"r{i + 1}" for i in range(n))
    for i in range(n):
        vals = [
            str(int(round(v))) if round_to_int else format_number(v, digits)
            for v in table.cells[i]
        ]
        w.writerow(([rows[i]] if labelled else []) + vals)
    return buf.getvalue()
