"""Association and divergence measures for contingency tables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateMarginError,
    DimensionError,
    NegativeAssociationError,
    SupportError,
    ZeroCellError,
)
from .tables import (
    AggregationCut,
    ContingencyTable,
    MarginTargets,
    aggregate_2x2,
    cuts,
    require_valid,
)

# values within this relative distance of an integer are snapped to it before
# flooring, so that 559.9999999999999 computed from exact margins floors to 560
_SNAP_RTOL = 1e-9


def int_part(x: float) -> int:
    """The ``int(.)`` convention for expected H,H counts: floor.

    Floating-point noise just below an integer is snapped up first.
    """
    r = round(x)
    if abs(x - r) <= _SNAP_RTOL * max(1.0, abs(x)):
        return int(r)
    return math.floor(x)


def _require_2x2(table: ContingencyTable):
    if table.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 table, got {table.shape[0]}x{table.shape[1]}")


def odds_ratio(table) -> float:
    """Cross-product ratio ``(c11 c22) / (c12 c21)`` of a 2x2 table."""
    table = require_valid(table)
    _require_2x2(table)
    (a, b), (c, d) = table.cells
    if min(a, b, c, d) <= 0:
        raise ZeroCellError("odds-ratio is undefined for tables with a zero cell")
    return (a * d) / (b * c)


def local_odds_ratios(table) -> np.ndarray:
    """Odds-ratios of all adjacent 2x2 subtables, NaN where a cell is zero."""
    z = require_valid(table).cells
    num = z[:-1, :-1] * z[1:, 1:]
    den = z[:-1, 1:] * z[1:, :-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where((num > 0) & (den > 0), num / np.where(den > 0, den, 1.0), np.nan)
    return out


def expected_hh(targets: MarginTargets) -> int:
    """``int(R)`` with ``R = N_H. N_.H / N`` for 2x2 margins."""
    if targets.shape != (2, 2):
        raise DimensionError("expected_hh needs margins of a 2x2 table")
    n = targets.total
    if not n > 0:
        raise ValueError("grand total must be positive")
    return _int_r(targets.row_totals[1], targets.col_totals[1], n)


def _int_r(row_h: float, col_h: float, n: float) -> int:
    vals = (row_h, col_h, n)
    if all(float(v).is_integer() for v in vals):
        return (int(row_h) * int(col_h)) // int(n)
    return int_part(row_h * col_h / n)


@dataclass(frozen=True)
class LLValue:
    """Liu-Lu degree of sorting for one 2x2 table.

    ``value = numerator / denominator`` where the numerator is
    ``N_HH - int(R)`` and the denominator ``min(N_H., N_.H) - int(R)``.
    """

    value: float
    numerator: float
    denominator: float
    expected_hh: int


def _liu_lu_cells(cells: np.ndarray, cut=None) -> LLValue:
    row_h = float(cells[1, 0] + cells[1, 1])
    col_h = float(cells[0, 1] + cells[1, 1])
    n = float(cells.sum())
    int_r = _int_r(row_h, col_h, n)
    hh = float(cells[1, 1])
    where = f" at cut ({cut.i}, {cut.j})" if cut is not None else ""
    # hh is compared after snapping so 719.9999999999999 >= 720 holds
    if hh < int_r and not abs(hh - int_r) <= _SNAP_RTOL * max(1.0, hh):
        raise NegativeAssociationError(
            f"H,H cell {hh!r} is below int(R) = {int_r}{where}", cut=cut
        )
    denominator = min(row_h, col_h) - int_r
    if not denominator > 0:
        raise DegenerateMarginError(
            f"min(N_H., N_.H) - int(R) = {denominator!r} is not positive{where}", cut=cut
        )
    numerator = max(hh - int_r, 0.0)
    return LLValue(numerator / denominator, numerator, float(denominator), int_r)


def liu_lu(table) -> LLValue:
    """Liu-Lu indicator of a 2x2 table (H,H is the bottom-right cell)."""
    table = require_valid(table)
    _require_2x2(table)
    return _liu_lu_cells(table.cells)


@dataclass(frozen=True)
class LLMatrix:
    """Generalized Liu-Lu values, ``values[i-1][j-1]`` for cut ``(i, j)``."""

    values: tuple

    @property
    def shape(self):
        return (len(self.values), len(self.values[0]))

    def __getitem__(self, cut) -> LLValue:
        if isinstance(cut, AggregationCut):
            return self.values[cut.i - 1][cut.j - 1]
        i, j = cut
        return self.values[i][j]

    def as_array(self) -> np.ndarray:
        return np.array([[v.value for v in row] for row in self.values])


def liu_lu_generalized(table) -> LLMatrix:
    """Matrix-valued Liu-Lu indicator over every aggregation cut."""
    table = require_valid(table)
    n, m = table.shape
    rows = [[None] * (m - 1) for _ in range(n - 1)]
    for cut in cuts(table.shape):
        agg = aggregate_2x2(table, cut).cells
        rows[cut.i - 1][cut.j - 1] = _liu_lu_cells(agg, cut=cut)
    return LLMatrix(tuple(tuple(r) for r in rows))


def kl_divergence(p, q, normalize: bool = False) -> float:
    """Directed divergence ``sum p ln(p / q)`` with ``0 ln 0 = 0``.

    Without ``normalize`` both inputs must already sum to one within 1e-9.
    """
    p_cells = np.asarray(p.cells if isinstance(p, ContingencyTable) else p, dtype=float)
    q_cells = np.asarray(q.cells if isinstance(q, ContingencyTable) else q, dtype=float)
    if p_cells.shape != q_cells.shape:
        raise DimensionError(f"shapes differ: {p_cells.shape} vs {q_cells.shape}")
    if np.any(p_cells < 0) or np.any(q_cells < 0):
        raise ValueError("distributions must be nonnegative")
    if normalize:
        p_cells = p_cells / p_cells.sum()
        q_cells = q_cells / q_cells.sum()
    else:
        for name, arr in (("p", p_cells), ("q", q_cells)):
            if abs(arr.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} sums to {arr.sum()!r}, not 1; pass normalize=True")
    support = p_cells > 0
    if np.any(support & (q_cells == 0)):
        raise SupportError("p has mass where q is zero")
    ps, qs = p_cells[support], q_cells[support]
    return max(0.0, float(np.sum(ps * np.log(ps / qs))))


__all__ = [
    "LLMatrix",
    "LLValue",
    "expected_hh",
    "int_part",
    "kl_divergence",
    "liu_lu",
    "liu_lu_generalized",
    "local_odds_ratios",
    "odds_ratio",
]
