"""The NM method: move a table to new margins while keeping its Liu-Lu
indicator fixed at every aggregation cut.

Each cut ``(i, j)`` collapses the problem to a 2x2 one whose H,H cell has a
closed-form solution. Those solutions are the tail sums
``T(i, j) = sum(out[r, c] for r >= i, c >= j)`` (0-based ``r``, ``c``); together
with the target margins on the border of the ``T`` grid they pin down every
cell by inclusion-exclusion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginError, DimensionError, InfeasibleError
from .indicators import LLValue, _int_r, liu_lu_generalized
from .ipf import TransformResult, margin_residual
from .tables import (
    AggregationCut,
    MarginTargets,
    check_compatible,
    require_valid,
)

# reconstructed cells in (-_NEG_RTOL * total, 0) are rounding noise, set to 0
_NEG_RTOL = 1e-12


@dataclass(frozen=True)
class NmSubproblem:
    """One 2x2 problem of the generalized construction."""

    cut: AggregationCut
    source_ll: LLValue
    target_expected_hh: int
    target_min_margin: float
    tail_sum: float


def solve_hh(source_ll: LLValue, row_h: float, col_h: float, total: float):
    """H,H cell of the 2x2 table with the given H margins and LL value.

    Returns ``(hh, int_r, min_margin)`` for the target margins.
    """
    int_r = _int_r(row_h, col_h, total)
    top = min(row_h, col_h)
    if not top - int_r > 0:
        raise DegenerateMarginError(
            f"target min(N_H., N_.H) - int(R) = {top - int_r!r} is not positive"
        )
    hh = source_ll.numerator * (top - int_r) / source_ll.denominator + int_r
    return hh, int_r, top


def nm_subproblems(source, targets: MarginTargets) -> list[NmSubproblem]:
    """Solve the 2x2 problem at every cut, in row-major cut order."""
    source = require_valid(source)
    check_compatible(source, targets)
    ll = liu_lu_generalized(source)
    rows, cols = targets.row_totals, targets.col_totals
    total = float(rows.sum())
    row_tail = np.cumsum(rows[::-1])[::-1]  # row_tail[i] = sum(rows[i:])
    col_tail = np.cumsum(cols[::-1])[::-1]
    out = []
    n, m = source.shape
    for i in range(1, n):
        for j in range(1, m):
            cut = AggregationCut(i, j)
            try:
                hh, int_r, top = solve_hh(ll[cut], row_tail[i], col_tail[j], total)
            except DegenerateMarginError as exc:
                raise DegenerateMarginError(f"{exc} at cut ({i}, {j})", cut=cut) from None
            out.append(NmSubproblem(cut, ll[cut], int_r, float(top), float(hh)))
    return out


def _reconstruct(tails: np.ndarray, targets: MarginTargets) -> np.ndarray:
    n, m = targets.shape
    rows, cols = targets.row_totals, targets.col_totals
    grid = np.zeros((n + 1, m + 1))
    grid[1:n, 1:m] = tails
    grid[0, :m] = np.cumsum(cols[::-1])[::-1]
    grid[:n, 0] = np.cumsum(rows[::-1])[::-1]
    grid[0, 0] = rows.sum()
    return grid[:-1, :-1] - grid[1:, :-1] - grid[:-1, 1:] + grid[1:, 1:]


def nm_fit(source, targets: MarginTargets) -> TransformResult:
    """Transform ``source`` to ``targets`` preserving the generalized LL.

    Raises
    ------
    NegativeAssociationError, DegenerateMarginError
        If the LL indicator is undefined at some cut of the source or of the
        targets.
    InfeasibleError
        If the reconstructed table has a negative cell.
    """
    source = require_valid(source)
    check_compatible(source, targets)
    n, m = source.shape
    subs = nm_subproblems(source, targets)
    tails = np.array([s.tail_sum for s in subs]).reshape(n - 1, m - 1)
    cells = _reconstruct(tails, targets)

    floor = -_NEG_RTOL * targets.total
    bad = np.argwhere(cells < floor)
    if bad.size:
        r, c = (int(x) for x in bad[0])
        raise InfeasibleError(
            f"NM solution has negative cell ({r}, {c}) = {cells[r, c]!r}; "
            "the target margins are incompatible with the source's sorting pattern",
            details={
                "cell": (r, c),
                "value": float(cells[r, c]),
                "tail_sums": tails.tolist(),
                "cuts": [(s.cut.i, s.cut.j) for s in subs],
            },
        )
    cells[cells < 0] = 0.0

    out = source.with_cells(cells)
    src_ll = np.array([s.source_ll.value for s in subs]).reshape(n - 1, m - 1)
    preserved = {"liu_lu": (src_ll, liu_lu_generalized(out).as_array())}
    return TransformResult(
        table=out,
        iterations=0,
        margin_residual=margin_residual(cells, targets),
        converged=True,
        method="nm",
        preserved=preserved,
        details={"subproblems": tuple(subs)},
    )


def nm_fit_2x2(source, targets: MarginTargets) -> TransformResult:
    """Closed-form NM for 2x2 tables."""
    source = require_valid(source)
    if source.shape != (2, 2):
        raise DimensionError("nm_fit_2x2 needs a 2x2 source")
    return nm_fit(source, targets)
