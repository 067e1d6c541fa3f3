"""Iterative proportional fitting (RAS): alternate row and column scaling of a
seed table until it carries the target margins.

Every scaling step multiplies the numerator and the denominator of each
cross-product ratio by the same factor, so all odds-ratios of the seed are
retained and zero cells stay zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from . import _backend
from .errors import InfeasibleError
from .indicators import local_odds_ratios
from .tables import (
    ContingencyTable,
    MarginTargets,
    as_table,
    check_compatible,
    require_valid,
)


@dataclass(frozen=True)
class IpfConfig:
    """Stopping rule for :func:`ipf_fit`.

    ``tolerance`` bounds the largest absolute margin deviation divided by the
    grand total, checked after each column step.
    """

    max_iterations: int = 1000
    tolerance: float = 1e-10
    record_trajectory: bool = False

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class TransformResult:
    """Output of a table transformation plus diagnostics.

    ``preserved`` maps indicator names to ``(source, output)`` pairs: local
    odds-ratios for IPF, the Liu-Lu matrix for NM. ``trajectory`` holds the
    ``(after row step, after column step)`` tables of each IPF iteration when
    requested.
    """

    table: ContingencyTable
    iterations: int
    margin_residual: float
    converged: bool
    method: str
    preserved: Mapping[str, Any] = field(default_factory=dict)
    trajectory: Optional[tuple] = None
    details: Mapping[str, Any] = field(default_factory=dict)


def margin_residual(cells: np.ndarray, targets: MarginTargets) -> float:
    """Max absolute margin deviation relative to the target grand total."""
    dev = max(
        float(np.abs(cells.sum(axis=1) - targets.row_totals).max()),
        float(np.abs(cells.sum(axis=0) - targets.col_totals).max()),
    )
    return dev / targets.total


def _check_structure(cells: np.ndarray, targets: MarginTargets):
    for axis, name, tgt in ((1, "row", targets.row_totals), (0, "column", targets.col_totals)):
        sums = cells.sum(axis=axis)
        for k in range(tgt.size):
            if tgt[k] > 0 and not sums[k] > 0:
                raise InfeasibleError(
                    f"{name} {k} has target {tgt[k]!r} but its seed slice is all zero",
                    details={"axis": name, "index": k, "target": float(tgt[k])},
                )
            if tgt[k] == 0 and sums[k] > 0:
                raise InfeasibleError(
                    f"{name} {k} has target 0 but its seed slice has mass {sums[k]!r}",
                    details={"axis": name, "index": k, "target": 0.0},
                )


def _step(table, targets, axis):
    table = require_valid(table)
    check_compatible(table, targets)
    z = np.array(table.cells, dtype=float)
    tgt = targets.row_totals if axis == 1 else targets.col_totals
    sums = z.sum(axis=axis)
    bad = (sums <= 0) & (tgt > 0)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise InfeasibleError(
            f"{'row' if axis == 1 else 'column'} {k} is all zero but has a positive target"
        )
    f = np.ones_like(sums)
    f[sums > 0] = tgt[sums > 0] / sums[sums > 0]
    z *= f[:, None] if axis == 1 else f[None, :]
    return table.with_cells(z)


def ipf_step_rows(table, targets: MarginTargets) -> ContingencyTable:
    """Scale each row to its target total."""
    return _step(table, targets, axis=1)


def ipf_step_cols(table, targets: MarginTargets) -> ContingencyTable:
    """Scale each column to its target total."""
    return _step(table, targets, axis=0)


def _run_with_trajectory(z, targets, config):
    frames = []
    table = ContingencyTable(z)
    res = np.inf
    for it in range(1, config.max_iterations + 1):
        after_rows = ipf_step_rows(table, targets)
        table = ipf_step_cols(after_rows, targets)
        frames.append((after_rows, table))
        res = margin_residual(table.cells, targets)
        if res <= config.tolerance:
            return np.array(table.cells), it, res, True, tuple(frames)
    return np.array(table.cells), config.max_iterations, res, False, tuple(frames)


def ipf_fit(seed, targets: MarginTargets, config: Optional[IpfConfig] = None) -> TransformResult:
    """Fit ``seed`` to ``targets`` by iterative proportional fitting.

    Non-convergence is reported through ``converged=False``, not raised.

    Raises
    ------
    DimensionError
        If the seed and targets disagree in shape.
    InfeasibleError
        If a row or column with a positive target has an all-zero seed slice
        (or a zero target meets a slice with mass).
    """
    config = config or IpfConfig()
    seed = require_valid(seed)
    check_compatible(seed, targets)
    z = np.array(seed.cells, dtype=float, order="C")
    _check_structure(z, targets)

    trajectory = None
    if config.record_trajectory:
        z, iterations, res, converged, trajectory = _run_with_trajectory(z, targets, config)
    else:
        rows = np.ascontiguousarray(targets.row_totals, dtype=float)
        cols = np.ascontiguousarray(targets.col_totals, dtype=float)
        iterations, res, converged = _backend.ipf_loop(
            z, rows, cols, int(config.max_iterations), float(config.tolerance)
        )

    out = seed.with_cells(z)
    preserved = {"odds_ratios": (local_odds_ratios(seed), local_odds_ratios(out))}
    return TransformResult(
        table=out,
        iterations=int(iterations),
        margin_residual=float(res),
        converged=bool(converged),
        method="ipf",
        preserved=preserved,
        trajectory=trajectory,
        details={"backend": "python" if config.record_trajectory else _backend.BACKEND},
    )


def ipf(seed, targets: MarginTargets, **config) -> ContingencyTable:
    """Shorthand returning only the fitted table."""
    return ipf_fit(as_table(seed), targets, IpfConfig(**config)).table
