"""Counterfactual tables and the two-factor decomposition with interaction.

``f(A, P)`` is an outcome statistic of the table that combines the margins
(availability) of period ``A`` with the association (preferences) of period
``P``. The change between two periods splits as::

    f(A1,P1) - f(A0,P0) = [f(A1,P0) - f(A0,P0)]                     availability
                        + [f(A0,P1) - f(A0,P0)]                     preferences
                        + [f(A1,P1) - f(A1,P0) - f(A0,P1) + f(A0,P0)]  interaction
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import CounterfactualError, DimensionError, TableError
from .ipf import IpfConfig, ipf_fit
from .nm import nm_fit
from .tables import (
    ContingencyTable,
    MarginTargets,
    check_compatible,
    margins,
    require_valid,
)

METHODS = ("ipf", "nm")


def _square(table) -> np.ndarray:
    table = require_valid(table)
    n, m = table.shape
    if n != m:
        raise DimensionError(f"share statistics need a square table, got {n}x{m}")
    return table.cells


def heterogamy_share(table) -> float:
    """Off-diagonal mass over total mass."""
    z = _square(table)
    return float((z.sum() - np.trace(z)) / z.sum())


def homogamy_share(table) -> float:
    z = _square(table)
    return float(np.trace(z) / z.sum())


def hypergamy_share(table) -> float:
    """Share of couples where the husband (row) is more educated."""
    z = _square(table)
    return float(np.tril(z, k=-1).sum() / z.sum())


def hypogamy_share(table) -> float:
    """Share of couples where the wife (column) is more educated."""
    z = _square(table)
    return float(np.triu(z, k=1).sum() / z.sum())


@dataclass(frozen=True)
class ShareStatistics:
    heterogamy_share: float
    hypergamy_share: float
    hypogamy_share: float
    homogamy_share: float


def share_statistics(table) -> ShareStatistics:
    return ShareStatistics(
        heterogamy_share=heterogamy_share(table),
        hypergamy_share=hypergamy_share(table),
        hypogamy_share=hypogamy_share(table),
        homogamy_share=homogamy_share(table),
    )


def cell_share(mask) -> Callable[[ContingencyTable], float]:
    """Outcome statistic: share of the mass in the cells selected by ``mask``."""
    mask = np.asarray(mask, dtype=bool)

    def outcome(table):
        z = require_valid(table).cells
        if z.shape != mask.shape:
            raise DimensionError(f"mask shape {mask.shape} does not match table {z.shape}")
        return float(z[mask].sum() / z.sum())

    return outcome


OUTCOMES = {
    "heterogamy": heterogamy_share,
    "homogamy": homogamy_share,
    "hypergamy": hypergamy_share,
    "hypogamy": hypogamy_share,
}

Outcome = Union[str, Callable[[ContingencyTable], float]]


def resolve_outcome(outcome: Outcome) -> Callable[[ContingencyTable], float]:
    if callable(outcome):
        return outcome
    try:
        return OUTCOMES[outcome]
    except KeyError:
        raise ValueError(
            f"unknown outcome {outcome!r}; choose from {sorted(OUTCOMES)} or pass a callable"
        ) from None


def _check_method(method):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")


def counterfactual(
    preference_table,
    availability: MarginTargets,
    method: str = "nm",
    ipf_config: Optional[IpfConfig] = None,
) -> ContingencyTable:
    """Table with the margins ``availability`` and the association of
    ``preference_table``; the table itself when its margins already match."""
    _check_method(method)
    table = require_valid(preference_table)
    check_compatible(table, availability)
    if margins(table) == availability:
        return table
    if method == "nm":
        return nm_fit(table, availability).table
    result = ipf_fit(table, availability, ipf_config)
    if not result.converged:
        raise TableError(
            f"IPF did not converge in {result.iterations} iterations "
            f"(residual {result.margin_residual:.3g})"
        )
    return result.table


@dataclass(frozen=True)
class DecompositionResult:
    total_change: float
    availability_effect: float
    preference_effect: float
    interaction_effect: float
    counterfactual_tables: dict  # {"g(A1,P0)": table, "g(A0,P1)": table}
    method: str
    outcome_values: dict  # f(A,P) for the four combinations

    def to_dict(self, digits: int = 12) -> dict:
        """JSON-ready representation with counterfactual cells as lists."""
        return {
            "method": self.method,
            "total_change": self.total_change,
            "availability_effect": self.availability_effect,
            "preference_effect": self.preference_effect,
            "interaction_effect": self.interaction_effect,
            "outcome_values": dict(self.outcome_values),
            "counterfactual_tables": {
                k: [[float(f"{v:.{digits}g}") for v in row] for row in t.cells.tolist()]
                for k, t in self.counterfactual_tables.items()
            },
        }


def decompose(
    table_0,
    table_1,
    outcome: Outcome = "heterogamy",
    method: str = "nm",
    ipf_config: Optional[IpfConfig] = None,
) -> DecompositionResult:
    """Split ``f(A1,P1) - f(A0,P0)`` into availability, preference and
    interaction components.

    Raises
    ------
    CounterfactualError
        When either counterfactual cannot be built; ``leg`` names it.
    """
    _check_method(method)
    t0, t1 = require_valid(table_0), require_valid(table_1)
    if t0.shape != t1.shape:
        raise DimensionError(f"tables differ in shape: {t0.shape} vs {t1.shape}")
    h = resolve_outcome(outcome)
    a0, a1 = margins(t0), margins(t1)

    legs = {}
    for leg, pref, avail in (("g(A1,P0)", t0, a1), ("g(A0,P1)", t1, a0)):
        try:
            legs[leg] = counterfactual(pref, avail, method, ipf_config)
        except TableError as exc:
            raise CounterfactualError(f"{leg} failed: {exc}", leg=leg) from exc

    f00, f11 = h(t0), h(t1)
    f10, f01 = h(legs["g(A1,P0)"]), h(legs["g(A0,P1)"])
    return DecompositionResult(
        total_change=f11 - f00,
        availability_effect=f10 - f00,
        preference_effect=f01 - f00,
        interaction_effect=f11 - f10 - f01 + f00,
        counterfactual_tables=legs,
        method=method,
        outcome_values={"f(A0,P0)": f00, "f(A1,P0)": f10, "f(A0,P1)": f01, "f(A1,P1)": f11},
    )


def cumulative_preference_path(
    tables: Sequence,
    reference: int = 0,
    outcome: Outcome = "heterogamy",
    method: str = "nm",
    ipf_config: Optional[IpfConfig] = None,
) -> list[float]:
    """Outcome path if only preferences had changed since ``reference``.

    Adjacent periods are chained: the value at ``k + 1`` is the value at ``k``
    plus the preference effect of the ``(k, k + 1)`` decomposition. Periods
    before the reference are filled backwards with the same rule.
    """
    if len(tables) < 2:
        raise ValueError("need at least two tables")
    if not 0 <= reference < len(tables):
        raise IndexError(f"reference {reference} outside 0..{len(tables) - 1}")
    h = resolve_outcome(outcome)
    effects = [
        decompose(tables[k], tables[k + 1], h, method, ipf_config).preference_effect
        for k in range(len(tables) - 1)
    ]
    path = [0.0] * len(tables)
    path[reference] = h(require_valid(tables[reference]))
    for k in range(reference, len(tables) - 1):
        path[k + 1] = path[k] + effects[k]
    for k in range(reference - 1, -1, -1):
        path[k] = path[k + 1] - effects[k]
    return path
