"""Sampling experiments.

Two random mechanisms are kept apart here: drawing a sample of units from a
known population table (the setting where IPF completes a population table
from a sample) and picking a whole table from the set of integer tables with
fixed margins (the setting behind the Liu-Lu ranking).

All randomness goes through ``numpy.random.Generator(PCG64(seed))``. Batch
experiments seed draw ``k`` with ``seed + k``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import EnumerationCapError, TableError
from .indicators import _int_r
from .ipf import IpfConfig, ipf_fit
from .tables import ContingencyTable, MarginTargets, margins, require_valid

DEFAULT_ENUMERATION_CAP = 10_000


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class SampleDraw:
    sample: ContingencyTable
    population: ContingencyTable
    size: int
    rng_seed: int


def draw_sample(population, size: int, rng_seed: int) -> SampleDraw:
    """Multinomial sample (with replacement) of ``size`` units."""
    population = require_valid(population)
    if int(size) < 1:
        raise ValueError("sample size must be at least 1")
    p = population.cells.ravel() / population.total
    counts = make_rng(rng_seed).multinomial(int(size), p)
    sample = ContingencyTable(counts.reshape(population.shape).astype(float))
    return SampleDraw(sample, population, int(size), int(rng_seed))


def _integral_targets(targets: MarginTargets):
    vals = np.concatenate([targets.row_totals, targets.col_totals])
    if not np.all(vals == np.round(vals)):
        raise ValueError("enumeration needs integer margins")
    return [int(v) for v in targets.row_totals], [int(v) for v in targets.col_totals]


def hh_range(targets: MarginTargets, nonneg_association_only: bool = False) -> range:
    """Feasible H,H values of integer 2x2 tables with these margins."""
    if targets.shape != (2, 2):
        raise ValueError("enumeration is limited to 2x2 tables")
    (r_l, r_h), (c_l, c_h) = _integral_targets(targets)
    n = r_l + r_h
    lo = max(0, r_h + c_h - n)
    hi = min(r_h, c_h)
    if nonneg_association_only:
        lo = max(lo, _int_r(r_h, c_h, n))
    return range(lo, hi + 1)


def _table_from_hh(targets: MarginTargets, hh: int) -> ContingencyTable:
    (r_l, r_h), (c_l, c_h) = _integral_targets(targets)
    return ContingencyTable([[r_l - c_h + hh, c_h - hh], [r_h - hh, hh]])


def enumerate_tables(
    targets: MarginTargets,
    nonneg_association_only: bool = False,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[ContingencyTable]:
    """All nonnegative integer 2x2 tables with the given margins, ranked by
    their H,H cell (ascending)."""
    hh = hh_range(targets, nonneg_association_only)
    if len(hh) > cap:
        raise EnumerationCapError(f"{len(hh)} tables exceed the cap of {cap}")
    return [_table_from_hh(targets, v) for v in hh]


def sample_uniform_table(
    targets: MarginTargets, rng_seed: int, nonneg_association_only: bool = True
) -> ContingencyTable:
    """One table drawn uniformly from the enumerated set."""
    hh = hh_range(targets, nonneg_association_only)
    if len(hh) == 0:
        raise TableError("no table has these margins")
    return _table_from_hh(targets, int(make_rng(rng_seed).integers(hh.start, hh.stop)))


# -- likelihood comparison -------------------------------------------------


def _free_cell_bounds(targets: MarginTargets):
    (r_a, _), (c_t, c_c) = targets.row_totals, targets.col_totals
    return max(0.0, r_a - c_c), min(r_a, c_t)


def _cells_of(x, targets: MarginTargets):
    (r_a, _), (c_t, c_c) = targets.row_totals, targets.col_totals
    return x, r_a - x, c_t - x, x - r_a + c_c


def sample_log_likelihood(x: float, sample, targets: MarginTargets) -> float:
    """Log-likelihood of drawing ``sample`` from the population table whose
    top-left cell is ``x`` and whose margins are ``targets``."""
    s = require_valid(sample).cells.ravel()
    cells = np.array(_cells_of(x, targets)) / targets.total
    with np.errstate(divide="ignore"):
        return float(np.sum(np.where(s > 0, s * np.log(cells), 0.0)))


def mle_free_cell(sample, targets: MarginTargets) -> float:
    """Maximize :func:`sample_log_likelihood` over the free cell.

    The score is strictly decreasing on the feasible interval, so its root is
    bracketed and found with Brent's method.
    """
    s11, s12, s21, s22 = require_valid(sample).cells.ravel()
    lo, hi = _free_cell_bounds(targets)
    (r_a, _), (c_t, c_c) = targets.row_totals, targets.col_totals

    def score(x):
        return s11 / x - s12 / (r_a - x) - s21 / (c_t - x) + s22 / (x - r_a + c_c)

    width = hi - lo
    eps = width * 1e-15
    return brentq(score, lo + eps, hi - eps, xtol=1e-13 * max(1.0, hi), rtol=1e-15, maxiter=500)


@dataclass(frozen=True)
class MleReport:
    ipf_free_cell: float
    mle_free_cell: float
    discrepancy: float
    tolerance: float
    within_tolerance: bool
    error: Optional[str] = None


def mle_check(population, sample, tolerance: float = 1e-5) -> MleReport:
    """Compare the IPF completion of ``sample`` with the likelihood maximizer.

    Both estimate the population's top-left cell given the population
    margins. Zero sample cells are reported in ``error`` rather than raised.
    """
    sample_table = sample.sample if isinstance(sample, SampleDraw) else require_valid(sample)
    targets = margins(population)
    if sample_table.shape != (2, 2):
        raise ValueError("mle_check is limited to 2x2 tables")
    if np.any(sample_table.cells <= 0):
        nan = float("nan")
        return MleReport(nan, nan, nan, tolerance, False, "sample has a zero cell")
    fit = ipf_fit(sample_table, targets, IpfConfig(max_iterations=10_000, tolerance=1e-14))
    x_ipf = float(fit.table.cells[0, 0])
    x_mle = float(mle_free_cell(sample_table, targets))
    diff = abs(x_ipf - x_mle)
    return MleReport(x_ipf, x_mle, diff, tolerance, diff <= tolerance)


EXPERIMENT_FIELDS = ("seed", "n11", "n12", "n21", "n22", "ipf_free_cell", "mle_free_cell", "discrepancy")


def run_mle_experiment(population, size: int, draws: int, seed: int, tolerance: float = 1e-5):
    """``draws`` seeded samples, each compared by :func:`mle_check`.

    Returns a list of dicts keyed by :data:`EXPERIMENT_FIELDS`.
    """
    rows = []
    for k in range(int(draws)):
        d = draw_sample(population, size, seed + k)
        rep = mle_check(population, d, tolerance)
        n11, n12, n21, n22 = (int(v) for v in d.sample.cells.ravel())
        rows.append(
            dict(
                seed=seed + k, n11=n11, n12=n12, n21=n21, n22=n22,
                ipf_free_cell=rep.ipf_free_cell,
                mle_free_cell=rep.mle_free_cell,
                discrepancy=rep.discrepancy,
            )
        )
    return rows


def experiment_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=EXPERIMENT_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) and not math.isnan(v) else v) for k, v in r.items()})
    return buf.getvalue()
