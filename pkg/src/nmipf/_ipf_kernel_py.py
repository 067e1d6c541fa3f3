"""Pure-Python (numpy) IPF inner loop, used when the compiled kernel is absent."""
import numpy as np


def _factors(targets, sums):
    out = np.ones_like(sums)
    pos = sums > 0
    out[pos] = targets[pos] / sums[pos]
    return out


def ipf_loop(cells, row_targets, col_targets, max_iterations, tolerance):
    """Scale ``cells`` in place; return ``(iterations, residual, converged)``."""
    total = float(row_targets.sum())
    it = 0
    res = 0.0
    while it < max_iterations:
        it += 1
        cells *= _factors(row_targets, cells.sum(axis=1))[:, None]
        cells *= _factors(col_targets, cells.sum(axis=0))[None, :]
        res = max(
            np.abs(cells.sum(axis=1) - row_targets).max(),
            np.abs(cells.sum(axis=0) - col_targets).max(),
        ) / total
        if res <= tolerance:
            return it, float(res), True
    return it, float(res), False
