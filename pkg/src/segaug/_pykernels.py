"""Pure-numpy versions of the E-step kernels in ``_emkernel.pyx``."""

import numpy as np


def _shard(cell_param, row_off, params, row_start, row_stop):
    lo, hi = row_off[row_start], row_off[row_stop]
    vals = params[cell_param[lo:hi]]
    denom = np.add.reduceat(vals, row_off[row_start:row_stop] - lo)
    lengths = np.diff(row_off[row_start:row_stop + 1])
    return vals, denom, lengths, lo, hi


def em_accumulate(cell_param, row_off, params, counts, row_start, row_stop):
    if row_stop <= row_start:
        return 0.0
    vals, denom, lengths, lo, hi = _shard(cell_param, row_off, params, row_start, row_stop)
    np.add.at(counts, cell_param[lo:hi], vals / np.repeat(denom, lengths))
    return float(np.sum(np.log(denom)) - np.sum(np.log(lengths)))


def loglikelihood(cell_param, row_off, params, row_start, row_stop):
    if row_stop <= row_start:
        return 0.0
    _, denom, lengths, _, _ = _shard(cell_param, row_off, params, row_start, row_stop)
    return float(np.sum(np.log(denom)) - np.sum(np.log(lengths)))


def row_argmax(values, row_off):
    n = len(row_off) - 1
    out = np.empty(n, dtype=np.int64)
    for r in range(n):
        out[r] = int(np.argmax(values[row_off[r]:row_off[r + 1]]))
    return out
