"""Pure-numpy twins of the compiled kernels."""

import math

import numpy as np


def gain_array(model, r):
    return model.gain(np.asarray(r, dtype=float))


def disc_chunk(gaps, gains, offset, target, inv_pi_lam, index0, skip, model):
    """See ``_kernels.disc_chunk``; takes the model object instead of a code."""
    arrivals = np.cumsum(np.concatenate(([offset], gaps)))[1:]
    n = int(np.searchsorted(arrivals, target, side="right"))
    if n == 0:
        return 0, offset, math.nan, 0.0, 0.0
    r = np.sqrt(arrivals[:n] * inv_pi_lam)
    start = min(max(0, skip - index0), n)
    terms = model.gain(r[start:]) * gains[start:n]
    return n, float(arrivals[n - 1]), float(r[0]), math.fsum(terms), 0.0
