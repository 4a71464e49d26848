"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Same contract, same arithmetic order; vectorised across grid points
instead of looping per point.
"""
import numpy as np


def vr_power_field(prefix_by_point, r, threads=1):
    prefix = np.ascontiguousarray(prefix_by_point, dtype=np.float64).T  # (N+1, X)
    n = prefix.shape[0] - 1
    if n < 1:
        raise ValueError("need at least one increment")
    D = np.zeros_like(prefix)
    for j in range(1, n + 1):
        diff = prefix[j] - prefix[:j]
        if r == 2.0:
            cand = D[:j] + diff * diff
        else:
            cand = D[:j] + np.abs(diff) ** r
        D[j] = cand.max(axis=0)
    return D[n].copy()


def vr_power_single(prefix, r):
    prefix = np.asarray(prefix, dtype=np.float64)
    n = prefix.shape[0] - 1
    if n < 1:
        raise ValueError("need at least one increment")
    D = np.zeros(n + 1)
    for j in range(1, n + 1):
        diff = prefix[j] - prefix[:j]
        if r == 2.0:
            D[j] = (D[:j] + diff * diff).max()
        else:
            D[j] = (D[:j] + np.abs(diff) ** r).max()
    return float(D[n])
