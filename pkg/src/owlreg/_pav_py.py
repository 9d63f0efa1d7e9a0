"""Pure-Python fallback for the prox kernels in ``owlreg._pav``.

Same stack-based pool-adjacent-violators algorithm, same operation order,
so results are bitwise identical to the compiled kernel.  Used when the
extension is unavailable or when OWLREG_BACKEND=python is set.
"""

import numpy as np


def isotonic_nonincreasing(v):
    v = np.ascontiguousarray(v, dtype=np.float64)
    p = v.shape[0]
    out = np.empty(p)
    if p == 0:
        return out
    sums = [0.0] * p
    vals = [0.0] * p
    first = [0] * p
    last = [0] * p
    k = 0
    for i in range(p):
        first[k] = i
        last[k] = i
        sums[k] = v[i]
        vals[k] = v[i]
        while k > 0 and vals[k - 1] <= vals[k]:
            k -= 1
            last[k] = i
            sums[k] += sums[k + 1]
            vals[k] = sums[k] / (last[k] - first[k] + 1)
        k += 1
    for j in range(k):
        out[first[j] : last[j] + 1] = vals[j]
    return out


def prox_on_sorted(mags, w):
    mags = np.ascontiguousarray(mags, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    p = mags.shape[0]
    if w.shape[0] != p:
        raise ValueError("mags and w must have the same length")
    out = np.empty(p)
    if p == 0:
        return out
    sums = [0.0] * p
    vals = [0.0] * p
    first = [0] * p
    last = [0] * p
    k = 0
    for i in range(p):
        first[k] = i
        last[k] = i
        sums[k] = mags[i] - w[i]
        vals[k] = sums[k]
        while k > 0 and vals[k - 1] <= vals[k]:
            k -= 1
            last[k] = i
            sums[k] += sums[k + 1]
            vals[k] = sums[k] / (last[k] - first[k] + 1)
        k += 1
    for j in range(k):
        out[first[j] : last[j] + 1] = max(vals[j], 0.0)
    return out
