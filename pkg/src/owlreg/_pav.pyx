# cython: boundscheck=False, wraparound=False, cdivision=True
"""C kernels for the ordered-weighted-l1 proximal operator.

Both functions implement the stack form of the pool-adjacent-violators
algorithm for the *non-increasing* isotonic least-squares projection and
run in O(p).  ``owlreg._pav_py`` contains the pure-Python twin; the two
must stay bitwise identical (same operation order) so that the backend
choice never changes results.
"""

import numpy as np


def isotonic_nonincreasing(const double[::1] v):
    """Least-squares projection of ``v`` onto non-increasing vectors."""
    cdef Py_ssize_t p = v.shape[0]
    out = np.empty(p, dtype=np.float64)
    cdef double[::1] o = out
    if p == 0:
        return out
    sums_arr = np.empty(p, dtype=np.float64)
    vals_arr = np.empty(p, dtype=np.float64)
    first_arr = np.empty(p, dtype=np.intp)
    last_arr = np.empty(p, dtype=np.intp)
    cdef double[::1] sums = sums_arr
    cdef double[::1] vals = vals_arr
    cdef Py_ssize_t[::1] first = first_arr
    cdef Py_ssize_t[::1] last = last_arr
    cdef Py_ssize_t i, j, k = 0
    for i in range(p):
        first[k] = i
        last[k] = i
        sums[k] = v[i]
        vals[k] = v[i]
        # merge while the previous block would sit below the current one
        while k > 0 and vals[k - 1] <= vals[k]:
            k -= 1
            last[k] = i
            sums[k] += sums[k + 1]
            vals[k] = sums[k] / (last[k] - first[k] + 1)
        k += 1
    for j in range(k):
        for i in range(first[j], last[j] + 1):
            o[i] = vals[j]
    return out


def prox_on_sorted(const double[::1] mags, const double[::1] w):
    """Prox magnitudes for pre-sorted input.

    ``mags`` must hold magnitudes sorted in non-increasing order and ``w``
    the weight sequence of the same length.  Returns
    ``max(PAV(mags - w), 0)`` where PAV is the non-increasing projection;
    the output is again non-increasing and non-negative.
    """
    cdef Py_ssize_t p = mags.shape[0]
    if w.shape[0] != p:
        raise ValueError("mags and w must have the same length")
    out = np.empty(p, dtype=np.float64)
    cdef double[::1] o = out
    if p == 0:
        return out
    sums_arr = np.empty(p, dtype=np.float64)
    vals_arr = np.empty(p, dtype=np.float64)
    first_arr = np.empty(p, dtype=np.intp)
    last_arr = np.empty(p, dtype=np.intp)
    cdef double[::1] sums = sums_arr
    cdef double[::1] vals = vals_arr
    cdef Py_ssize_t[::1] first = first_arr
    cdef Py_ssize_t[::1] last = last_arr
    cdef Py_ssize_t i, j, k = 0
    cdef double d
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
        d = vals[j]
        if d < 0.0:
            d = 0.0
        for i in range(first[j], last[j] + 1):
            o[i] = d
    return out
