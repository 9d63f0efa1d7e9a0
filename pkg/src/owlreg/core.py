"""Ordered weighted l1 (OWL) norm, its proximal operator, and weight builders.

The OWL norm of ``x`` with a non-increasing, non-negative weight sequence
``w`` (``w[0] > 0``) is

    omega(x) = sum_i w[i] * |x|_(i),

where ``|x|_(i)`` is the i-th largest entry of ``x`` in magnitude.  Uniform
weights recover ``w[0] * l1``; ``(w[0], 0, ..., 0)`` recovers ``w[0] *
l-infinity``.  Linearly decaying weights give the OSCAR penalty and
Gaussian-quantile weights the SLOPE penalty.

Coefficient vectors are plain 1-D float64 ndarrays throughout the package.
All functions here are pure and safe to call concurrently.
"""

from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from ._backend import prox_on_sorted

__all__ = [
    "WeightVector",
    "owl_norm",
    "prox_owl",
    "oscar_weights",
    "slope_weights",
    "min_gap",
    "pigou_dalton_transfer",
]

_STD_NORMAL = NormalDist()


def as_coefficients(x, p=None):
    """Validate and return ``x`` as a contiguous 1-D float64 array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"coefficient vector must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("coefficient vector must have finite entries")
    if p is not None and x.shape[0] != p:
        raise ValueError(f"expected length {p}, got {x.shape[0]}")
    return x


@dataclass(frozen=True)
class WeightVector:
    """Validated OWL weight sequence with cached summary statistics.

    Parameters
    ----------
    w : array_like
        Weights ``w[0] >= w[1] >= ... >= w[p-1] >= 0`` with ``w[0] > 0``.

    Attributes
    ----------
    delta : float
        Minimum consecutive gap ``min_l(w[l] - w[l+1])``; for ``p == 1``
        there is no consecutive pair and ``delta`` is defined as ``w[0]``.
    mean : float
        Average weight, the lower scale of the l1 sandwich.
    max : float
        Largest weight ``w[0]``, the upper scale of the l1 sandwich.
    """

    w: np.ndarray
    delta: float = field(init=False)
    mean: float = field(init=False)
    max: float = field(init=False)

    def __post_init__(self):
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if w.ndim != 1 or w.shape[0] < 1:
            raise ValueError("weights must form a non-empty 1-D vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if w[-1] < 0.0:
            raise ValueError("weights must be non-negative")
        if np.any(np.diff(w) > 0.0):
            raise ValueError("weights must be non-increasing")
        if not w[0] > 0.0:
            raise ValueError("the largest weight must be positive for a norm")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        if w.shape[0] == 1:
            object.__setattr__(self, "delta", float(w[0]))
        else:
            object.__setattr__(self, "delta", float(np.min(w[:-1] - w[1:])))
        object.__setattr__(self, "mean", float(w.mean()))
        object.__setattr__(self, "max", float(w[0]))

    @property
    def p(self):
        return self.w.shape[0]

    def __len__(self):
        return self.w.shape[0]

    def scaled(self, t):
        """Return the weights multiplied by ``t > 0`` (still a valid norm)."""
        if not t > 0.0:
            raise ValueError("scale factor must be positive")
        return WeightVector(self.w * t)


def owl_norm(x, weights):
    """Evaluate ``sum_i w[i] * |x|_(i)``.

    Parameters
    ----------
    x : array_like
        Coefficient vector, same length as the weights.
    weights : WeightVector

    Returns
    -------
    float
        Non-negative; zero exactly when ``x`` is the zero vector.
    """
    x = as_coefficients(x, p=len(weights))
    mags = np.sort(np.abs(x))[::-1]
    return float(np.dot(weights.w, mags))


def _prox_raw(u, w_arr):
    """Prox core without validation; ``w_arr`` is a raw weight array."""
    order = np.argsort(-np.abs(u), kind="stable")
    mags = np.abs(u)[order]
    shrunk = prox_on_sorted(mags, w_arr)
    out = np.empty_like(u)
    out[order] = shrunk
    return np.sign(u) * out


def prox_owl(u, weights):
    """Proximal operator ``argmin_x 0.5 * ||x - u||_2^2 + omega(x)``.

    Computed in O(p log p): record signs and the stable permutation sorting
    ``|u|`` in non-increasing order, subtract the weights, project onto the
    non-increasing non-negative cone (pool-adjacent-violators, then clamp),
    and undo permutation and signs.  Output magnitudes preserve the input's
    magnitude ordering; equal input magnitudes map to equal outputs.

    Parameters
    ----------
    u : array_like
        Point to shrink, same length as the weights.
    weights : WeightVector

    Returns
    -------
    ndarray
    """
    u = as_coefficients(u, p=len(weights))
    return _prox_raw(u, weights.w)


def oscar_weights(p, lam1, lam2):
    """OSCAR weight sequence ``w[i] = lam1 + lam2 * (p - 1 - i)`` (0-based).

    ``lam1`` is the pure-l1 level and ``lam2`` the linear decay, which is
    exactly the minimum gap for ``p >= 2``.  Requires ``lam1 + lam2 > 0``
    so that the largest weight is positive.
    """
    p = int(p)
    if p < 1:
        raise ValueError("p must be a positive integer")
    if lam1 < 0.0 or lam2 < 0.0:
        raise ValueError("lam1 and lam2 must be non-negative")
    if lam1 == 0.0 and lam2 == 0.0:
        raise ValueError("lam1 = lam2 = 0 does not define a norm")
    return WeightVector(lam1 + lam2 * np.arange(p - 1, -1, -1, dtype=np.float64))


def slope_weights(p, q):
    """Gaussian-quantile (SLOPE) weights ``w[i] = ndtri(1 - (i+1) q / (2 p))``.

    ``ndtri`` is the standard-normal inverse CDF (stdlib ``NormalDist``,
    accurate to well below 1e-9 absolute error).  ``q`` must lie in (0, 1),
    which keeps every quantile argument above 0.5 and the sequence strictly
    decreasing and positive; negative values would be clamped to zero.
    """
    p = int(p)
    if p < 1:
        raise ValueError("p must be a positive integer")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    i = np.arange(1, p + 1, dtype=np.float64)
    w = np.array([_STD_NORMAL.inv_cdf(a) for a in 1.0 - i * q / (2.0 * p)])
    return WeightVector(np.maximum(w, 0.0))


def min_gap(weights):
    """Minimum gap between consecutive weights (``w[0]`` itself for p = 1)."""
    return weights.delta


def pigou_dalton_transfer(x, i, j, eps):
    """Move mass ``eps`` from entry ``i`` down to entry ``j``.

    Requires ``x`` non-negative with ``x[i] > x[j]`` and
    ``0 < eps < (x[i] - x[j]) / 2`` so the transfer does not swap the order
    of the two entries.  Such a transfer decreases the OWL norm by at least
    ``delta * eps``.
    """
    x = as_coefficients(x)
    p = x.shape[0]
    if not (0 <= i < p and 0 <= j < p) or i == j:
        raise ValueError("i and j must be distinct valid indices")
    if np.any(x < 0.0):
        raise ValueError("transfer is defined for non-negative vectors")
    if not x[i] > x[j]:
        raise ValueError("need x[i] > x[j]")
    if not 0.0 < eps < (x[i] - x[j]) / 2.0:
        raise ValueError("need 0 < eps < (x[i] - x[j]) / 2")
    z = x.copy()
    z[i] -= eps
    z[j] += eps
    return z
