"""Cluster detection, clustering sufficient conditions, and error bounds.

The clustering conditions certify that two coefficients agree in magnitude
at any exact minimizer:

- squared loss:   ||y||_2 * ||s_i a_i - s_j a_j||_2 < delta
- absolute loss:  ||s_i a_i - s_j a_j||_1 < delta

with ``s_i = sign(x_hat_i)`` and ``delta`` the minimum weight gap.  The
signs of the solution are unknown a priori, so each checker also has a
conservative variant that requires the condition for every sign
combination.

``bound_rhs`` evaluates the finite-sample error bound

    sqrt(2 pi) * (4 sqrt(2) * ||C||_1 * (w1 / wbar) * sqrt(s log(dim) / n) + eps)

on the expected value of ``||C (x_hat - x_star)||_2``, with dim = q in the
general and grouped variants and dim = p (and ||C||_1 = 1) for an identity
mixing matrix.  Logarithms are natural.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClusterReport",
    "BoundInputs",
    "BoundVariant",
    "detect_clusters",
    "check_sq_condition",
    "check_abs_condition",
    "c_metric",
    "group_z",
    "bound_rhs",
    "matrix_l1_norm",
]


def _sign_pm1(v):
    # sign(0) is taken as +1 wherever a sign multiplies a column
    return 1.0 if v >= 0.0 else -1.0


@dataclass(frozen=True)
class ClusterReport:
    """Partition of coordinate indices by coefficient magnitude.

    ``clusters`` are tuples of 0-based indices ordered by decreasing
    magnitude; ``magnitudes`` holds one representative (mean) magnitude
    per cluster.
    """

    clusters: tuple
    magnitudes: tuple
    tol: float

    def cluster_of(self, j):
        for k, group in enumerate(self.clusters):
            if j in group:
                return k
        raise KeyError(j)


def detect_clusters(x, tol=1e-6):
    """Single-linkage grouping of |x| sorted decreasingly, gap threshold tol."""
    if tol < 0.0:
        raise ValueError("tol must be non-negative")
    x = np.asarray(x, dtype=np.float64)
    mags = np.abs(x)
    order = [int(j) for j in np.argsort(-mags, kind="stable")]
    clusters = []
    magnitudes = []
    current = [order[0]]
    for a, b in zip(order[:-1], order[1:]):
        if mags[a] - mags[b] > tol:
            clusters.append(tuple(current))
            magnitudes.append(float(np.mean(mags[current])))
            current = []
        current.append(b)
    clusters.append(tuple(current))
    magnitudes.append(float(np.mean(mags[current])))
    return ClusterReport(clusters=tuple(clusters), magnitudes=tuple(magnitudes), tol=float(tol))


def _signed_diff_norm(a_i, a_j, s_i, s_j, ord):
    return float(np.linalg.norm(s_i * a_i - s_j * a_j, ord=ord))


def check_sq_condition(y, a_i, a_j, delta, s_i=None, s_j=None):
    """Squared-loss clustering condition for a column pair.

    With both signs given, tests ||y||_2 ||s_i a_i - s_j a_j||_2 < delta
    (strict).  With either sign omitted, runs the conservative variant:
    true only when the condition holds for all four sign combinations.
    """
    y = np.asarray(y, dtype=np.float64)
    a_i = np.asarray(a_i, dtype=np.float64)
    a_j = np.asarray(a_j, dtype=np.float64)
    ny = float(np.linalg.norm(y))
    if s_i is None or s_j is None:
        return all(
            ny * _signed_diff_norm(a_i, a_j, si, sj, 2) < delta
            for si in (1.0, -1.0)
            for sj in (1.0, -1.0)
        )
    return ny * _signed_diff_norm(a_i, a_j, _sign_pm1(s_i), _sign_pm1(s_j), 2) < delta


def check_abs_condition(a_i, a_j, delta, s_i=None, s_j=None):
    """Absolute-loss clustering condition: ||s_i a_i - s_j a_j||_1 < delta."""
    a_i = np.asarray(a_i, dtype=np.float64)
    a_j = np.asarray(a_j, dtype=np.float64)
    if s_i is None or s_j is None:
        return all(
            _signed_diff_norm(a_i, a_j, si, sj, 1) < delta
            for si in (1.0, -1.0)
            for sj in (1.0, -1.0)
        )
    return _signed_diff_norm(a_i, a_j, _sign_pm1(s_i), _sign_pm1(s_j), 1) < delta


def c_metric(x_hat, x_star, C):
    """Error through the mixing matrix: ||C (x_hat - x_star)||_2.

    Insensitive to the nullspace of C; for a replication C this equals
    the root sum of squared sign-adjusted group sums of the difference.
    """
    d = np.asarray(x_hat, dtype=np.float64) - np.asarray(x_star, dtype=np.float64)
    return float(np.linalg.norm(np.asarray(C) @ d))


def group_z(x, gs):
    """Sign-adjusted group sums z[i] = sum_{j in G_i} signs[j] * x[j]."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != gs.p:
        raise ValueError("x length must match the group structure")
    return np.array([float(np.dot(gs.signs[list(g)], x[list(g)])) for g in gs.groups])


class BoundVariant(enum.Enum):
    GENERAL_Q = "general_q"  # ||C||_1 and log q
    IDENTITY_P = "identity_p"  # C = I: ||C||_1 = 1 and log p
    GROUPED_Q = "grouped_q"  # replication C: ||C||_1 = 1 and log q


@dataclass(frozen=True)
class BoundInputs:
    """Scalars entering the finite-sample bound."""

    s: int
    n: int
    p: int
    q: int
    w1_over_wbar: float = 1.0
    C_l1_norm: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.s < 0:
            raise ValueError("s must be non-negative")
        if self.w1_over_wbar < 1.0:
            raise ValueError("w1/wbar is at least 1 for ordered weights")
        if self.C_l1_norm <= 0.0:
            raise ValueError("||C||_1 must be positive")
        if self.eps < 0.0:
            raise ValueError("eps must be non-negative")


def bound_rhs(b, variant=BoundVariant.GENERAL_Q):
    """Right-hand side of the expected-error bound for the chosen variant."""
    if variant is BoundVariant.IDENTITY_P:
        dim, c1 = b.p, 1.0
    elif variant is BoundVariant.GROUPED_Q:
        dim, c1 = b.q, 1.0
    else:
        dim, c1 = b.q, b.C_l1_norm
    if dim < 2:
        raise ValueError("the bound needs dimension >= 2 so that log(dim) > 0")
    width = 4.0 * math.sqrt(2.0) * c1 * b.w1_over_wbar * math.sqrt(b.s * math.log(dim) / b.n)
    return math.sqrt(2.0 * math.pi) * (width + b.eps)


def matrix_l1_norm(C):
    """Matrix norm induced by the l1 norm: the largest column l1 norm."""
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[1] == 0:
        raise ValueError("C must be a matrix with at least one column")
    return float(np.abs(C).sum(axis=0).max())
