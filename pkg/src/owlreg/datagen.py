"""Synthetic data for the correlated Gaussian design model A = B C.

``B`` is an n x q matrix of i.i.d. standard normals and ``C`` a q x p
mixing matrix, so the rows of ``A`` are N(0, C^T C).  A *replication*
``C`` has 1-sparse unit columns (optionally sign-flipped): groups of
columns of ``A`` are then exact copies of latent columns, the regime in
which OWL regularization clusters coefficients.

All draws come from named streams of a counter-based Philox generator, so
the design, the signal, and the noise can be varied independently while
everything stays reproducible: ``sample_*(seed=s)`` always returns the
same values for the same ``s``.
"""

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "STREAM_DESIGN",
    "STREAM_SIGNAL",
    "STREAM_NOISE",
    "STREAM_GROUPS",
    "GroupStructure",
    "GenerativeModel",
    "Dataset",
    "rng_stream",
    "replication_matrix",
    "sample_design",
    "sample_signal",
    "sample_noise",
]

STREAM_DESIGN = 0
STREAM_SIGNAL = 1
STREAM_NOISE = 2
STREAM_GROUPS = 3


def rng_stream(seed, stream):
    """Philox generator for one named stream of a seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class GroupStructure:
    """Partition of the 0-based column indices {0..p-1} into q groups.

    ``signs`` holds an optional per-column sign in {+1, -1} (all +1 by
    default); a -1 column replicates its latent column with a flipped
    sign.
    """

    groups: tuple
    signs: np.ndarray | None = None

    def __post_init__(self):
        groups = tuple(tuple(int(j) for j in g) for g in self.groups)
        if not groups or any(len(g) == 0 for g in groups):
            raise ValueError("groups must be non-empty")
        flat = [j for g in groups for j in g]
        p = len(flat)
        if sorted(flat) != list(range(p)):
            raise ValueError("groups must partition 0..p-1 exactly")
        object.__setattr__(self, "groups", groups)
        if self.signs is None:
            signs = np.ones(p)
        else:
            signs = np.ascontiguousarray(self.signs, dtype=np.float64)
            if signs.shape != (p,) or not np.all(np.abs(signs) == 1.0):
                raise ValueError("signs must be a length-p vector of +/-1")
        signs.flags.writeable = False
        object.__setattr__(self, "signs", signs)

    @property
    def p(self):
        return int(self.signs.shape[0])

    @property
    def q(self):
        return len(self.groups)

    @classmethod
    def singletons(cls, p):
        return cls(tuple((j,) for j in range(p)))

    @classmethod
    def balanced(cls, p, q):
        """q groups of near-equal size over 0..p-1, contiguous."""
        if not 1 <= q <= p:
            raise ValueError("need 1 <= q <= p")
        bounds = np.linspace(0, p, q + 1).astype(int)
        return cls(tuple(tuple(range(bounds[i], bounds[i + 1])) for i in range(q)))

    @classmethod
    def random(cls, p, q, seed):
        """Random surjective assignment of p columns to q groups."""
        if not 1 <= q <= p:
            raise ValueError("need 1 <= q <= p")
        rng = rng_stream(seed, STREAM_GROUPS)
        # guarantee every group non-empty, then assign the rest uniformly
        labels = np.concatenate([np.arange(q), rng.integers(0, q, size=p - q)])
        rng.shuffle(labels)
        groups = tuple(tuple(np.flatnonzero(labels == i)) for i in range(q))
        return cls(groups)


def replication_matrix(gs):
    """The q x p matrix with C[i, j] = signs[j] for j in group i, else 0.

    Every column is 1-sparse with a unit entry, so the induced-l1 matrix
    norm is 1.
    """
    C = np.zeros((gs.q, gs.p))
    for i, g in enumerate(gs.groups):
        for j in g:
            C[i, j] = gs.signs[j]
    return C


def sample_design(n, C, seed):
    """Draw A = B C with B an n x q matrix of i.i.d. N(0, 1) entries."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    C = np.ascontiguousarray(C, dtype=np.float64)
    B = rng_stream(seed, STREAM_DESIGN).standard_normal((n, C.shape[0]))
    return B @ C


def sample_signal(gs, s, seed, perturbed=False):
    """Group-sparse signal with s active groups and ||x||_1 = sqrt(s).

    Picks s distinct groups uniformly at random; within each active group
    all coefficients share the same magnitude (sign-matched to the column
    signs) and each group carries equal l1 mass.  ``perturbed=True``
    jitters the within-group magnitudes by up to 10% (for stress tests
    where exact replication symmetry should be broken); the exact
    ||x||_1 = sqrt(s) rescaling applies either way.
    """
    s = int(s)
    if s < 0 or s > gs.q:
        raise ValueError("need 0 <= s <= q")
    x = np.zeros(gs.p)
    if s == 0:
        return x
    rng = rng_stream(seed, STREAM_SIGNAL)
    active = rng.choice(gs.q, size=s, replace=False)
    for i in active:
        g = list(gs.groups[i])
        mags = np.full(len(g), 1.0 / (s * len(g)))
        if perturbed:
            mags *= 1.0 + 0.1 * rng.uniform(-1.0, 1.0, size=len(g))
        x[g] = gs.signs[g] * mags
    x *= np.sqrt(s) / np.abs(x).sum()
    return x


def sample_noise(n, eps, seed):
    """Gaussian vector rescaled so that (1/n) ||nu||_1 equals eps exactly."""
    n = int(n)
    if eps < 0.0:
        raise ValueError("eps must be non-negative")
    if eps == 0.0:
        return np.zeros(n)
    g = rng_stream(seed, STREAM_NOISE).standard_normal(n)
    return g * (n * eps / np.abs(g).sum())


class Dataset(NamedTuple):
    A: np.ndarray
    x_star: np.ndarray
    noise: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class GenerativeModel:
    """Bundle of the generative model: groups, C = replication(gs), n, s, eps.

    The theory behind the error bound is stated for q >= n; smaller q is
    allowed here but flagged with a warning.
    """

    gs: GroupStructure
    n: int
    s: int
    eps: float
    seed: int
    C: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.s <= self.gs.q:
            raise ValueError("need 0 <= s <= q")
        if self.eps < 0.0:
            raise ValueError("eps must be non-negative")
        C = replication_matrix(self.gs)
        C.flags.writeable = False
        object.__setattr__(self, "C", C)
        if self.gs.q < self.n:
            warnings.warn(
                f"latent dimension q={self.gs.q} is smaller than n={self.n}; "
                "the error-bound analysis assumes q >= n",
                stacklevel=2,
            )

    def generate(self):
        """Draw (A, x_star, noise, y) for this model's seed."""
        A = sample_design(self.n, self.C, self.seed)
        x_star = sample_signal(self.gs, self.s, self.seed)
        noise = sample_noise(self.n, self.eps, self.seed)
        return Dataset(A=A, x_star=x_star, noise=noise, y=A @ x_star + noise)
