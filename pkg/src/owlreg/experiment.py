"""Monte-Carlo verification of the finite-sample error bound.

Runs a grid of (n, s, q, p, eps) cells.  Each trial draws a replication
design A = B C with balanced groups, a group-sparse signal, and
l1-bounded noise, solves the configured problem, and records the error
``||C (x_hat - x_star)||_2``.  Cell rows compare the empirical mean error
against the theoretical bound (``ratio = mean / bound``) and count
within-group clustering violations.

Per-trial seeds derive from (base seed, cell index, trial index), so the
report is a pure function of the config and trials could run in any
order or concurrently without changing results.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .analysis import BoundInputs, BoundVariant, bound_rhs, c_metric, matrix_l1_norm
from .datagen import GenerativeModel, GroupStructure, replication_matrix
from .fileio import build_weights, fmt, parse_kv_config
from .solvers import Formulation, Loss, ProblemInstance, SolverConfig, solve

__all__ = ["ExperimentConfig", "CellResult", "ExperimentReport", "run_experiment"]

_REPORT_COLUMNS = (
    "n",
    "s",
    "q",
    "p",
    "eps",
    "trials",
    "nonconverged",
    "mean_error",
    "std_error",
    "bound_rhs",
    "ratio",
    "cluster_violations",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Grid and solver settings for one experiment run."""

    n_values: tuple
    s_values: tuple
    q_values: tuple
    p_values: tuple
    eps_values: tuple
    weights: str = "oscar:1.0:0.01"
    loss: Loss = Loss.ABSOLUTE_L1
    formulation: Formulation = Formulation.CONSTRAINED
    trials: int = 50
    seed: int = 0
    tol: float = 1e-4
    max_iters: int = 40_000
    cluster_tol: float = 1e-6
    threads: int = 1
    out: str | None = None

    def __post_init__(self):
        for name in ("n_values", "s_values", "q_values", "p_values", "eps_values"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise ValueError(f"{name} must be non-empty")
            object.__setattr__(self, name, vals)
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    @classmethod
    def from_text(cls, text):
        """Parse the flat key = value config grammar (see README)."""
        kv = parse_kv_config(text)

        def ints(key, default=None):
            if key not in kv:
                if default is None:
                    raise ValueError(f"missing config key {key!r}")
                return default
            return tuple(int(tok) for tok in kv[key].split(","))

        def floats(key, default):
            if key not in kv:
                return default
            return tuple(float(tok) for tok in kv[key].split(","))

        known = {
            "n", "s", "q", "p", "eps", "weights", "loss", "formulation",
            "trials", "seed", "tol", "max_iters", "cluster_tol", "threads", "out",
        }
        unknown = set(kv) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            n_values=ints("n"),
            s_values=ints("s"),
            q_values=ints("q"),
            p_values=ints("p"),
            eps_values=floats("eps", (0.0,)),
            weights=kv.get("weights", "oscar:1.0:0.01"),
            loss=Loss(kv.get("loss", "abs")),
            formulation=Formulation(kv.get("formulation", "constrained")),
            trials=int(kv.get("trials", "50")),
            seed=int(kv.get("seed", "0")),
            tol=float(kv.get("tol", "1e-4")),
            max_iters=int(kv.get("max_iters", "40000")),
            cluster_tol=float(kv.get("cluster_tol", "1e-6")),
            threads=int(kv.get("threads", "1")),
            out=kv.get("out"),
        )

    def cells(self):
        """Grid cells in deterministic order."""
        out = []
        for n in self.n_values:
            for s in self.s_values:
                for q in self.q_values:
                    for p in self.p_values:
                        for eps in self.eps_values:
                            out.append((n, s, q, p, eps))
        return out


@dataclass(frozen=True)
class CellResult:
    n: int
    s: int
    q: int
    p: int
    eps: float
    trials: int
    nonconverged: int
    mean_error: float
    std_error: float
    bound_rhs: float
    ratio: float
    cluster_violations: int


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple

    @property
    def passed(self):
        """All cells have ratio <= 1 and no clustering violations."""
        return all(r.ratio <= 1.0 and r.cluster_violations == 0 for r in self.rows)

    def to_csv(self):
        lines = [",".join(_REPORT_COLUMNS)]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        str(r.n),
                        str(r.s),
                        str(r.q),
                        str(r.p),
                        fmt(r.eps),
                        str(r.trials),
                        str(r.nonconverged),
                        fmt(r.mean_error),
                        fmt(r.std_error),
                        fmt(r.bound_rhs),
                        fmt(r.ratio),
                        str(r.cluster_violations),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())


def trial_seed(base_seed, cell_index, trial_index):
    """Deterministic per-trial seed; safe under any execution order."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(cell_index), int(trial_index)))
    return int(ss.generate_state(1, np.uint64)[0])


def _count_group_violations(x, gs, tol):
    """Pairs within a group whose sign-adjusted coefficients differ > tol."""
    bad = 0
    for g in gs.groups:
        vals = gs.signs[list(g)] * x[list(g)]
        for a in range(len(vals)):
            for b in range(a + 1, len(vals)):
                if abs(vals[a] - vals[b]) > tol:
                    bad += 1
    return bad


def run_cell(config, cell_index, cell):
    n, s, q, p, eps = cell
    if not 1 <= q <= p:
        raise ValueError(f"cell {cell}: need 1 <= q <= p")
    if s > q:
        raise ValueError(f"cell {cell}: need s <= q")
    gs = GroupStructure.balanced(p, q)
    C = replication_matrix(gs)
    weights = build_weights(config.weights, p)
    solver_cfg = SolverConfig(max_iters=config.max_iters, tol=config.tol)
    errors = []
    nonconverged = 0
    violations = 0
    for t in range(config.trials):
        with warnings.catch_warnings():
            # grids here deliberately probe both sides of the q >= n regime
            warnings.simplefilter("ignore", UserWarning)
            model = GenerativeModel(gs, n=n, s=s, eps=eps, seed=trial_seed(config.seed, cell_index, t))
        data = model.generate()
        prob = ProblemInstance(
            data.A,
            data.y,
            weights,
            loss=config.loss,
            formulation=config.formulation,
            eps=eps if config.formulation is Formulation.CONSTRAINED else None,
        )
        sol = solve(prob, solver_cfg)
        if not sol.converged:
            nonconverged += 1
            continue
        errors.append(c_metric(sol.x_hat, data.x_star, C))
        violations += _count_group_violations(sol.x_hat, gs, config.cluster_tol)
    mean = float(np.mean(errors)) if errors else math.nan
    std = float(np.std(errors, ddof=1)) if len(errors) > 1 else 0.0
    rhs = bound_rhs(
        BoundInputs(
            s=s,
            n=n,
            p=p,
            q=q,
            w1_over_wbar=weights.max / weights.mean,
            C_l1_norm=matrix_l1_norm(C),
            eps=eps,
        ),
        BoundVariant.GENERAL_Q,
    )
    if rhs > 0.0:
        ratio = mean / rhs if errors else math.nan
    else:
        ratio = 0.0 if (errors and mean == 0.0) else math.inf
    return CellResult(
        n=n,
        s=s,
        q=q,
        p=p,
        eps=eps,
        trials=config.trials,
        nonconverged=nonconverged,
        mean_error=mean,
        std_error=std,
        bound_rhs=rhs,
        ratio=ratio,
        cluster_violations=violations,
    )


def run_experiment(config, progress=None):
    """Run every grid cell; returns an :class:`ExperimentReport`.

    ``progress`` is an optional callable invoked with each finished
    :class:`CellResult` (the CLI uses it for per-cell lines).
    """
    rows = []
    for ci, cell in enumerate(config.cells()):
        row = run_cell(config, ci, cell)
        if progress is not None:
            progress(row)
        rows.append(row)
    return ExperimentReport(rows=tuple(rows))
