"""First-order solvers for OWL-regularized regression.

Four problems are covered, all built on the OWL prox:

- squared loss, Lagrangian:   min 0.5 ||A x - y||_2^2 + omega(x)
  (accelerated proximal gradient with adaptive restart)
- absolute loss, Lagrangian:  min ||A x - y||_1 + omega(x)
  (primal-dual splitting; the dual step projects onto the l-inf ball)
- constrained, either loss:   min omega(x)  s.t.  (1/n)||A x - y||_2^2 <= eps^2
                              or              (1/n)||A x - y||_1   <= eps
  (bisection over a Lagrangian scale tau, exploiting the residual's
  monotonicity in tau)

Initialization is the zero vector everywhere, so solves are deterministic.
Non-convergence within ``max_iters`` is reported through
``Solution.converged`` rather than an exception; an infeasible constraint
raises ``InfeasibleProblemError``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import WeightVector, as_coefficients, owl_norm, _prox_raw

__all__ = [
    "Loss",
    "Formulation",
    "StepRule",
    "ProblemInstance",
    "SolverConfig",
    "Solution",
    "InfeasibleProblemError",
    "spectral_norm_sq",
    "solve_sq_lagrangian",
    "solve_abs_lagrangian",
    "solve_constrained",
    "solve",
    "objective",
    "is_feasible",
]


class Loss(enum.Enum):
    SQUARED_L2 = "sq"
    ABSOLUTE_L1 = "abs"


class Formulation(enum.Enum):
    LAGRANGIAN = "lagrangian"
    CONSTRAINED = "constrained"


class StepRule(enum.Enum):
    FIXED_FROM_SPECTRAL_NORM = "spectral"
    BACKTRACKING = "backtracking"


class InfeasibleProblemError(RuntimeError):
    """The residual constraint cannot be met by any coefficient vector."""


@dataclass(frozen=True)
class ProblemInstance:
    """A regression problem: design, observations, weights, and form.

    ``eps`` is the constraint level and must be a non-negative float for
    the constrained formulation (it is ignored for the Lagrangian one).
    """

    A: np.ndarray
    y: np.ndarray
    weights: WeightVector
    loss: Loss = Loss.SQUARED_L2
    formulation: Formulation = Formulation.LAGRANGIAN
    eps: float | None = None

    def __post_init__(self):
        A = np.ascontiguousarray(self.A, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("design matrix must be 2-D")
        if y.ndim != 1 or y.shape[0] != A.shape[0]:
            raise ValueError("y must be a vector with one entry per row of A")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
            raise ValueError("design and observations must be finite")
        if A.shape[1] != len(self.weights):
            raise ValueError("weight length must match the column count of A")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)
        if self.formulation is Formulation.CONSTRAINED:
            if self.eps is None or self.eps < 0.0:
                raise ValueError("constrained form requires eps >= 0")
            object.__setattr__(self, "eps", float(self.eps))

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def p(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class SolverConfig:
    """Iteration limits, tolerance, and step-size options.

    ``tol`` bounds the fixed-point residual (squared loss) or the
    primal-dual residual estimate (absolute loss).  ``sigma``/``tau`` are
    optional primal-dual step sizes; when omitted they are set from the
    spectral norm of the design.  ``seed`` is reserved for randomized
    initialization; the default initialization is the zero vector.
    """

    max_iters: int = 100_000
    tol: float = 1e-8
    step_rule: StepRule = StepRule.FIXED_FROM_SPECTRAL_NORM
    sigma: float | None = None
    tau: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class Solution:
    """Solver output: coefficients plus diagnostics.

    Residual fields are recomputed from ``x_hat`` after the iteration:
    ``residual_l2_sq_over_n = (1/n) ||A x - y||_2^2`` and
    ``residual_l1_over_n = (1/n) ||A x - y||_1``.  ``converged`` implies
    ``fixed_point_residual <= tol`` for the config that produced it.
    """

    x_hat: np.ndarray
    objective: float
    residual_l2_sq_over_n: float
    residual_l1_over_n: float
    fixed_point_residual: float
    iterations: int
    converged: bool


def _finish(prob, x, fpr, iters, converged, obj=None):
    r = prob.A @ x - prob.y
    n = max(prob.n, 1)
    if obj is None:
        obj = objective(prob, x)
    return Solution(
        x_hat=x,
        objective=float(obj),
        residual_l2_sq_over_n=float(r @ r / n),
        residual_l1_over_n=float(np.abs(r).sum() / n),
        fixed_point_residual=float(fpr),
        iterations=int(iters),
        converged=bool(converged),
    )


def spectral_norm_sq(A, iters=30, rtol=1e-6):
    """Largest eigenvalue of ``A.T @ A`` by power iteration.

    Starts from the normalized all-ones vector; stops early once the
    Rayleigh estimate is stable to ``rtol``.  The estimate approaches the
    true value from below, so step sizes derived from it get a small
    safety margin at the call sites.
    """
    p = A.shape[1]
    if p == 0 or A.shape[0] == 0:
        return 0.0
    v = np.full(p, 1.0 / math.sqrt(p))
    lam = 0.0
    for _ in range(iters):
        v = A.T @ (A @ v)
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            return 0.0
        v /= nrm
        if abs(nrm - lam) <= rtol * nrm:
            lam = nrm
            break
        lam = nrm
    return lam


def objective(prob, x):
    """Objective value at ``x``: the Lagrangian objective, or ``omega(x)``
    for the constrained forms (use :func:`is_feasible` for the constraint)."""
    x = as_coefficients(x, p=prob.p)
    reg = owl_norm(x, prob.weights)
    if prob.formulation is Formulation.CONSTRAINED:
        return reg
    r = prob.A @ x - prob.y
    if prob.loss is Loss.SQUARED_L2:
        return 0.5 * float(r @ r) + reg
    return float(np.abs(r).sum()) + reg


def _constraint_residual(prob, x):
    r = prob.A @ x - prob.y
    if prob.loss is Loss.SQUARED_L2:
        return float(r @ r) / prob.n
    return float(np.abs(r).sum()) / prob.n


def is_feasible(prob, x, rel_slack=0.0):
    """Whether ``x`` meets the residual constraint of a constrained problem."""
    if prob.formulation is not Formulation.CONSTRAINED:
        raise ValueError("feasibility is defined for constrained problems only")
    bound = prob.eps**2 if prob.loss is Loss.SQUARED_L2 else prob.eps
    return _constraint_residual(prob, x) <= bound * (1.0 + rel_slack)


def _fista(A, y, w_arr, cfg, x0=None):
    """Accelerated proximal gradient for 0.5||Ax - y||^2 + omega_w(x).

    Returns (x, fixed_point_residual, iterations, converged).  Convergence
    is declared when ||x - prox_{t w}(x - t A^T (A x - y))|| <= tol, with
    the certificate re-evaluated at the returned point.
    """
    n, p = A.shape
    lam_max = spectral_norm_sq(A)
    backtrack = cfg.step_rule is StepRule.BACKTRACKING
    # power iteration approaches ||A||_2^2 from below; inflate slightly so
    # the fixed step stays at or below 1/L
    L = lam_max * (1.0 + 1e-3) if lam_max > 0.0 else 1.0
    t = 1.0 / L
    w_t = t * w_arr

    x_old = np.zeros(p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    x = x_old.copy()
    Ax_old = A @ x_old
    Ax = Ax_old.copy()
    tk = 1.0
    beta = 0.0
    fpr = math.inf
    it = 0
    for it in range(1, cfg.max_iters + 1):
        yk = x + beta * (x - x_old)
        Ayk = Ax + beta * (Ax - Ax_old)
        grad = A.T @ (Ayk - y)
        if backtrack:
            f_yk = 0.5 * float(np.dot(Ayk - y, Ayk - y))
            while True:
                x_new = _prox_raw(yk - t * grad, w_t)
                Ax_new = A @ x_new
                dx = x_new - yk
                f_new = 0.5 * float(np.dot(Ax_new - y, Ax_new - y))
                if f_new <= f_yk + float(grad @ dx) + 0.5 * L * float(dx @ dx) + 1e-12:
                    break
                L *= 2.0
                t = 1.0 / L
                w_t = t * w_arr
        else:
            x_new = _prox_raw(yk - t * grad, w_t)
            Ax_new = A @ x_new
        if float(np.linalg.norm(x_new - yk)) <= cfg.tol:
            # certificate at the candidate itself; the prox-gradient map is
            # nonexpansive so this cannot exceed the proxy above
            g2 = A.T @ (Ax_new - y)
            fpr = float(np.linalg.norm(x_new - _prox_raw(x_new - t * g2, w_t)))
            if fpr <= cfg.tol:
                return x_new, fpr, it, True
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * tk * tk))
        if float(np.dot(yk - x_new, x_new - x)) > 0.0:
            t_next = 1.0  # adaptive restart: momentum was pointing uphill
        beta = (tk - 1.0) / t_next
        tk = t_next
        x_old, x = x, x_new
        Ax_old, Ax = Ax, Ax_new
    g2 = A.T @ (Ax - y)
    fpr = float(np.linalg.norm(x - _prox_raw(x - t * g2, w_t)))
    return x, fpr, it, fpr <= cfg.tol


def solve_sq_lagrangian(prob, cfg=SolverConfig()):
    """Solve min 0.5 ||A x - y||_2^2 + omega(x)."""
    if prob.loss is not Loss.SQUARED_L2 or prob.formulation is not Formulation.LAGRANGIAN:
        raise ValueError("expected a squared-loss Lagrangian problem")
    x, fpr, it, ok = _fista(prob.A, prob.y, prob.weights.w, cfg)
    return _finish(prob, x, fpr, it, ok)


def _chambolle_pock(A, y, w_arr, cfg, x0=None, z0=None):
    """Primal-dual splitting for ||Ax - y||_1 + omega_w(x).

    The dual update shifts by sigma*y and projects onto the l-inf unit
    ball (the conjugate of the l1 loss); the primal update is the OWL
    prox.  The primal-dual gap estimate is the combined primal and dual
    residual of the iteration, normalized by the gradient scale
    ``1 + ||A^T y||_2`` so that ``tol`` is meaningful across problem
    sizes; convergence is declared when it drops below tol.  Returns
    (x, z, gap, iters, converged).
    """
    n, p = A.shape
    L = math.sqrt(spectral_norm_sq(A))
    if L == 0.0:
        L = 1.0
    sigma = cfg.sigma if cfg.sigma is not None else 0.99 / L
    tau = cfg.tau if cfg.tau is not None else 0.99 / L
    if not (sigma > 0.0 and tau > 0.0):
        raise ValueError("primal-dual step sizes must be positive")
    w_tau = tau * w_arr
    scale = 1.0 + float(np.linalg.norm(A.T @ y))

    x = np.zeros(p) if x0 is None else np.asarray(x0, dtype=np.float64).copy()
    z = np.zeros(n) if z0 is None else np.clip(np.asarray(z0, dtype=np.float64), -1.0, 1.0)
    Ax = A @ x
    ATz = A.T @ z
    Axbar = Ax.copy()
    gap = math.inf
    it = 0
    # the residual estimate costs a third of an iteration, so evaluate it
    # on a fixed cadence (fixed, so results never depend on timing)
    check = 10
    for it in range(1, cfg.max_iters + 1):
        z_new = np.clip(z + sigma * (Axbar - y), -1.0, 1.0)
        ATz_new = A.T @ z_new
        x_new = _prox_raw(x - tau * ATz_new, w_tau)
        Ax_new = A @ x_new
        if it == 1 or it % check == 0 or it == cfg.max_iters:
            p_res = float(np.linalg.norm((x - x_new) / tau - (ATz - ATz_new)))
            d_res = float(np.linalg.norm((z - z_new) / sigma - (Ax - Ax_new)))
            gap = (p_res + d_res) / scale
        else:
            gap = math.inf
        Axbar = 2.0 * Ax_new - Ax  # overrelaxation uses the pre-update Ax
        x, z, Ax, ATz = x_new, z_new, Ax_new, ATz_new
        if gap <= cfg.tol:
            return x, z, gap, it, True
    return x, z, gap, it, False


def solve_abs_lagrangian(prob, cfg=SolverConfig()):
    """Solve min ||A x - y||_1 + omega(x)."""
    if prob.loss is not Loss.ABSOLUTE_L1 or prob.formulation is not Formulation.LAGRANGIAN:
        raise ValueError("expected an absolute-loss Lagrangian problem")
    x, _, gap, it, ok = _chambolle_pock(prob.A, prob.y, prob.weights.w, cfg)
    return _finish(prob, x, gap, it, ok)


_TAU_FLOOR = 1e-8
_MAX_BISECTIONS = 60
_REL_GAP = 1e-3
_BRACKET_RTOL = 1e-4


class _LagrangianPath:
    """Scaled Lagrangian solves min loss + tau * omega, warm-started.

    Warm starts only affect how fast each inner solve converges; the
    bisection outcome remains a deterministic function of the problem.
    """

    def __init__(self, prob, cfg):
        self.A, self.y, self.w = prob.A, prob.y, prob.weights.w
        self.sq = prob.loss is Loss.SQUARED_L2
        self.n = prob.n
        self.cfg = cfg
        self.total_iters = 0
        self._x0 = None
        self._z0 = None

    def solve(self, tau):
        if self.sq:
            x, fpr, it, ok = _fista(self.A, self.y, tau * self.w, self.cfg, x0=self._x0)
        else:
            x, z, fpr, it, ok = _chambolle_pock(
                self.A, self.y, tau * self.w, self.cfg, x0=self._x0, z0=self._z0
            )
            self._z0 = z
        self._x0 = x
        self.total_iters += it
        r = self.A @ x - self.y
        resid = float(r @ r) / self.n if self.sq else float(np.abs(r).sum()) / self.n
        return x, resid, fpr, ok


def _zero_collapse_tau(prob):
    """A tau large enough that the Lagrangian solution is exactly zero.

    Uses the l1 lower bound mean(w) * ||x||_1 <= omega(x), whose dual-ball
    inclusion makes tau >= ||A^T g||_inf / mean(w) sufficient, with g = y
    for the squared loss and g = sign(y) for the absolute loss.
    """
    g = prob.y if prob.loss is Loss.SQUARED_L2 else np.sign(prob.y)
    tau0 = float(np.abs(prob.A.T @ g).max()) / prob.weights.mean
    return max(tau0 * 1.01, 1e-6)


def solve_constrained(prob, cfg=SolverConfig()):
    """Minimize omega(x) subject to the normalized residual constraint.

    Bisects (geometrically) over the scale tau of min loss + tau * omega,
    whose residual is non-decreasing in tau.  Terminates once a probed
    residual lands in [c, c * (1 + 1e-3)] for constraint level c or the
    bracket is exhausted, and returns the feasible iterate with the
    smallest omega seen.  Under the absolute loss the residual can jump
    over the band at a critical tau (the Lagrangian solution set is a
    segment there); both the loss and omega are affine on that segment, so
    the feasible and infeasible end points are blended to land the
    residual on the constraint.  For eps = 0 the band degenerates and tau
    is instead driven down geometrically until the fit is numerically
    exact.  Raises ``InfeasibleProblemError`` when even the unregularized
    least-squares / least-absolute fit misses the constraint.
    """
    if prob.formulation is not Formulation.CONSTRAINED:
        raise ValueError("expected a constrained problem")
    sq = prob.loss is Loss.SQUARED_L2
    c = prob.eps**2 if sq else prob.eps
    c_hi = c * (1.0 + _REL_GAP)

    zero = np.zeros(prob.p)
    r0 = _constraint_residual(prob, zero)

    # absolute acceptance floor: used when eps = 0, where "feasible" means
    # numerically exact; scales with the solver tolerance for the
    # absolute loss because the primal-dual residual estimate limits how
    # exactly the l1 fit can be driven to zero
    if sq:
        zero_floor = max(1e-12, cfg.tol**2) * max(1.0, r0)
    else:
        zero_floor = max(1e-10, cfg.tol) * max(1.0, r0)
    accept = max(c_hi, zero_floor)

    if r0 <= accept:
        return _finish(prob, zero, 0.0, 0, True, obj=0.0)

    path = _LagrangianPath(prob, cfg)
    best = None  # (omega, x, fpr, ok) over feasible iterates
    worst = None  # (resid, x, fpr, ok): infeasible iterate closest to c

    def consider(x, resid, fpr, ok):
        nonlocal best, worst
        if resid <= accept:
            om = owl_norm(x, prob.weights)
            if best is None or om < best[0]:
                best = (om, x, fpr, ok)
        elif worst is None or resid < worst[0]:
            worst = (resid, x, fpr, ok)

    # feasibility: compare the best achievable residual to the constraint
    x_ls, *_ = np.linalg.lstsq(prob.A, prob.y, rcond=None)
    r_ls = prob.A @ x_ls - prob.y
    if sq:
        r_min = float(r_ls @ r_ls) / prob.n
        if r_min > accept:
            raise InfeasibleProblemError(
                f"least-squares residual {r_min:.6g} exceeds the constraint {c:.6g}"
            )
    else:
        # the l1 residual of the least-squares fit upper-bounds the minimum
        r_min_ub = float(np.abs(r_ls).sum()) / prob.n
        if r_min_ub > accept:
            x_lo, resid_lo, fpr_lo, ok_lo = path.solve(_TAU_FLOOR)
            if resid_lo > accept:
                raise InfeasibleProblemError(
                    f"least-absolute residual {resid_lo:.6g} exceeds the constraint {c:.6g}"
                )
            consider(x_lo, resid_lo, fpr_lo, ok_lo)

    tau_hi = _zero_collapse_tau(prob)

    if c == 0.0:
        # drive tau down until the fit is numerically exact
        tau = tau_hi
        x, fpr = zero, 0.0
        for _ in range(_MAX_BISECTIONS):
            x, resid, fpr, ok = path.solve(tau)
            consider(x, resid, fpr, ok)
            if resid <= accept or tau <= _TAU_FLOOR:
                break
            tau = max(tau / 64.0, _TAU_FLOOR)
        if best is None:
            return _finish(prob, x, fpr, path.total_iters, False)
        om, x, fpr, ok = best
        return _finish(prob, x, fpr, path.total_iters, ok, obj=om)

    # confirm the collapse point (doubling as a safety net), then bisect
    for _ in range(_MAX_BISECTIONS):
        x, resid, fpr, ok = path.solve(tau_hi)
        consider(x, resid, fpr, ok)
        if not np.any(x):
            break
        tau_hi *= 2.0

    lo, hi = _TAU_FLOOR, tau_hi
    for _ in range(_MAX_BISECTIONS):
        if hi / lo <= 1.0 + _BRACKET_RTOL:
            break
        mid = math.sqrt(lo * hi)
        x, resid, fpr, ok = path.solve(mid)
        consider(x, resid, fpr, ok)
        if c <= resid <= c_hi and best is not None:
            break
        if resid > c:
            hi = mid
        else:
            lo = mid

    if best is not None and worst is not None and best[0] > 0.0:
        # blend across the jump: residual and omega are affine between the
        # two end points of the critical segment, so move the residual up
        # to the constraint
        _, x_f, fpr_f, ok_f = best
        _, x_i, fpr_i, ok_i = worst
        th_lo, th_hi = 0.0, 1.0
        for _ in range(40):
            th = 0.5 * (th_lo + th_hi)
            xb = (1.0 - th) * x_f + th * x_i
            if _constraint_residual(prob, xb) <= c:
                th_lo = th
            else:
                th_hi = th
        if th_lo > 0.0:
            xb = (1.0 - th_lo) * x_f + th_lo * x_i
            consider(xb, _constraint_residual(prob, xb), max(fpr_f, fpr_i), ok_f and ok_i)

    if best is None:
        # feasible only below the tau floor; fall back to the floor solve
        x, resid, fpr, ok = path.solve(_TAU_FLOOR)
        consider(x, resid, fpr, ok)
        if best is None:
            return _finish(prob, x, fpr, path.total_iters, False)
    om, x, fpr, ok = best
    return _finish(prob, x, fpr, path.total_iters, ok, obj=om)


def solve(prob, cfg=SolverConfig()):
    """Dispatch to the solver matching the problem's loss and formulation."""
    if prob.formulation is Formulation.CONSTRAINED:
        return solve_constrained(prob, cfg)
    if prob.loss is Loss.SQUARED_L2:
        return solve_sq_lagrangian(prob, cfg)
    return solve_abs_lagrangian(prob, cfg)
