"""Command line front end.

Subcommands: prox, solve, generate, check-clusters, experiment.
Exit codes: 0 success, 2 parse/usage error, 3 infeasible constraint,
4 property violation (a failed clustering or bound check).

File formats and the experiment config grammar are documented in the
README.  All numeric output uses 17 significant digits, and every output
is a deterministic function of the inputs, flags, and seed.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import check_abs_condition, check_sq_condition, detect_clusters
from .core import prox_owl
from .datagen import GenerativeModel, GroupStructure
from .experiment import ExperimentConfig, run_experiment
from .fileio import build_weights, fmt, read_matrix, read_vector, write_matrix, write_vector
from .solvers import (
    Formulation,
    InfeasibleProblemError,
    Loss,
    ProblemInstance,
    SolverConfig,
    solve,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_VIOLATION = 4


def _parse_groups(spec):
    """Groups like ``0,1|2|3``; a ``-`` prefix flips that column's sign."""
    groups = []
    signs = {}
    for chunk in spec.split("|"):
        members = []
        for tok in chunk.split(","):
            tok = tok.strip()
            if not tok:
                raise ValueError(f"empty index in group spec {spec!r}")
            sign = 1.0
            if tok.startswith("-"):
                sign = -1.0
                tok = tok[1:]
            j = int(tok)
            members.append(j)
            signs[j] = sign
        groups.append(tuple(members))
    p = sum(len(g) for g in groups)
    sign_vec = np.array([signs.get(j, 1.0) for j in range(p)])
    return GroupStructure(tuple(groups), signs=sign_vec)


def _solver_config(args):
    return SolverConfig(max_iters=args.max_iters, tol=args.tol)


def _print_clusters(x, tol):
    report = detect_clusters(x, tol)
    for idx, mag in zip(report.clusters, report.magnitudes):
        print(f"cluster {list(idx)}: magnitude {fmt(mag)}")


def cmd_prox(args):
    u = read_vector(args.input)
    w = build_weights(args.weights, u.shape[0])
    x = prox_owl(u, w)
    print(",".join(fmt(v) for v in x))
    return EXIT_OK


def _problem_from_args(args):
    A = read_matrix(args.design)
    y = read_vector(args.y)
    w = build_weights(args.weights, A.shape[1])
    loss = Loss(args.loss)
    formulation = Formulation(args.formulation)
    eps = args.eps
    if formulation is Formulation.CONSTRAINED and eps is None:
        raise ValueError("--eps is required for the constrained formulation")
    return ProblemInstance(A, y, w, loss=loss, formulation=formulation, eps=eps)


def cmd_solve(args):
    prob = _problem_from_args(args)
    sol = solve(prob, _solver_config(args))
    write_vector(args.out, sol.x_hat)
    print(f"wrote {args.out}")
    print(f"converged: {str(sol.converged).lower()}")
    print(f"iterations: {sol.iterations}")
    print(f"objective: {fmt(sol.objective)}")
    print(f"residual_l2_sq_over_n: {fmt(sol.residual_l2_sq_over_n)}")
    print(f"residual_l1_over_n: {fmt(sol.residual_l1_over_n)}")
    print(f"fixed_point_residual: {fmt(sol.fixed_point_residual)}")
    _print_clusters(sol.x_hat, args.cluster_tol)
    return EXIT_OK


def cmd_generate(args):
    gs = _parse_groups(args.groups)
    model = GenerativeModel(gs, n=args.n, s=args.s, eps=args.eps, seed=args.seed)
    data = model.generate()
    os.makedirs(args.out_dir, exist_ok=True)
    write_matrix(os.path.join(args.out_dir, "A.csv"), data.A)
    write_matrix(os.path.join(args.out_dir, "C.csv"), model.C)
    write_vector(os.path.join(args.out_dir, "y.csv"), data.y)
    write_vector(os.path.join(args.out_dir, "xstar.csv"), data.x_star)
    meta = {
        "groups": [list(g) for g in gs.groups],
        "signs": [int(v) for v in gs.signs],
        "n": args.n,
        "p": gs.p,
        "q": gs.q,
        "s": args.s,
        "eps": args.eps,
        "seed": args.seed,
        "noise_l1_over_n": fmt(np.abs(data.noise).sum() / args.n),
    }
    with open(os.path.join(args.out_dir, "meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote A.csv, C.csv, y.csv, xstar.csv, meta.json to {args.out_dir}")
    return EXIT_OK


def cmd_check_clusters(args):
    A = read_matrix(args.design)
    y = read_vector(args.y)
    x = read_vector(args.solution)
    if x.shape[0] != A.shape[1]:
        raise ValueError("solution length must match the design column count")
    w = build_weights(args.weights, A.shape[1])
    loss = Loss(args.loss)
    delta = w.delta
    violations = 0
    for i in range(A.shape[1]):
        for j in range(i + 1, A.shape[1]):
            if loss is Loss.SQUARED_L2:
                cond = check_sq_condition(y, A[:, i], A[:, j], delta, s_i=x[i], s_j=x[j])
            else:
                cond = check_abs_condition(A[:, i], A[:, j], delta, s_i=x[i], s_j=x[j])
            clustered = abs(abs(x[i]) - abs(x[j])) <= args.cluster_tol
            line = f"pair ({i},{j}): condition={str(cond).lower()} clustered={str(clustered).lower()}"
            if cond and not clustered:
                violations += 1
                line += " VIOLATION"
            print(line)
    print(f"violations: {violations}")
    return EXIT_VIOLATION if violations else EXIT_OK


def cmd_experiment(args):
    with open(args.config, encoding="utf-8") as fh:
        config = ExperimentConfig.from_text(fh.read())
    overrides = {}
    if args.out is not None:
        overrides["out"] = args.out
    if overrides:
        config = ExperimentConfig(
            **{**{f: getattr(config, f) for f in config.__dataclass_fields__}, **overrides}
        )
    if config.out is None:
        raise ValueError("no output path: set 'out' in the config or pass --out")

    def progress(row):
        print(
            f"cell n={row.n} s={row.s} q={row.q} p={row.p} eps={fmt(row.eps)}: "
            f"mean={fmt(row.mean_error)} bound={fmt(row.bound_rhs)} ratio={fmt(row.ratio)} "
            f"violations={row.cluster_violations} nonconverged={row.nonconverged}"
        )

    report = run_experiment(config, progress=progress)
    report.write(config.out)
    print(f"wrote {config.out}")
    if not report.passed:
        print("FAIL: a cell exceeded the bound or produced clustering violations", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="owlreg",
        description="Ordered weighted l1 regularized regression tools",
    )
    parser.add_argument("--version", action="version", version=f"owlreg {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="base seed for generation")
    parser.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    parser.add_argument("--max-iters", type=int, default=100_000, help="solver iteration cap")
    parser.add_argument("--cluster-tol", type=float, default=1e-6, help="cluster magnitude tolerance")
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="reserved; trials are seeded per (cell, trial) so results do not depend on it",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_prox = sub.add_parser("prox", help="evaluate the OWL prox of a vector")
    p_prox.add_argument("--input", required=True, help="vector CSV (column, or one comma row)")
    p_prox.add_argument("--weights", required=True, help="uniform:LAM | oscar:L1:L2 | slope:Q | file:PATH")
    p_prox.set_defaults(func=cmd_prox)

    p_solve = sub.add_parser("solve", help="solve a regression problem from files")
    p_solve.add_argument("--design", required=True, help="design matrix CSV")
    p_solve.add_argument("--y", required=True, help="observation vector CSV")
    p_solve.add_argument("--weights", required=True)
    p_solve.add_argument("--loss", choices=[l.value for l in Loss], default="sq")
    p_solve.add_argument(
        "--formulation", choices=[f.value for f in Formulation], default="lagrangian"
    )
    p_solve.add_argument("--eps", type=float, default=None, help="constraint level (constrained form)")
    p_solve.add_argument("--out", default="xhat.csv", help="where to write the solution vector")
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("generate", help="generate a synthetic dataset")
    p_gen.add_argument("--groups", required=True, help="e.g. '0,1|2|3'; '-' flips a column sign")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--s", type=int, required=True)
    p_gen.add_argument("--eps", type=float, default=0.0)
    p_gen.add_argument("--out-dir", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_chk = sub.add_parser("check-clusters", help="verify clustering conditions post hoc")
    p_chk.add_argument("--design", required=True)
    p_chk.add_argument("--y", required=True)
    p_chk.add_argument("--solution", required=True)
    p_chk.add_argument("--weights", required=True)
    p_chk.add_argument("--loss", choices=[l.value for l in Loss], default="sq")
    p_chk.set_defaults(func=cmd_check_clusters)

    p_exp = sub.add_parser("experiment", help="run a Monte-Carlo bound-verification experiment")
    p_exp.add_argument("--config", required=True, help="flat key = value config file")
    p_exp.add_argument("--out", default=None, help="report CSV path (overrides config)")
    p_exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleProblemError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
