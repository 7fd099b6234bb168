"""Command line interface: ``glram gen|select|regress|oracle|experiment|hardness``.

Exit codes: 0 success, 2 argument error, 3 capability/budget error,
4 numerical failure.  ``GLRAM_LOG`` (error|info|debug) sets log verbosity.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from . import io
from .errors import (BudgetError, CapabilityError, GenerationError, LemmaPreconditionError,
                     SolverError)
from .experiments import (StageError, costs_csv, hardness_csv, run_experiment,
                          run_hardness)
from .instances import (NoiseModel, gen_experiment_block, gen_huber_hard,
                        gen_identity_jl, gen_planted, gen_reverse_huber_hard)
from .loss import HUBER, L1, check_ati, parse_loss
from .matrix import RngState, as_generator, numerical_rank
from .oracle import cramer_coeffs, l0_bruteforce, monte_carlo_lemma21, scan_regression_1d
from .regression import batch_regress, solve_irls, solve_l0
from .selector import SelectorConfig, fit_back, select_columns

log = logging.getLogger("glram")

EXIT_ARGUMENT, EXIT_CAPABILITY, EXIT_NUMERICAL = 2, 3, 4


def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text, path):
    if path:
        io.atomic_write_text(path, text)
    else:
        sys.stdout.write(text)


def _seed(args):
    return args.seed if args.seed is not None else args.global_seed


# -- subcommands ---------------------------------------------------------------

def cmd_gen(args):
    seed = RngState(_seed(args))
    truth = noise = None
    if args.kind == "exp3block":
        inst = gen_experiment_block(args.n, args.kprime, seed=seed)
        A, truth, noise = inst.A, inst.A_star, inst.Delta
    elif args.kind == "huber_hard":
        inst = gen_huber_hard(args.n, args.k, seed=seed)
        A, truth, noise = inst.A, inst.A_star, inst.Delta
    elif args.kind == "reverse_huber":
        A = gen_reverse_huber_hard(args.n)
    elif args.kind == "identity_jl":
        A, truth, _ = gen_identity_jl(args.n, args.eps, seed=seed)
        noise = A - truth
    else:
        model = NoiseModel(args.noise_model, sigma=args.sigma, density=args.density,
                           magnitude=args.magnitude)
        inst = gen_planted(args.n, args.k, model, seed=seed)
        A, truth, noise = inst.A, inst.A_star, inst.Delta
    io.write_matrix(args.out, A, args.format)
    for path, M in ((args.truth, truth), (args.noise, noise)):
        if path:
            if M is None:
                raise ValueError(f"kind {args.kind} has no truth/noise decomposition")
            io.write_matrix(path, M, args.format)
    return 0


def _selector_config(args):
    return SelectorConfig(
        args.k, preset=args.preset, sample_size=args.sample_size,
        drop_fraction=args.drop_fraction, repeats_per_round=args.repeats,
        stop_threshold=args.stop_threshold, seed=RngState(_seed(args)))


def cmd_select(args):
    g = parse_loss(args.loss)
    A = io.read_matrix(args.matrix)
    cfg = _selector_config(args)
    trace = select_columns(A, g, cfg, threads=args.threads)
    X, cost = fit_back(A, trace.final_S, g)
    payload = {"schema": "glram-trace/1", "loss": str(g), "config": cfg.to_dict(),
               **trace.to_dict(), "fit_cost": cost}
    _emit(_dump_json(payload), args.out)
    if args.x_out:
        io.write_matrix(args.x_out, X, args.format)
    return 0


def cmd_regress(args):
    g = parse_loss(args.loss)
    A = io.read_matrix(args.a)
    B = io.read_matrix(args.b)
    out = batch_regress(g, A, B)
    io.write_matrix(args.out, out.X, args.format)
    if args.costs:
        io.write_matrix(args.costs, out.v.reshape(-1, 1), args.format)
    return 0


def _random_low_rank(gen, rows, cols, rank):
    return gen.standard_normal((rows, rank)) @ gen.standard_normal((rank, cols))


def cmd_oracle(args):
    gen = as_generator(RngState(_seed(args)))
    if args.check == "lemma21":
        M = _random_low_rank(gen, args.rows, args.n, args.k)
        rep = monte_carlo_lemma21(M, args.k, trials=args.trials, rng=gen)
        result = {"check": "lemma21", "m": args.n, "k": args.k, "rank": numerical_rank(M),
                  "trials": rep.trials, "event_frequency": rep.event_frequency,
                  "lemma22_frequency": rep.lemma22_frequency,
                  "passed": rep.event_frequency >= 0.5 - 3 * (0.25 / rep.trials) ** 0.5}
    elif args.check == "cramer":
        worst, checked = 0.0, 0
        for _ in range(args.trials):
            M = _random_low_rank(gen, args.rows, args.n, args.k)
            perm = gen.permutation(args.n)
            H, i = perm[:2 * args.k], int(perm[2 * args.k])
            try:
                alpha = cramer_coeffs(M, H, i)
            except LemmaPreconditionError:
                continue
            checked += 1
            worst = max(worst, float(np.max(np.abs(alpha), initial=0.0)))
        result = {"check": "cramer", "instances": checked, "max_abs_coeff": worst,
                  "passed": worst <= 1 + 1e-9}
    elif args.check == "l0":
        worst = 0.0
        for _ in range(args.trials):
            A = gen.standard_normal((args.rows, args.k))
            b = A @ gen.standard_normal(args.k)
            b[gen.choice(args.rows, size=1)] += 1.0 + gen.random()
            _, cost = solve_l0(A, b)
            opt = l0_bruteforce(A, b)
            worst = max(worst, cost / opt if opt else (0.0 if cost == 0 else np.inf))
        result = {"check": "l0", "trials": args.trials, "worst_ratio": worst,
                  "passed": worst <= args.k}
    elif args.check == "bracket":
        worst = 0.0
        violations = 0
        for t in range(args.trials):
            g = HUBER if t % 2 == 0 else L1
            a = gen.standard_normal(args.rows)
            b = a * gen.standard_normal() + gen.standard_normal(args.rows)
            v = float(solve_irls(g, a[:, None], b[:, None]).v[0])
            _, opt = scan_regression_1d(g, a, b)
            violations += not (opt - 1e-9 * max(1.0, opt) <= v <= 2 * opt + 1e-6)
            worst = max(worst, v / opt if opt > 0 else 1.0)
        result = {"check": "bracket", "trials": args.trials, "worst_ratio": worst,
                  "violations": violations, "passed": violations == 0}
    elif args.check == "ati":
        g = parse_loss(args.loss)
        t = max(2, args.k)
        rep = check_ati(g, t, trials=args.trials, rng=gen)
        result = {"check": "ati", "loss": str(g), "t": t, "trials": rep.trials,
                  "bound": rep.bound, "max_ratio": rep.max_ratio, "passed": rep.passed}
    else:
        raise ValueError(f"unknown check {args.check!r}")
    _emit(_dump_json(result), args.out)
    return 0


def cmd_experiment(args):
    res = run_experiment(args.n, k=args.k, seed=_seed(args), preset=args.preset,
                         kprime=args.kprime, l1_iters=args.l1_iters, dry_run=args.dry_run,
                         timing=args.timing, threads=args.threads)
    os.makedirs(args.out_dir, exist_ok=True)
    path = lambda name: os.path.join(args.out_dir, name)
    if not args.dry_run:
        ext = "bin" if args.format == "bin" else "csv"
        files = {"A": res.A, "ours_X": res.ours_X, "svd_B": res.svd_B,
                 "l1_U": res.l1_U, "l1_V": res.l1_V}
        res.report["files"] = {}
        for name, M in files.items():
            io.write_matrix(path(f"{name}.{ext}"), M, args.format)
            res.report["files"][name] = f"{name}.{ext}"
        io.atomic_write_text(path("costs.csv"), costs_csv(res.report))
    io.atomic_write_text(path("report.json"), _dump_json(res.report))
    return 0


def cmd_hardness(args):
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows, increasing = run_hardness(args.kind, sizes, seed=_seed(args))
    _emit(hardness_csv(rows), args.out)
    if args.out:
        sys.stdout.write(_dump_json({"kind": args.kind, "increasing": increasing}))
    return 0


# -- parser --------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="overrides the global --seed")

    p = argparse.ArgumentParser(prog="glram", description="Column subset selection for entrywise low-rank approximation.")
    p.add_argument("--seed", dest="global_seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("csv", "bin"), default="csv",
                   help="format for matrices written by any subcommand")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a test matrix")
    g.add_argument("--kind", required=True,
                   choices=("exp3block", "huber_hard", "reverse_huber", "identity_jl", "planted"))
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kprime", type=int, default=None)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--eps", type=float, default=0.25)
    g.add_argument("--noise-model", default="mixed", choices=("gaussian", "sparse_outliers", "mixed"))
    g.add_argument("--sigma", type=float, default=0.01)
    g.add_argument("--density", type=float, default=0.02)
    g.add_argument("--magnitude", type=float, default=10.0)
    g.add_argument("--out", required=True)
    g.add_argument("--truth")
    g.add_argument("--noise")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("select", parents=[common], help="run column subset selection")
    s.add_argument("--loss", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--preset", choices=("theory", "experiment"), default="experiment")
    s.add_argument("--sample-size", type=int)
    s.add_argument("--drop-fraction", type=float)
    s.add_argument("--repeats", type=int)
    s.add_argument("--stop-threshold", type=int)
    s.add_argument("--matrix", required=True)
    s.add_argument("--out")
    s.add_argument("--x-out", help="also write the fitted coefficient matrix")
    s.set_defaults(func=cmd_select)

    r = sub.add_parser("regress", parents=[common], help="multiple-response regression")
    r.add_argument("--loss", required=True)
    r.add_argument("--a", required=True)
    r.add_argument("--b", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--costs")
    r.set_defaults(func=cmd_regress)

    o = sub.add_parser("oracle", parents=[common], help="brute-force lemma checks")
    o.add_argument("--check", required=True, choices=("lemma21", "cramer", "l0", "bracket", "ati"))
    o.add_argument("--n", type=int, default=12, help="columns (lemma21, cramer)")
    o.add_argument("--loss", default="huber:tau=1", help="loss for the ati check")
    o.add_argument("--rows", type=int, default=6, help="rows of each random instance")
    o.add_argument("--k", type=int, default=2, help="rank, or t for the ati check")
    o.add_argument("--trials", type=int, default=2000)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", parents=[common], help="block-diagonal comparison run")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, default=1)
    e.add_argument("--kprime", type=int)
    e.add_argument("--preset", choices=("theory", "experiment"), default="experiment")
    e.add_argument("--l1-iters", type=int, default=50)
    e.add_argument("--out-dir", required=True)
    e.add_argument("--dry-run", action="store_true")
    e.add_argument("--timing", action="store_true",
                   help="record wall time in the report (breaks byte-identical reruns)")
    e.set_defaults(func=cmd_experiment)

    h = sub.add_parser("hardness", parents=[common], help="hardness ratio sweep")
    h.add_argument("--kind", required=True, choices=("huber", "reverse_huber"))
    h.add_argument("--sizes", default="64,256,1024")
    h.add_argument("--out")
    h.set_defaults(func=cmd_hardness)
    return p


def main(argv=None):
    level = os.environ.get("GLRAM_LOG", "error").upper()
    logging.basicConfig(level=getattr(logging, level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        code = _exit_code(exc.original)
        print(f"glram: error: {exc}", file=sys.stderr)
        return code
    except Exception as exc:
        code = _exit_code(exc)
        if code is None:
            raise
        print(f"glram: error: {exc}", file=sys.stderr)
        return code


def _exit_code(exc):
    if isinstance(exc, (CapabilityError, BudgetError)):
        return EXIT_CAPABILITY
    if isinstance(exc, (SolverError, GenerationError, np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (ValueError, IndexError, OSError)):
        return EXIT_ARGUMENT
    return None


if __name__ == "__main__":
    sys.exit(main())
