"""Command line entry point.

Exit codes: 0 success, 2 plan validation failure, 1 any other error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import io as fileio
from .core import Mode, is_lifo, plan_cost, validate_plan
from .experiment import ExperimentConfig, bhh_probe, format_summary, run_experiment, summarize
from .gen import generate, parse_distribution
from .oracle import exact_pdp, exact_pdpc, exact_tsp
from .pdp import solve_pdp
from .pdpc import UndefinedRatioError, solve_pdpc
from .scp import solve_scp
from .tsp import default_backend, parse_backend

log = logging.getLogger("liftroute")


class ValidationFailed(Exception):
    pass


def _backend(args, d: int):
    return default_backend(2 * d) if args.tsp is None else parse_backend(args.tsp)


def _ratio(sol) -> str:
    try:
        return repr(sol.ratio_ub)
    except UndefinedRatioError:
        return "undefined"


def _check(inst, plan, value: float, bound: float, tol: float, lifo: bool = False) -> None:
    report = validate_plan(inst, plan)
    for v in report.violations:
        print(f"violation\t{v}")
    if not report.ok or (lifo and not is_lifo(plan)):
        raise ValidationFailed
    if value > bound + tol:
        print(f"violation\tcost {value!r} exceeds bound {bound!r}")
        raise ValidationFailed


def cmd_gen(args):
    inst = generate(args.n, args.d, parse_distribution(args.dist, args.d), args.seed)
    if args.out:
        fileio.write_instance(args.out, inst)
    else:
        sys.stdout.write(fileio.format_instance(inst))


def cmd_solve_pdpc(args):
    inst = fileio.read_instance(args.instance)
    sol = solve_pdpc(inst, args.capacity, _backend(args, inst.d), args.seed)
    print(f"sol\t{sol.sol!r}")
    print(f"lower_bound\t{sol.lower_bound!r}")
    print(f"lemma1_rhs\t{sol.lemma1_rhs!r}")
    print(f"ratio_ub\t{_ratio(sol)}")
    print(f"tour_len\t{sol.tour_len!r}")
    if args.plan_out:
        fileio.write_plan(args.plan_out, sol.plan)
    _check(inst, sol.plan, sol.sol, sol.lemma1_rhs, args.tol, lifo=True)


def cmd_solve_pdp(args):
    inst = fileio.read_instance(args.instance)
    sol = solve_pdp(inst, args.capacity, _backend(args, inst.d), args.seed,
                    include_depot_leg=args.depot_leg)
    print(f"sol_total\t{sol.sol_total!r}")
    print(f"loaded\t{sol.loaded!r}")
    print(f"empty\t{sol.empty!r}")
    print(f"lemma2_rhs\t{sol.lemma2_rhs!r}")
    print(f"s0_len\t{sol.scp.s0_length!r}")
    print(f"cS0_over_n\t{sol.diag.cS0_over_n!r}")
    print(f"cT_over_n\t{sol.diag.cT_over_n!r}")
    print(f"mean_loaded\t{sol.diag.mean_loaded!r}")
    if args.plan_out:
        fileio.write_plan(args.plan_out, sol.plan)
    _check(inst, sol.plan, sol.sol_total - sol.depot_leg, sol.lemma2_rhs, args.tol)


def cmd_solve_scp(args):
    inst = fileio.read_instance(args.instance)
    sol = solve_scp(inst.origins, inst.destinations)
    print("order\t" + " ".join(str(i + 1) for i in sol.order.tolist()))
    print(f"s0_len\t{sol.s0_length!r}")
    if sol.greedy:
        print("matching\tgreedy")


def cmd_oracle(args):
    inst = fileio.read_instance(args.instance)
    if args.mode == "tsp":
        length, tour = exact_tsp(inst.lifted())
        print(f"length\t{length!r}")
        print("tour\t" + " ".join(str(i + 1) for i in tour.tolist()))
        return
    solver = exact_pdp if args.mode == "pdp" else exact_pdpc
    cost, plan = solver(inst, args.capacity)
    print(f"cost\t{cost!r}")
    if args.plan_out:
        fileio.write_plan(args.plan_out, plan)


def cmd_validate(args):
    inst = fileio.read_instance(args.instance)
    plan = fileio.read_plan(args.plan, args.capacity)
    report = validate_plan(inst, plan)
    if not report.ok:
        for v in report.violations:
            print(f"violation\t{v}")
        raise ValidationFailed
    cost = plan_cost(inst, plan, Mode.PDP, include_depot_leg=args.depot_leg, check=False)
    print("ok")
    print(f"loaded\t{cost.loaded!r}")
    print(f"empty\t{cost.empty!r}")
    print(f"total\t{cost.total!r}")
    print(f"lifo\t{is_lifo(plan)}")


def cmd_experiment(args):
    cfg = ExperimentConfig(ns=args.n, cs=args.c, ds=args.d, dist=args.dist, tsp=args.tsp,
                           trials=args.trials, base_seed=args.seed, out=args.out,
                           threads=args.threads, with_pdp=not args.no_pdp)
    rows = run_experiment(cfg)
    print(format_summary(summarize(rows)))
    bad = [r for r in rows if r.error]
    if bad:
        log.warning("%d of %d rows recorded errors", len(bad), len(rows))


def cmd_bhh_probe(args):
    rows = bhh_probe(args.d, args.n, args.dist, args.trials, args.seed,
                     None if args.tsp is None else parse_backend(args.tsp))
    print("n\tmean\tstd\tcv")
    for r in rows:
        print(f"{r.n}\t{r.mean:.6g}\t{r.std:.6g}\t{r.cv:.6g}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9, help="cost comparison tolerance")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="liftroute",
                                description="Pickup and delivery via tours over lifted requests.")
    sub = p.add_subparsers(dest="command", required=True)
    tsp_choices = ["strip", "mst", "nn2opt"]

    g = sub.add_parser("gen", parents=[common], help="generate a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--dist", default="uniform")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    for name, func in (("solve-pdpc", cmd_solve_pdpc), ("solve-pdp", cmd_solve_pdp)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--instance", required=True)
        s.add_argument("--capacity", "-c", type=int, required=True)
        s.add_argument("--tsp", choices=tsp_choices)
        s.add_argument("--plan-out")
        if name == "solve-pdp":
            s.add_argument("--depot-leg", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("solve-scp", parents=[common])
    s.add_argument("--instance", required=True)
    s.set_defaults(func=cmd_solve_scp)

    o = sub.add_parser("oracle", parents=[common])
    o.add_argument("--instance", required=True)
    o.add_argument("--capacity", "-c", type=int, default=1)
    o.add_argument("--mode", choices=["pdp", "pdpc", "tsp"], default="pdpc")
    o.add_argument("--plan-out")
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("validate", parents=[common])
    v.add_argument("--instance", required=True)
    v.add_argument("--plan", required=True)
    v.add_argument("--capacity", "-c", type=int, required=True)
    v.add_argument("--depot-leg", action="store_true")
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("experiment", parents=[common])
    e.add_argument("--n", type=int, nargs="+", required=True)
    e.add_argument("--c", type=int, nargs="+", default=[2])
    e.add_argument("--d", type=int, nargs="+", default=[1])
    e.add_argument("--dist", default="uniform")
    e.add_argument("--tsp", choices=tsp_choices)
    e.add_argument("--trials", type=int, default=5)
    e.add_argument("--no-pdp", action="store_true", help="skip the total-distance extension")
    e.add_argument("--out")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bhh-probe", parents=[common])
    b.add_argument("--d", type=int, default=1)
    b.add_argument("--n", type=int, nargs="+", required=True)
    b.add_argument("--dist", default="uniform")
    b.add_argument("--tsp", choices=tsp_choices)
    b.add_argument("--trials", type=int, default=10)
    b.set_defaults(func=cmd_bhh_probe)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ValidationFailed:
        return 2
    except Exception as exc:  # noqa: BLE001
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
