"""Command-line interface.

Subcommands compose through files:

    socalloc generate     -> instance.json
    socalloc solve-online -> trace.json      (needs instance.json)
    socalloc baseline     -> certificate.json
    socalloc evaluate     -> metrics.csv     (instance + trace [+ certificate])
    socalloc experiment   -> out/metrics.csv, aggregate.json, scaling.json

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .baseline import DualCertificate, minimize_dual
from .errors import ConvergenceError, SocAllocError
from .experiment import ExperimentPlan, run_experiment
from .generate import GeneratorConfig, generate, request_fields
from .metrics import build_report, csv_header, csv_row
from .model import (Instance, RiskSpec, load_instance, load_trace,
                    save_instance, save_trace, validate_instance)
from .online import VARIANTS, OnlineSolver, VariantConfig
from .transform import linearize, to_soc

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; we reserve 2 for data errors.
    def error(self, message):
        raise UsageError(message)


def _csv_floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as err:
        raise UsageError(f"expected a comma-separated list of numbers: {text!r}") from err


def _csv_ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as err:
        raise UsageError(f"expected a comma-separated list of integers: {text!r}") from err


def _experiment_tag(flag: str) -> str:
    return {"chi-square": "chi_square"}.get(flag, flag)


def _build_parser() -> _Parser:
    parser = _Parser(prog="socalloc")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--experiment", choices=("uniform", "chi-square"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--eta", type=_csv_floats, default=None,
                   help="comma-separated confidence levels, one per resource")
    g.add_argument("--gamma-tilde", type=_csv_floats, default=None,
                   help="comma-separated normalized caps, one per resource")
    g.add_argument("--d", type=_csv_floats, default=None,
                   help="per-step budgets (default: all ones)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="instance.json")
    g.add_argument("--stream", action="store_true",
                   help="print requests as JSON lines instead of writing a file")

    s = sub.add_parser("solve-online", help="run one online pass over an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--variant", choices=VARIANTS, default="vanilla")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="trace.json")
    s.add_argument("--trace", action="store_true",
                   help="also write per-step rows (t, scheme, value, prices) "
                        "to <out>.steps.csv")

    b = sub.add_parser("baseline", help="compute the offline dual certificate")
    b.add_argument("--instance", required=True)
    b.add_argument("--tol", type=float, default=1e-6)
    b.add_argument("--out", default="certificate.json")

    e = sub.add_parser("evaluate", help="score a trace against its instance")
    e.add_argument("--instance", required=True)
    e.add_argument("--trace", required=True, help="trace JSON from solve-online")
    e.add_argument("--baseline", default=None, help="certificate JSON (optional)")
    e.add_argument("--eta", type=_csv_floats, default=None,
                   help="override confidence levels when the instance has none")
    e.add_argument("--gamma-tilde", type=_csv_floats, default=None,
                   help="override normalized caps when the instance has none")
    e.add_argument("--experiment", default="custom", help="label for the CSV row")
    e.add_argument("--variant", default="unknown", help="label for the CSV row")
    e.add_argument("--trial", type=int, default=0, help="label for the CSV row")
    e.add_argument("--seed", type=int, default=0, help="label for the CSV row")
    e.add_argument("--out", default="metrics.csv")

    x = sub.add_parser("experiment", help="full sweep: generate, solve, score")
    x.add_argument("--experiment", choices=("uniform", "chi-square"), required=True)
    x.add_argument("--n-grid", type=_csv_ints, required=True)
    x.add_argument("--trials", type=int, default=20)
    x.add_argument("--m", type=int, required=True)
    x.add_argument("--k", type=int, required=True)
    x.add_argument("--eta", type=_csv_floats, default=None)
    x.add_argument("--gamma-tilde", type=_csv_floats, default=None)
    x.add_argument("--d", type=_csv_floats, default=None)
    x.add_argument("--variants", default="vanilla,marginal,marginal-dynamic",
                   help="comma-separated subset of " + ",".join(VARIANTS))
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--tol", type=float, default=1e-6)
    x.add_argument("--no-baseline", action="store_true",
                   help="skip dual certificates (gap/ratio become NaN)")
    x.add_argument("--out", default="results")
    return parser


def _cmd_generate(args) -> int:
    config = GeneratorConfig(
        experiment=_experiment_tag(args.experiment), n=args.n, m=args.m, k=args.k,
        d=args.d, eta=args.eta, gamma_tilde=args.gamma_tilde, seed=args.seed)
    if args.stream:
        for t in range(config.n):
            c, a_bar, k_diag = request_fields(config, t)
            print(json.dumps({"t": t, "c": c.tolist(), "a_bar": a_bar.tolist(),
                              "k_diag": k_diag.tolist()}))
        return EXIT_OK
    instance = generate(config)
    problems = validate_instance(instance)
    if problems:
        print("generated instance is invalid: " + "; ".join(problems), file=sys.stderr)
        return EXIT_DATA
    save_instance(instance, args.out)
    print(f"wrote {args.out} (n={instance.n}, m={instance.m}, k={instance.k})")
    return EXIT_OK


def _load_instance_checked(path: str) -> Instance:
    instance = load_instance(path)
    problems = validate_instance(instance)
    if problems:
        raise SocAllocError(f"{path}: " + "; ".join(problems))
    return instance


def _cmd_solve_online(args) -> int:
    instance = to_soc(_load_instance_checked(args.instance))
    lin = linearize(instance)
    solver = OnlineSolver(instance, lin, VariantConfig(args.variant, args.seed),
                          record_steps=args.trace)
    trace = solver.run()
    save_trace(trace, args.out)
    if args.trace:
        steps_path = Path(args.out).with_suffix(".steps.csv")
        with steps_path.open("w") as fh:
            fh.write("t,scheme,value,prices\n")
            for t, scheme, value, prices in solver.steps:
                price_txt = ";".join(repr(float(p)) for p in prices)
                fh.write(f"{t},{'' if scheme is None else scheme},{value!r},{price_txt}\n")
        print(f"wrote {steps_path}")
    accepted = sum(1 for d in trace.decisions if d is not None)
    print(f"wrote {args.out} (objective={trace.objective:.6f}, "
          f"accepted {accepted}/{instance.n})")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    instance = to_soc(_load_instance_checked(args.instance))
    lin = linearize(instance)
    cert = minimize_dual(lin, tol=args.tol)
    Path(args.out).write_text(json.dumps(cert.to_dict()))
    print(f"wrote {args.out} (value={cert.value:.6f}, iterations={cert.iterations})")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    instance = _load_instance_checked(args.instance)
    risk = instance.risk
    if args.eta is not None or args.gamma_tilde is not None:
        risk = RiskSpec(eta=args.eta if args.eta is not None else risk.eta,
                        gamma_tilde=(args.gamma_tilde if args.gamma_tilde is not None
                                     else risk.gamma_tilde))
        instance = Instance(instance.c, instance.a_bar, instance.k_diag,
                            instance.d, risk)
    if instance.risk.eta is None and instance.risk.gamma_tilde is None:
        raise UsageError(
            "nothing to evaluate: the instance carries no risk targets; "
            "pass --eta and/or --gamma-tilde")
    instance = to_soc(instance)
    trace = load_trace(args.trace)
    baseline = None
    if args.baseline is not None:
        baseline = DualCertificate.from_dict(json.loads(Path(args.baseline).read_text()))
    report = build_report(instance, trace, baseline)
    with Path(args.out).open("w") as fh:
        fh.write(csv_header(instance.m))
        fh.write(csv_row(args.experiment, args.variant, instance.n, args.trial,
                         args.seed, report, instance.m))
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    variants = tuple(VariantConfig(v) for v in args.variants.split(","))
    config = GeneratorConfig(
        experiment=_experiment_tag(args.experiment), n=max(args.n_grid),
        m=args.m, k=args.k, d=args.d, eta=args.eta,
        gamma_tilde=args.gamma_tilde, seed=args.seed)
    plan = ExperimentPlan(generator=config, n_grid=args.n_grid, trials=args.trials,
                          variants=variants, output_dir=args.out,
                          master_seed=args.seed, tol=args.tol,
                          compute_baseline=not args.no_baseline)
    run_experiment(plan)
    print(f"wrote {args.out}/metrics.csv, aggregate.json, scaling.json")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "solve-online": _cmd_solve_online,
    "baseline": _cmd_baseline,
    "evaluate": _cmd_evaluate,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SocAllocError, OSError, json.JSONDecodeError, KeyError) as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    raise SystemExit(main())
