"""Command-line front end.

Exit codes are a stable contract: 0 success / contractive, 2 input or
validation error, 3 not contractive / certification refused, 4 solver
failure, 5 counterexample assertion failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import certify, lp, matcore, products, seminorms

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONTRACTIVE = 3
EXIT_SOLVER = 4
EXIT_COUNTEREXAMPLE = 5


def _emit(doc):
    print(json.dumps(doc, indent=2, sort_keys=True))


def _fail(message, code):
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_seminorm(args):
    m = matcore.load_matrix(args.input)
    kind = args.kind
    if kind == "coe":
        kind = "ergodicity"
        if args.p not in (None, "inf"):
            raise ValueError("the coefficient of ergodicity has no p parameter")
    if args.trials is not None and kind != "induced":
        raise ValueError("--trials applies to the induced (sampling) route only")
    p = args.p or "inf"
    if kind == "induced":
        value = seminorms.matrix_seminorm(
            matcore.as_equal_row_sum(m, tol=args.validation_tol), kind, p,
            trials=args.trials, seed=args.seed)
    else:
        value = seminorms.matrix_seminorm(m, kind, p)
    _emit(value.to_dict())
    return EXIT_OK


def cmd_certify(args):
    m = matcore.load_matrix(args.input)
    kind, p = seminorms.parse_seminorm_token(args.seminorm)
    if p != seminorms.P_INF:
        raise ValueError("certification is implemented for metric-inf and induced-inf")
    if kind == "metric":
        s = matcore.validate_stochastic(m, tol=args.validation_tol)
        cert = certify.certify_metric_inf(s)
    else:
        ers = matcore.as_equal_row_sum(m, tol=args.validation_tol)
        cert = certify.certify_induced_inf(ers)
    _emit(cert.to_dict())
    return EXIT_OK if cert.contractive else EXIT_NOT_CONTRACTIVE


def cmd_classify(args):
    m = matcore.load_matrix(args.input)
    s = matcore.validate_stochastic(m, tol=args.validation_tol)
    if args.full:
        _emit(certify.certification_report(s))
    else:
        _emit({"class": certify.classify(s).to_dict()})
    return EXIT_OK


def _ensemble_paths(tokens):
    paths = []
    for tok in tokens:
        if os.path.isdir(tok):
            inner = sorted(
                os.path.join(tok, name) for name in os.listdir(tok)
                if name.endswith((".csv", ".json"))
            )
            if not inner:
                raise ValueError(f"directory {tok!r} holds no .csv/.json matrices")
            paths.extend(inner)
        else:
            paths.append(tok)
    return paths


def cmd_simulate(args):
    paths = _ensemble_paths(args.ensemble)
    mats = [matcore.load_matrix(p) for p in paths]
    kind, p = seminorms.parse_seminorm_token(args.seminorm)
    if kind == "ergodicity":
        kind, p = "induced", seminorms.P_INF
    ensemble = products.MatrixEnsemble.build(mats, kind=kind, p=p)
    d = None
    if args.d:
        d = np.asarray([float(tok) for tok in args.d.split(",")])
    refused = not ensemble.lam < 1.0
    if refused and not args.force:
        _emit({
            "refused": True,
            "lam": ensemble.lam,
            "reason": "lambda >= 1; pass --force to write the trace anyway",
            "seminorm": {"kind": kind, "p": seminorms.p_label(p)},
        })
        return EXIT_NOT_CONTRACTIVE
    trace = products.run_product(
        ensemble, schedule=args.schedule, steps=args.steps, d=d, seed=args.seed)
    trace.to_csv(args.out)
    summary = {
        "lam": ensemble.lam,
        "member_values": list(ensemble.member_values),
        "seminorm": {"kind": kind, "p": seminorms.p_label(p)},
        "schedule": trace.schedule,
        "steps": trace.steps,
        "seed": args.seed,
        "trace": args.out,
        "refused": refused,
    }
    if not refused:
        report = products.certify_rate(trace)
        summary["rate"] = report.to_dict()
    _emit(summary)
    return EXIT_NOT_CONTRACTIVE if refused else EXIT_OK


def cmd_counterexample(args):
    if args.dump_matrix:
        sm = certify.counterexample_matrix(perturb=args.perturb)
        matcore.save_matrix_csv(sm, args.dump_matrix)
    report = certify.verify_counterexample(perturb=args.perturb,
                                           tau_threshold=args.tau_threshold)
    if args.json:
        _emit(report.to_dict())
    else:
        for step in report.steps:
            mark = "PASS" if step.passed else "FAIL"
            print(f"step {step.index} {step.name}: {mark}")
        print("verdict:", "all checks passed" if report.all_passed
              else f"failed at step {report.failed_step}")
    return EXIT_OK if report.all_passed else EXIT_COUNTEREXAMPLE


def cmd_equivalence(args):
    kind_a, p_a = seminorms.parse_seminorm_token(args.a)
    kind_b, p_b = seminorms.parse_seminorm_token(args.b)
    est = products.estimate_equivalence(kind_a, p_a, kind_b, p_b, n=args.n,
                                        samples=args.samples, seed=args.seed)
    _emit(est.to_dict())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="consem",
        description="Consensus seminorms, contraction certificates and "
                    "matrix-product simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_validation_tol(p):
        p.add_argument("--validation-tol", type=float,
                       default=matcore.VALIDATION_TOL,
                       help="tolerance for row-sum/nonnegativity validation")

    p_sem = sub.add_parser("seminorm", help="evaluate a matrix seminorm")
    p_sem.add_argument("--input", required=True)
    p_sem.add_argument("--kind", required=True,
                       choices=["metric", "induced", "coe"])
    p_sem.add_argument("--p", choices=["1", "2", "inf"])
    p_sem.add_argument("--trials", type=int)
    p_sem.add_argument("--seed", type=int, default=0)
    add_validation_tol(p_sem)
    p_sem.set_defaults(func=cmd_seminorm)

    p_cert = sub.add_parser("certify", help="contraction certificate")
    p_cert.add_argument("--input", required=True)
    p_cert.add_argument("--seminorm", required=True,
                        choices=["metric-inf", "induced-inf"])
    add_validation_tol(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_cls = sub.add_parser("classify", help="stochastic matrix classes")
    p_cls.add_argument("--input", required=True)
    p_cls.add_argument("--full", action="store_true",
                       help="also attach both infinity certificates")
    add_validation_tol(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_sim = sub.add_parser("simulate", help="simulate an infinite product")
    p_sim.add_argument("--ensemble", nargs="+", required=True,
                       help="matrix files or a directory of them")
    p_sim.add_argument("--schedule", choices=["cyclic", "random"],
                       default="cyclic")
    p_sim.add_argument("--steps", type=int, default=50)
    p_sim.add_argument("--seminorm", default="induced-inf")
    p_sim.add_argument("--out", default="trace.csv")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--d", help="comma-separated initial vector")
    p_sim.add_argument("--force", action="store_true",
                       help="write the trace even when lambda >= 1")
    p_sim.set_defaults(func=cmd_simulate)

    p_ce = sub.add_parser("counterexample",
                          help="verify the built-in 6x6 counterexample")
    p_ce.add_argument("--perturb", type=float, default=0.0)
    p_ce.add_argument("--tau-threshold", type=float, default=1.0)
    p_ce.add_argument("--json", action="store_true")
    p_ce.add_argument("--dump-matrix", metavar="FILE",
                      help="also write the matrix as CSV")
    p_ce.set_defaults(func=cmd_counterexample)

    p_eq = sub.add_parser("equivalence",
                          help="sample seminorm equivalence constants")
    p_eq.add_argument("--a", required=True, help="e.g. metric-1")
    p_eq.add_argument("--b", required=True, help="e.g. metric-inf")
    p_eq.add_argument("--n", type=int, default=5)
    p_eq.add_argument("--samples", type=int, default=1000)
    p_eq.add_argument("--seed", type=int, default=0)
    p_eq.set_defaults(func=cmd_equivalence)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (matcore.MatrixParseError, matcore.MatrixValidationError,
            FileNotFoundError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    except (lp.SimplexError, lp.CertificateError, seminorms.EigenSolveError,
            certify.CertificationError) as exc:
        return _fail(str(exc), EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())
