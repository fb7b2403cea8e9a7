"""Command line front end.

Exit codes: 0 success, 2 file/spec parse problems (and usage errors),
3 dimension mismatches, 4 solver failures (the error class name is printed
verbatim on stderr).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import experiments, matrixio, network
from .exceptions import BadAlpha, DimMismatch, LinnetError, ParseError
from .iterative import GdConfig, gd_train, landweber, stop_rule_1, stop_rule_2, stop_rule_3
from .pseudo import pinv, pseudo_solution
from .linalg import numerical_rank, svd
from .regularizers import lavrentiev, tikhonov
from .select import NoisyProblem, apriori_alpha_rule, discrepancy_alpha, generalized_discrepancy_alpha


def _print_err(message: str) -> None:
    use_color = sys.stderr.isatty() and not os.environ.get("NO_COLOR")
    if use_color:
        message = f"\x1b[31m{message}\x1b[0m"
    print(message, file=sys.stderr)


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv_line(values) -> str:
    return ",".join(_fmt(v) for v in values)


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", default="pseudo",
                   choices=["pseudo", "tikhonov", "lavrentiev", "landweber", "gd"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--q0-file", default=None,
                   help="vector file with the anchor / start vector")
    p.add_argument("--h", type=float, default=0.0, dest="op_err",
                   help="operator error bound")
    p.add_argument("--delta", type=float, default=None, dest="rhs_err",
                   help="data error bound")
    p.add_argument("--rule", type=int, default=None, choices=[1, 2, 3],
                   help="landweber stopping rule")
    p.add_argument("--rule-consts", default=None,
                   help="comma-separated rule constants "
                        "(rule 1: a1,a2; rule 2: a0,a1; rule 3: a,a1,a2)")
    p.add_argument("--max-iter", type=int, default=500,
                   help="iteration/epoch budget for landweber and gd")
    p.add_argument("--lr", type=float, default=None, help="gd learning rate")
    p.add_argument("--l1-alpha", type=float, default=0.0)
    p.add_argument("--l2-alpha", type=float, default=0.0)


_RULE_ARITY = {1: 2, 2: 2, 3: 3}


def _rule_consts(args) -> list[float]:
    if args.rule_consts is None:
        return []
    try:
        consts = [float(t) for t in args.rule_consts.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"--rule-consts: not numbers: {args.rule_consts!r}") from None
    if args.rule is None:
        raise ParseError("--rule-consts requires --rule")
    expected = _RULE_ARITY[args.rule]
    if len(consts) != expected:
        raise ParseError(
            f"--rule-consts: rule {args.rule} takes {expected} constants, got {len(consts)}"
        )
    return consts


def _solve_system(a, b, args, x0):
    """Dispatch one (a, b) solve per the CLI flags.

    Returns (x, residual_norm, solution_norm, alpha, stop_index).
    """
    consts = _rule_consts(args)
    if args.method == "pseudo":
        r = pseudo_solution(a, b, x0=x0)
        return r.x, r.residual_norm, r.solution_norm, None, None
    if args.method == "tikhonov":
        alpha = args.alpha
        if alpha is None:
            if args.rhs_err is None:
                raise BadAlpha("--method tikhonov needs --alpha (or --delta to pick it "
                               "by the discrepancy principle)")
            alpha = discrepancy_alpha(a, b, args.rhs_err).alpha
        r = tikhonov(a, b, alpha, x0=x0)
        return r.x, r.residual_norm, r.solution_norm, r.alpha, None
    if args.method == "lavrentiev":
        if args.alpha is None:
            raise BadAlpha("--method lavrentiev needs --alpha")
        r = lavrentiev(a, b, args.alpha, x0=x0)
        return r.x, r.residual_norm, r.solution_norm, r.alpha, None
    if args.method == "landweber":
        rhs_err = args.rhs_err if args.rhs_err is not None else 0.0
        problem = NoisyProblem(a, b, op_err=args.op_err, rhs_err=rhs_err)
        trace = landweber(problem, x0=x0, max_iter=args.max_iter)
        if args.rule == 1:
            c = consts or [1.0, 1.0]
            dec = stop_rule_1(trace, args.op_err, rhs_err, a1=c[0], a2=c[1])
        elif args.rule == 2:
            c = consts or [1.0, 2.0]
            dec = stop_rule_2(trace, problem, a0=c[0], a1=c[1])
        elif args.rule == 3:
            c = consts or [2.0, 2.0, 2.0]
            dec = stop_rule_3(trace, problem, a=c[0], a1=c[1], a2=c[2])
        else:
            dec = None
        idx = dec.stop_index if dec is not None else len(trace) - 1
        x = trace.iterates[idx]
        return (x, float(np.linalg.norm(a @ x - b)),
                float(np.linalg.norm(x)), None, idx)
    if args.method == "gd":
        cfg = GdConfig(learning_rate=args.lr, max_epochs=args.max_iter,
                       l1_alpha=args.l1_alpha, l2_alpha=args.l2_alpha)
        trace = gd_train(a, b, cfg, x0=x0)
        x = trace.solution()
        idx = trace.best_index if trace.best_index is not None else len(trace) - 1
        return (x, float(np.linalg.norm(a @ x - b)),
                float(np.linalg.norm(x)), None, idx)
    raise ParseError(f"unknown method {args.method!r}")


def _method_spec_from_args(args) -> object:
    consts = _rule_consts(args)
    if args.method == "pseudo":
        return network.Pseudo()
    if args.method == "tikhonov":
        if args.alpha is None:
            raise BadAlpha("--method tikhonov needs --alpha")
        return network.Tikhonov(alpha=args.alpha)
    if args.method == "lavrentiev":
        if args.alpha is None:
            raise BadAlpha("--method lavrentiev needs --alpha")
        return network.Lavrentiev(alpha=args.alpha)
    if args.method == "landweber":
        rhs_err = args.rhs_err if args.rhs_err is not None else 0.0
        kwargs = dict(max_iter=args.max_iter, op_err=args.op_err,
                      rhs_err=rhs_err, rule=args.rule)
        if args.rule == 1 and consts:
            kwargs.update(a1=consts[0], a2=consts[1])
        elif args.rule == 2 and consts:
            kwargs.update(a0=consts[0], a1=consts[1])
        elif args.rule == 3 and consts:
            kwargs.update(a=consts[0], a1=consts[1], a2=consts[2])
        return network.Landweber(**kwargs)
    if args.method == "gd":
        cfg = GdConfig(learning_rate=args.lr, max_epochs=args.max_iter,
                       l1_alpha=args.l1_alpha, l2_alpha=args.l2_alpha)
        return network.Gd(config=cfg)
    raise ParseError(f"unknown method {args.method!r}")


def cmd_svd(args) -> int:
    print(_csv_line(svd(matrixio.read_matrix(args.matrix)).s))
    return 0


def cmd_pinv(args) -> int:
    for row in pinv(matrixio.read_matrix(args.matrix)):
        print(_csv_line(row))
    return 0


def cmd_rank(args) -> int:
    print(numerical_rank(matrixio.read_matrix(args.matrix)))
    return 0


def cmd_solve(args) -> int:
    a = matrixio.read_matrix(args.a)
    b = matrixio.read_vector(args.f)
    x0 = matrixio.read_vector(args.q0_file) if args.q0_file else None
    x, residual, norm, alpha, stop_index = _solve_system(a, b, args, x0)
    if args.json:
        print(json.dumps({
            "q": [float(v) for v in x],
            "residual_norm": residual,
            "solution_norm": norm,
            "alpha": alpha,
            "stop_index": stop_index,
            "method": args.method,
        }))
        return 0
    print("q," + _csv_line(x))
    print(f"residual_norm,{_fmt(residual)}")
    print(f"solution_norm,{_fmt(norm)}")
    if alpha is not None:
        print(f"alpha,{_fmt(alpha)}")
    if stop_index is not None:
        print(f"stop_index,{stop_index}")
    print(f"method,{args.method}")
    return 0


def cmd_select_alpha(args) -> int:
    a = matrixio.read_matrix(args.a)
    b = matrixio.read_vector(args.f)
    rhs_err = args.rhs_err if args.rhs_err is not None else 0.0
    if args.principle == "discrepancy":
        if args.rhs_err is None:
            raise ParseError("--principle discrepancy needs --delta")
        res = discrepancy_alpha(a, b, args.rhs_err)
        print(f"alpha,{_fmt(res.alpha)}")
        print(f"gap,{_fmt(res.gap)}")
        print(f"iterations,{res.iterations}")
    elif args.principle == "generalized":
        res = generalized_discrepancy_alpha(
            NoisyProblem(a, b, op_err=args.op_err, rhs_err=rhs_err))
        print(f"alpha,{_fmt(res.alpha)}")
        print(f"gap,{_fmt(res.gap)}")
        print(f"iterations,{res.iterations}")
    else:  # apriori
        alpha = apriori_alpha_rule(
            NoisyProblem(a, b, op_err=args.op_err, rhs_err=rhs_err), args.p)
        print(f"alpha,{_fmt(alpha)}")
    return 0


def cmd_train(args) -> int:
    ts = network.TrainingSet(
        inputs=matrixio.read_matrix(args.inputs),
        targets=matrixio.read_matrix(args.targets),
    )
    trainer = network.train_with_bias if args.bias else network.train
    model = trainer(ts, _method_spec_from_args(args))
    if args.model_out:
        matrixio.write_model(args.model_out, model)
        for i, rep in enumerate(model.row_reports):
            print(f"row,{i},residual_norm,{_fmt(rep.residual_norm)}")
    else:
        print(json.dumps(matrixio.model_to_dict(model)))
    return 0


def cmd_predict(args) -> int:
    model = matrixio.read_model(args.model_in)
    sample = matrixio.read_vector(args.input)
    print(_csv_line(network.predict(model, sample)))
    return 0


def cmd_diagnose(args) -> int:
    ts = network.TrainingSet(
        inputs=matrixio.read_matrix(args.inputs),
        targets=matrixio.read_matrix(args.targets),
    )
    rep = network.diagnose(ts, noise_floor=args.noise_floor)
    print(f"rank,{rep.rank}")
    print(f"full_rank,{'true' if rep.full_rank else 'false'}")
    print(f"n_identifiable,{rep.n_identifiable}")
    print(f"n_stable,{rep.n_stable}")
    print(f"condition,{_fmt(rep.condition) if rep.condition != float('inf') else 'inf'}")
    print("singular_values," + _csv_line(rep.singular_values))
    return 0


def cmd_experiment(args) -> int:
    from pathlib import Path

    try:
        doc = json.loads(Path(args.spec).read_text())
    except OSError as exc:
        raise ParseError(f"{args.spec}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.spec}: invalid JSON: {exc}") from None
    spec = experiments.load_spec(doc, source=args.spec)
    results = experiments.run_experiment(spec)
    print(experiments.HEADER)
    failed = False
    for row in results:
        print(row.to_csv())
        if row.failed:
            failed = True
            _print_err(f"{row.error_name}: epsilon={row.epsilon!r} "
                       f"method={row.method}: {row.error_message}")
    return 4 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linnet",
        description="Regularized solvers for linear-network weight recovery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("svd", help="print the singular values of a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("pinv", help="print the pseudo-inverse of a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_pinv)

    p = sub.add_parser("rank", help="print the numerical rank of a matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("solve", help="solve a linear system with a chosen method")
    p.add_argument("a", help="operator matrix file")
    p.add_argument("f", help="right-hand side vector file")
    _add_solver_flags(p)
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("select-alpha", help="pick a regularization parameter")
    p.add_argument("a")
    p.add_argument("f")
    p.add_argument("--principle", default="discrepancy",
                   choices=["discrepancy", "generalized", "apriori"])
    p.add_argument("--h", type=float, default=0.0, dest="op_err")
    p.add_argument("--delta", type=float, default=None, dest="rhs_err")
    p.add_argument("--p", type=float, default=2.0,
                   help="exponent for the a-priori rule")
    p.set_defaults(func=cmd_select_alpha)

    p = sub.add_parser("train", help="fit network weights from paired data")
    p.add_argument("inputs", help="inputs matrix file (one column per pair)")
    p.add_argument("targets", help="targets matrix file (one column per pair)")
    _add_solver_flags(p)
    p.add_argument("--bias", action="store_true", help="fit an output bias too")
    p.add_argument("--model-out", default=None, help="write the model JSON here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="apply a trained model to one input vector")
    p.add_argument("input", help="input vector file")
    p.add_argument("--model-in", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("diagnose", help="report rank/conditioning of the training data")
    p.add_argument("inputs")
    p.add_argument("targets")
    p.add_argument("--noise-floor", type=float, default=0.0)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("experiment", help="run a noise sweep from a JSON spec")
    p.add_argument("spec", help="experiment spec JSON file")
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        _print_err(f"{type(exc).__name__}: {exc}")
        return 2
    except DimMismatch as exc:
        _print_err(f"{type(exc).__name__}: {exc}")
        return 3
    except LinnetError as exc:
        _print_err(f"{type(exc).__name__}: {exc}")
        return 4
    except ValueError as exc:
        _print_err(f"{type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
