"""Command-line front end.

Subcommands::

    pitheorem units EXPR
    pitheorem analyze FILE
    pitheorem bound FILE [--eps E] [--K K] [--delta-perturb D]
    pitheorem verify FILE [--tau T] [--K K] [--trials N] [--seed S] [--eps E]

All of them take ``--json``.  Exit codes: 0 ok, 1 bound violated,
2 bad input, 3 the candidate function failed to evaluate.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema

from .bounds import (
    EvaluationError,
    bound_report,
    estimate_epsilon,
    hash_field,
    make_perturbed,
    tau_epsilon,
    verify_bound,
)
from .dimcore import SI_BASIS, Dimension, DimensionError, to_fraction
from .exprlang import CONSTANTS, FUNCTIONS, ExprEvalError, ExprSyntaxError, compile_expr
from .pengine import DimensionProblem, PiDecomposition, Variable, decompose, perturb_exponents
from .unitreg import UnitError, format_dimension, format_unit, parse_unit, restrict

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_EVAL = 0, 1, 2, 3

FIXTURES = ("pendulum", "atwood", "dimensionless")


class InputError(ValueError):
    """Bad problem files or arguments (exit code 2)."""


@dataclass
class ProblemFile:
    problem: DimensionProblem
    function_src: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    @property
    def y_override(self):
        y = self.options.get("y")
        if y is None:
            return None
        return [v if isinstance(v, float) else to_fraction(v) for v in y]


def _schema() -> dict:
    text = resources.files("pitheorem").joinpath("data/problem.schema.json").read_text("utf-8")
    return json.loads(text)


def _dimension(entry: dict, basis) -> Dimension:
    if "exponents" in entry:
        exps = entry["exponents"]
        if len(exps) != len(basis):
            raise InputError(
                f"{entry['name']!r}: {len(exps)} exponents for a basis of size {len(basis)}"
            )
        return Dimension(tuple(to_fraction(e) for e in exps), basis)
    dim = parse_unit(entry["unit"]).dimension
    return restrict(dim, basis)


def load_problem(doc: dict) -> ProblemFile:
    """Validate a decoded problem file and build the problem."""
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"schema error at {where}: {exc.message}") from None
    basis = tuple(doc.get("basis", SI_BASIS))
    try:
        variables = tuple(Variable(e["name"], _dimension(e, basis)) for e in doc["variables"])
        target = Variable(doc["target"]["name"], _dimension(doc["target"], basis))
        for v in variables:
            if v.name in CONSTANTS or v.name in FUNCTIONS:
                raise InputError(f"variable name {v.name!r} is reserved")
        candidate = None
        src = doc.get("function")
        if src is not None:
            candidate = compile_expr(src, [v.name for v in variables])
        problem = DimensionProblem(variables, target, candidate)
    except (UnitError, DimensionError, ExprSyntaxError, ExprEvalError) as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    options = dict(doc.get("options", {}))
    if "y" in options and len(options["y"]) != len(variables):
        raise InputError(f"options.y has {len(options['y'])} entries, expected {len(variables)}")
    return ProblemFile(problem, src, options)


def read_problem(path: str) -> ProblemFile:
    p = Path(path)
    if not p.exists() and path in FIXTURES:
        text = resources.files("pitheorem").joinpath(f"fixtures/{path}.json").read_text("utf-8")
    else:
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    return load_problem(doc)


def fmt_num(x) -> str:
    """Exact text for rationals, 12 significant digits for floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"


def _jnum(x):
    """JSON value: rationals as strings, floats as numbers."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return x
    return float(x)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _decomposition_json(dec: PiDecomposition) -> dict:
    return {
        "names": list(dec.names),
        "target": dec.target_name,
        "A": [[str(x) for x in dec.A.row(i)] for i in range(dec.m)],
        "beta": [str(b) for b in dec.beta],
        "rank": dec.r,
        "k": dec.k,
        "y": [_jnum(v) for v in dec.y],
        "delta": _jnum(dec.delta),
        "exact": dec.exact,
        "kernel": [[str(x) for x in row] for row in dec.X],
        "pi_groups": [str(p) for p in dec.pi_groups],
        "M": str(dec.M),
        "D_norm": dec.D_norm,
        "Xdag_norm": dec.Xdag_norm,
        "template": dec.template,
        "C": dec.C,
    }


def _matrix_lines(dec: PiDecomposition, basis) -> List[str]:
    width = max(len(str(x)) for i in range(dec.m) for x in dec.A.row(i))
    width = max(width, *(len(n) for n in dec.names))
    head = " " * 5 + " ".join(n.rjust(width) for n in dec.names)
    lines = [head]
    for b, i in zip(basis, range(dec.m)):
        lines.append(f"{b:>4} " + " ".join(str(x).rjust(width) for x in dec.A.row(i)))
    return lines


def cmd_units(args) -> int:
    pu = parse_unit(args.expr)
    out = {
        "expression": args.expr,
        "basis": list(pu.dimension.basis),
        "exponents": [str(e) for e in pu.dimension.exponents],
        "factor": pu.factor,
        "canonical": format_unit(pu),
        "dimension": format_dimension(pu.dimension),
    }
    if args.json:
        print(_dump(out))
    else:
        print(f"expression: {args.expr}")
        print(f"dimension:  {pu.dimension}  over ({' '.join(pu.dimension.basis)})")
        print(f"base units: {out['dimension']}")
        print(f"factor:     {fmt_num(pu.factor)}")
        print(f"canonical:  {out['canonical']}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    pf = read_problem(args.file)
    dec = decompose(pf.problem, y=pf.y_override)
    if args.json:
        out = _decomposition_json(dec)
        out["basis"] = list(pf.problem.basis)
        print(_dump(out))
        return EXIT_OK
    basis = pf.problem.basis
    print("dimension matrix A:")
    for line in _matrix_lines(dec, basis):
        print("  " + line)
    print(f"target {dec.target_name}: {Dimension(dec.beta, basis)}")
    print(f"rank: {dec.r}   k = n - rank = {dec.k}")
    print("y: (" + ", ".join(fmt_num(v) for v in dec.y) + ")")
    print(f"delta: {fmt_num(dec.delta)}" + ("" if dec.exact else "  (target not matched exactly)"))
    if dec.k:
        for s, p in enumerate(dec.pi_groups, 1):
            x = ", ".join(str(v) for v in dec.X[s - 1])
            print(f"pi{s} = {p}    (x = ({x}))")
    else:
        print("pi groups: none")
    print(f"formula: {dec.template}")
    if dec.C is not None:
        print(f"C = F(1, ..., 1) = {fmt_num(dec.C)}")
    return EXIT_OK


def _exponents(pf: ProblemFile, dec: PiDecomposition, delta_perturb: Optional[float]):
    if not delta_perturb:
        return dec
    try:
        y = perturb_exponents(dec, delta_perturb)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return decompose(pf.problem, y=y)


def _bound_json(rep) -> dict:
    return {
        "theorem": rep.theorem,
        "eps": rep.eps,
        "delta": rep.delta,
        "K": rep.K,
        "m": rep.m,
        "n": rep.n,
        "D_norm": rep.D_norm,
        "M": rep.M,
        "Xdag_norm": rep.Xdag_norm,
        "bound": rep.bound,
    }


def cmd_bound(args) -> int:
    pf = read_problem(args.file)
    K = args.K if args.K is not None else pf.options.get("K", 2.0)
    eps = args.eps if args.eps is not None else pf.options.get("epsilon", 0.0)
    if not K > 1:
        raise InputError(f"K must be greater than 1, got {K}")
    if eps < 0:
        raise InputError("eps must be nonnegative")
    dec = decompose(pf.problem, y=pf.y_override)
    dec = _exponents(pf, dec, args.delta_perturb)
    rep = bound_report(dec, eps, K)
    if args.json:
        out = _bound_json(rep)
        out["y"] = [_jnum(v) for v in dec.y]
        out["delta_exact"] = _jnum(dec.delta)
        print(_dump(out))
        return EXIT_OK
    print(f"formula: {dec.template}")
    print("y: (" + ", ".join(fmt_num(v) for v in dec.y) + ")")
    print(f"theorem: {'full column rank' if rep.theorem == 1 else 'rank deficient'} (k = {dec.k})")
    print(f"eps = {fmt_num(rep.eps)}   delta = {fmt_num(dec.delta)}   K = {fmt_num(rep.K)}")
    print(f"m = {rep.m}   n = {rep.n}   ||D|| = {fmt_num(rep.D_norm)}", end="")
    if rep.theorem == 2:
        print(f"   M = {fmt_num(rep.M)}   ||X+|| = {fmt_num(rep.Xdag_norm)}")
    else:
        print()
    print(f"bound: {fmt_num(rep.bound)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    pf = read_problem(args.file)
    opts = pf.options
    K = args.K if args.K is not None else opts.get("K", 2.0)
    L = opts.get("L", 2.0)
    trials = args.trials if args.trials is not None else opts.get("samples", 1000)
    seed = args.seed if args.seed is not None else opts.get("seed", 0)
    tau = args.tau if args.tau is not None else opts.get("tau", 0.0)
    if not K > 1:
        raise InputError(f"K must be greater than 1, got {K}")
    if not 0 <= tau < 1:
        raise InputError(f"tau must lie in [0, 1), got {tau}")
    if trials < 1:
        raise InputError("trials must be >= 1")
    dec = decompose(pf.problem, y=pf.y_override)
    base = pf.problem.candidate
    if base is None:
        F = make_perturbed(dec.y, tau, seed=seed)
    elif tau > 0:
        noise = hash_field(tau, seed)

        def F(v):
            return noise(v) * base(v)

    else:
        F = base
    dec = _exponents(pf, dec, args.delta_perturb)
    est = estimate_epsilon(F, dec.A, dec.beta, K_v=K, L_c=L, samples=trials, seed=seed)
    if args.eps is not None:
        eps, source = args.eps, "given"
    elif "epsilon" in opts:
        eps, source = opts["epsilon"], "given"
    elif tau > 0:
        eps, source = tau_epsilon(tau), "tau"
    else:
        eps, source = est.eps_hat, "estimated"
    rep = verify_bound(dec, F, K=K, eps=eps, trials=trials, seed=seed)
    if args.json:
        out = _bound_json(rep.bound)
        out.update(
            eps_source=source,
            eps_hat=est.eps_hat,
            tau=tau,
            trials=rep.trials,
            seed=seed,
            violations=rep.violations,
            max_ratio=rep.max_ratio,
            max_residual=rep.max_residual,
            worst_v=list(rep.worst_v),
            formula=dec.template,
        )
        print(_dump(out))
    else:
        print(f"formula: {dec.template}")
        print(f"eps_hat (sampled) = {fmt_num(est.eps_hat)}")
        print(f"eps = {fmt_num(eps)} ({source})   delta = {fmt_num(dec.delta)}   K = {fmt_num(K)}")
        print(f"bound: {fmt_num(rep.bound.bound)}")
        print(f"trials: {rep.trials}   violations: {rep.violations}")
        print(f"max residual |F - approx|/|F|: {fmt_num(rep.max_residual)}")
        print(f"max ratio to bound: {fmt_num(rep.max_ratio)}")
        print("worst v: (" + ", ".join(fmt_num(x) for x in rep.worst_v) + ")")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pitheorem", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("units", help="parse a unit expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_units)

    p = sub.add_parser("analyze", help="dimension matrix, exponents and pi groups")
    p.add_argument("file", help="problem JSON file or a bundled fixture name")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bound", help="evaluate the error bound")
    p.add_argument("file")
    p.add_argument("--eps", type=float)
    p.add_argument("--K", type=float)
    p.add_argument("--delta-perturb", type=float, help="shift y so the residual equals this")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="sample the error bound against the candidate function")
    p.add_argument("file")
    p.add_argument("--tau", type=float, help="multiply F by a random field in [1-tau, 1+tau]")
    p.add_argument("--K", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta-perturb", type=float)
    p.set_defaults(func=cmd_verify)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", help="machine-readable output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVAL
    except (InputError, UnitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
