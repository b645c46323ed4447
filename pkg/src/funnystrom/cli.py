"""Command-line interface.

Subcommands:

* ``approx``: read a Matrix Market file, build a truncated low-rank
  approximation and its lift, write the factors and an error report;
* ``verify``: run one of the verification suites (theorem checkers,
  iteration-step comparisons, scalar-function properties);
* ``experiment``: run a sweep config (bundled figure or JSON file) and
  write CSV;
* ``counterexamples``: recompute the pinned reference instances.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
``NYSTROM_THREADS`` caps the linear-algebra thread pools (0 or unset
means automatic).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import experiments, metrics, mmio
from .errors import MismatchWithPaperError
from .functions import (
    catalog_names,
    check_concave_properties,
    check_operator_monotone,
    get_function,
    parse_function,
)
from .linalg import NormKind
from .metrics import evaluate_approximations, report_from_evaluation
from .nystrom import funnystrom, nystrom_truncated
from .sketch import SketchConfig, gaussian_basis, krylov_basis, rpcholesky_basis, standard_basis

_RANDOM_SCHEMES = ("gaussian", "subspace-iteration", "block-krylov", "rpcholesky")


class UsageError(ValueError):
    """Invalid flag combination detected after argparse."""


def _parse_explicit_columns(spec, n):
    """Parse explicit(e1..e3) / explicit(e1,e4,e5) into 0-based columns."""
    inner = spec[len("explicit("):-1]
    if not inner:
        raise UsageError("explicit() needs at least one column")
    cols = []
    for part in inner.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            if not (lo.startswith("e") and hi.startswith("e")):
                raise UsageError(f"bad column range {part!r}; expected eJ..eK")
            start, stop = int(lo[1:]), int(hi[1:])
            if start < 1 or stop < start:
                raise UsageError(f"bad column range {part!r}")
            cols.extend(range(start - 1, stop))
        else:
            if not part.startswith("e"):
                raise UsageError(f"bad column {part!r}; expected eJ")
            idx = int(part[1:])
            if idx < 1:
                raise UsageError(f"bad column {part!r}; columns are 1-based")
            cols.append(idx - 1)
    if max(cols) >= n:
        raise UsageError(f"column e{max(cols) + 1} exceeds matrix dimension {n}")
    return tuple(cols)


def _build_basis(a, args):
    scheme = args.basis
    if scheme == "explicit-identity":
        return standard_basis(a.n, tuple(range(a.n)))
    if scheme.startswith("explicit(") and scheme.endswith(")"):
        return standard_basis(a.n, _parse_explicit_columns(scheme, a.n))
    if scheme not in _RANDOM_SCHEMES:
        raise UsageError(
            f"unknown basis scheme {scheme!r}; expected one of "
            f"{_RANDOM_SCHEMES + ('explicit-identity', 'explicit(e1..eK)')}"
        )
    if args.seed is None:
        raise UsageError(f"--seed is required for the randomized scheme {scheme!r}")
    if scheme == "rpcholesky":
        return rpcholesky_basis(a, args.ell if args.ell else args.k, args.seed)
    if scheme == "block-krylov":
        return krylov_basis(a, SketchConfig(k=args.k, q=args.q, seed=args.seed))
    cfg = SketchConfig(k=args.k, ell=args.ell, q=args.q, seed=args.seed)
    return gaussian_basis(a, cfg)


def format_approx_report(ev, factor, lifted, kinds, want_eig):
    """Deterministic text report for one approximation run.

    All floats carry 17 significant digits; the same function renders
    library results and CLI output so the two are byte-identical.
    """
    md = ev.metadata
    lines = [
        f"scheme={md['scheme']} n={md['n']} k={md['k']} k_eff={md['k_eff']} "
        f"ell={md['ell']} q={md['q']} seed={md['seed']} function={md['function']} "
        f"collapsed={str(md['collapsed']).lower()}"
    ]
    lines.append("lambda_hat: " + " ".join(f"{v:.17g}" for v in factor.lam))
    lines.append("f_lambda_hat: " + " ".join(f"{v:.17g}" for v in lifted.lam))
    lines.append("u_hat:")
    for row in factor.u:
        lines.append("  " + " ".join(f"{v:.17g}" for v in row))
    for kind in kinds:
        rep = report_from_evaluation(ev, kind)
        lines.append(
            f"norm={rep.norm} eps_projection={rep.eps_projection:.17g} "
            f"eps_nystrom={rep.eps_nystrom:.17g} "
            f"eps_funnystrom={rep.eps_funnystrom:.17g} "
            f"degenerate={str(rep.degenerate).lower()}"
        )
    if want_eig:
        eig = report_from_evaluation(ev, NormKind(2.0)).eigenvalue_errors
        lines.append(
            f"norm=eigenvalue eps_projection={eig.projection:.17g} "
            f"eps_nystrom={eig.nystrom:.17g} eps_funnystrom={eig.funnystrom:.17g}"
        )
    return "\n".join(lines) + "\n"


def cmd_approx(args):
    a = mmio.read_matrix(args.matrix)
    basis = _build_basis(a, args)
    f = parse_function(args.function)
    factor = nystrom_truncated(a, basis, args.k)
    lifted = funnystrom(factor, f)
    tokens = [t.strip() for t in args.norms.split(",") if t.strip()]
    want_eig = "eigenvalue" in tokens
    kinds = [NormKind.parse(t) for t in tokens if t != "eigenvalue"]
    ev = evaluate_approximations(a, basis, args.k, f)
    text = format_approx_report(ev, factor, lifted, kinds, want_eig)
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _print_verdicts(verdicts, json_path=None):
    for v in verdicts:
        print(v.line())
    if json_path:
        with open(json_path, "w", newline="\n") as fh:
            fh.write(metrics.verdicts_to_json(verdicts))
            fh.write("\n")
    return 0 if all(v.holds or v.informational for v in verdicts) else 1


def cmd_verify(args):
    if args.instances < 1:
        raise UsageError("--instances must be >= 1")
    if args.suite == "theorems":
        verdicts = metrics.run_theorem_suite(instances=args.instances, seed=args.seed)
        return _print_verdicts(verdicts, args.json)
    if args.suite == "remarks":
        verdicts = []
        for index in range(args.instances):
            inst, _ = metrics.random_instance(args.seed, index)
            verdicts.extend(metrics.remark_checks(inst))
        return _print_verdicts(verdicts, args.json)
    # scalar-function property suite: flags are the contract, reports
    # are printed per clause; expected failures of unflagged functions
    # do not fail the run
    status = 0
    for name in catalog_names():
        f = get_function(name)
        concave = check_concave_properties(f)
        for clause, res in concave.clauses.items():
            print(f"function={f.label} clause={clause} passed={str(res.passed).lower()} "
                  f"margin={res.margin:.17g}")
        mono = check_operator_monotone(f)
        expected = f.operator_monotone
        agree = mono.passed == expected
        print(f"function={f.label} clause=operator-monotone "
              f"passed={str(mono.passed).lower()} expected={str(expected).lower()} "
              f"margin={mono.min_margin:.17g}")
        if not agree:
            status = 1
    return status


def cmd_experiment(args):
    if args.figure:
        cfg = experiments.BUNDLED_FIGURES[args.figure](args.scale)
    else:
        if not args.config:
            raise UsageError("provide --config PATH or --figure fig1|fig2|fig3")
        try:
            with open(args.config) as fh:
                cfg = experiments.ExperimentConfig.from_json(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from exc
    rows = experiments.run_experiment(cfg)
    if args.out:
        experiments.write_csv(rows, args.out)
    else:
        sys.stdout.write(experiments.rows_to_csv(rows))
    return 0


def cmd_counterexamples(args):
    verdicts = experiments.verify_counterexamples(strict=False)
    return _print_verdicts(verdicts, args.json)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="funnystrom",
        description="Rank-truncated low-rank approximations of SPSD matrices, "
                    "their lifts through monotone scalar functions, and the "
                    "verification suites for the underlying inequalities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="approximate one matrix from a file")
    p.add_argument("matrix", help="Matrix Market file (array or coordinate)")
    p.add_argument("--basis", required=True,
                   help="gaussian | subspace-iteration | block-krylov | "
                        "rpcholesky | explicit-identity | explicit(e1..eK)")
    p.add_argument("--k", type=int, required=True, help="target rank")
    p.add_argument("--ell", type=int, default=None, help="basis width (default k)")
    p.add_argument("--q", type=int, default=0, help="iteration depth")
    p.add_argument("--seed", type=int, default=None,
                   help="sketch seed (required for randomized schemes)")
    p.add_argument("--function", default="sqrt", help="scalar function spec")
    p.add_argument("--norms", default="nuclear,frobenius,operator,eigenvalue",
                   help="comma-separated norm list")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=("theorems", "remarks", "functions"),
                   default="theorems")
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", default=None, help="also write verdicts as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run a sweep and write CSV")
    p.add_argument("--config", default=None, help="JSON config path")
    p.add_argument("--figure", choices=tuple(experiments.BUNDLED_FIGURES),
                   default=None, help="bundled sweep configuration")
    p.add_argument("--scale", choices=("desk", "paper"), default="desk",
                   help="bundled config size preset")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("counterexamples",
                       help="recompute the pinned reference instances")
    p.add_argument("--json", default=None, help="also write verdicts as JSON")
    p.set_defaults(func=cmd_counterexamples)

    return parser


def _thread_limit():
    raw = os.environ.get("NYSTROM_THREADS", "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"NYSTROM_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise UsageError("NYSTROM_THREADS must be >= 0")
    return value or None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        limit = _thread_limit()
        if limit is not None:
            from threadpoolctl import threadpool_limits

            with threadpool_limits(limits=limit):
                return args.func(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MismatchWithPaperError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
