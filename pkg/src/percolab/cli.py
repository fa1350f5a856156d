"""Command-line entry point.

Exit codes: 0 success, 2 invalid arguments or experiment spec, 3 resource
refusal, 4 estimator failure.  Data goes to stdout, logs to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import estimate, montecarlo, oracle
from .errors import EstimationError, ResourceRefusal
from .lattice import BoxSpec
from .render import render_ascii, render_ppm

log = logging.getLogger("percolab")

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_ESTIMATOR = 4

_KIND_COMMANDS = {
    "onearm": montecarlo.ONE_ARM,
    "diam-tail": montecarlo.DIAM_TAIL,
    "rn-scan": montecarlo.RN_SCAN,
    "rn-compare": montecarlo.RN_COMPARE,
    "sn": montecarlo.SN,
}

_OBS = {
    "rzb": oracle.R_ZB_WORLD,
    "one-arm": oracle.ONE_ARM,
    "diam-origin": oracle.DIAM_ORIGIN,
    "s-count": oracle.S_COUNT,
}


class UsageError(Exception):
    pass


def _experiment_flags(p: argparse.ArgumentParser, kind_cmd: str) -> None:
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rho", type=float)
    p.add_argument("--boundary", choices=("fb", "zb"), default="fb")
    p.add_argument("--finite-only", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--margin", type=int)
    p.add_argument("--xi-guess", type=float)
    p.add_argument("--regime", choices=(estimate.SUBCRITICAL, estimate.SUPERCRITICAL))
    p.add_argument("--workers", type=int)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.set_defaults(fmt="csv", kind=_KIND_COMMANDS[kind_cmd])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="percolab",
                                     description="Bond percolation maximum-diameter laboratory")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in _KIND_COMMANDS:
        _experiment_flags(sub.add_parser(name), name)

    p = sub.add_parser("oracle", help="exact distribution by full enumeration")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", required=True, help="exact probability, e.g. 1/2 or 0.3")
    p.add_argument("--obs", choices=sorted(_OBS), default="rzb")
    p.add_argument("--rho", type=float)

    p = sub.add_parser("xi", help="decay rate xi(p) and kappa(p) = d / xi(p)")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=float)
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--poly-corrected", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--regime", choices=(estimate.SUBCRITICAL, estimate.SUPERCRITICAL))
    p.add_argument("--xi-guess", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--from-csv", metavar="FILE",
                   help="fit (n, successes, trials) rows instead of simulating")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("render", help="draw a planar configuration on B_n")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("ascii", "ppm"), default="ascii")
    p.add_argument("--cell", type=int, default=8)
    p.add_argument("--out", help="output file (default stdout)")
    return parser


def cmd_experiment(args) -> int:
    spec = montecarlo.ExperimentSpec(
        kind=args.kind, d=args.d, p=args.p, seed=args.seed, n=args.n, trials=args.trials,
        rho=args.rho, boundary=args.boundary, finite_only=args.finite_only,
        margin=args.margin, xi_guess=args.xi_guess, regime=args.regime)
    try:
        spec.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    manifest = montecarlo.run(spec, workers=args.workers)
    for r in manifest.results:
        if r["unreliable"]:
            log.warning("n=%d: censor rate %.3g exceeds 1%%; result marked unreliable",
                        r["n"], r["censor_rate"])
    sys.stdout.write(manifest.to_json(indent=2) + "\n" if args.fmt == "json" else manifest.to_csv())
    return 0


def cmd_oracle(args) -> int:
    try:
        box = BoxSpec(args.d, args.n)
        dist = oracle.enumerate(box, args.p, _OBS[args.obs], args.rho)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    out = dist.to_dict()
    if dist.observable == oracle.ONE_ARM:
        out["one_arm"] = str(dist.prob(1))
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return 0


def _read_points(path: str) -> list:
    points = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            s, t = int(row["successes"]), int(row["trials"])
            points.append((int(row["n"]), estimate.BinomialEstimate.from_counts(s, t)))
    return points


def cmd_xi(args) -> int:
    censor = {}
    if args.from_csv:
        points = _read_points(args.from_csv)
        regime = args.regime
        if args.p is not None:
            regime = _regime(args)
        window = points
    else:
        if args.p is None:
            raise UsageError("--p is required unless --from-csv is given")
        regime = _regime(args)
        if args.n_min < 1 or args.n_max < args.n_min:
            raise UsageError("need 1 <= n-min <= n-max")
        spec = montecarlo.ExperimentSpec(
            kind=montecarlo.DIAM_TAIL, d=args.d, p=args.p, seed=args.seed,
            n=list(range(args.n_min, args.n_max + 1)), trials=args.trials,
            xi_guess=args.xi_guess, regime=args.regime)
        manifest = montecarlo.run(spec, workers=args.workers)
        points = [(r["n"], estimate.BinomialEstimate.from_counts(
            r["binomial"]["successes"], r["binomial"]["trials"], r["binomial"]["censored"]))
            for r in manifest.results]
        censor = {r["n"]: r["censor_rate"] for r in manifest.results}
        window = estimate.select_window(points)
    xi = estimate.fit_decay(window, args.poly_corrected, regime=regime)
    k = estimate.kappa(xi, args.d)
    report = {"xi": xi.xi_hat, "xi_stderr": xi.stderr, "kappa": k.value,
              "kappa_stderr": k.stderr, "regime": regime, "poly_corrected": xi.poly_corrected,
              "window": [xi.n_min, xi.n_max], "dropped": xi.dropped,
              "intercept": xi.intercept, "log_coef": xi.log_coef,
              "max_censor_rate": max(censor.values()) if censor else 0.0}
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    else:
        print(f"xi     = {xi.xi_hat:.6g} +/- {xi.stderr:.2g}  ({regime or 'regime undeclared'})")
        print(f"kappa  = {k.value:.6g} +/- {k.stderr:.2g}  (d = {args.d})")
        print(f"window = [{xi.n_min}, {xi.n_max}], dropped n = {xi.dropped}")
        print(f"fit    : intercept {xi.intercept:.4g}, log n coefficient {xi.log_coef}")
        print(f"censor : max rate {report['max_censor_rate']:.3g}")
    return 0


def _regime(args):
    try:
        return estimate.regime_for(args.p, args.d, args.regime)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_render(args) -> int:
    if args.d != 2:
        raise UsageError(f"render supports d = 2 only, got d = {args.d}")
    try:
        if args.format == "ascii":
            data = render_ascii(args.n, args.p, args.seed).encode()
        else:
            data = render_ppm(args.n, args.p, args.seed, args.cell)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
        log.info("wrote %s (%d bytes)", args.out, len(data))
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    handler = {"oracle": cmd_oracle, "xi": cmd_xi, "render": cmd_render}.get(
        args.command, cmd_experiment)
    try:
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"percolab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceRefusal as exc:
        print(f"percolab: refused: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except EstimationError as exc:
        print(f"percolab: estimator failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR


if __name__ == "__main__":
    sys.exit(main())
