"""Command-line entry point: ``hyperlp <command> [options]``.

Exit codes: 0 success, 1 invalid arguments, 2 I/O failure, 3 degenerate model
parameters refused by an experiment.
"""
import argparse
import logging
import sys

from hyperlp import __version__
from hyperlp.errors import HyperLPError, InvalidArgumentError
from hyperlp.experiments import (DISCRIMINANTS, INITS, METHODS, ExperimentConfig, cluster_table,
                                 concentration_table, growth_conditions, meanfield_sweep_table,
                                 phase_table, write_table)
from hyperlp.meanfield import characteristic_roots
from hyperlp.model import HsbmParams, sample_hsbm, write_hypergraph

log = logging.getLogger("hyperlp")

EXIT_OK, EXIT_ARGS, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2, 3

DEFAULT_STEPS = {"meanfield-sweep": 20, "phase": 50, "concentration": 6, "cluster": 6,
                 "sample": 0, "roots": 0}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _common(parser):
    parser.add_argument("--n", type=int, default=100, help="number of vertices (even)")
    parser.add_argument("--d", type=int, default=3, help="hyperedge order")
    parser.add_argument("--p", type=float, default=0.4, help="within-block edge probability")
    parser.add_argument("--q", type=float, default=0.1, help="cross-block edge probability")
    parser.add_argument("--pmin", type=float, default=0.05)
    parser.add_argument("--pmax", type=float, default=0.95)
    parser.add_argument("--qmin", type=float, default=0.05)
    parser.add_argument("--qmax", type=float, default=0.95)
    parser.add_argument("--grid-step", type=float, default=0.05)
    parser.add_argument("--steps", type=int, default=None, help="walk length K")
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0, help="master seed")
    parser.add_argument("--method", choices=METHODS, default="ce")
    parser.add_argument("--cet-order", type=int, default=None,
                        help="order of the partial clique expansion (default d-1)")
    parser.add_argument("--discriminant", choices=DISCRIMINANTS, default="geometric")
    parser.add_argument("--init", choices=INITS, default="single")
    parser.add_argument("--calibration-trials", type=int, default=5,
                        help="hypergraphs used to estimate CET gap weights")
    parser.add_argument("--ridge-scale", type=float, default=1e-8)
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    parser.add_argument("--out", default="-", help="output path ('-' for stdout)")
    parser.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="hyperlp", description="Landing-probability walks on hypergraph SBMs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "sample": "draw a hypergraph and write it as text",
        "meanfield-sweep": "mean-field gaps of both walks over a (p, q) grid",
        "phase": "tensor gap after many steps and its decay ratio over a grid",
        "concentration": "empirical vs mean-field centroids",
        "cluster": "clustering accuracy over repeated trials",
        "roots": "roots of the tensor recurrence characteristic polynomials",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text, description=text))
    return parser


def _open_out(path):
    return sys.stdout if path == "-" else path


def _config(args):
    steps = args.steps if args.steps is not None else DEFAULT_STEPS[args.command]
    return ExperimentConfig(
        kind=args.command, n=args.n, d=args.d, p=args.p, q=args.q, pmin=args.pmin,
        pmax=args.pmax, qmin=args.qmin, qmax=args.qmax, grid_step=args.grid_step,
        steps=steps, trials=args.trials, seed=args.seed, method=args.method,
        cet_order=args.cet_order, discriminant=args.discriminant, init=args.init,
        calibration_trials=args.calibration_trials, ridge_scale=args.ridge_scale,
        jobs=args.jobs)


def _run(args):
    out = _open_out(args.out)
    if args.command == "sample":
        h = sample_hsbm(HsbmParams(args.n, args.d, args.p, args.q), args.seed)
        write_hypergraph(h, out)
        return EXIT_OK
    if args.command == "roots":
        params = HsbmParams(args.n, args.d, args.p, args.q)
        if params.degenerate:
            log.error("degenerate parameters p=%g q=%g refused", args.p, args.q)
            return EXIT_DEGENERATE
        rows = []
        for which in ("beta", "zeta"):
            for r in characteristic_roots(params, which):
                rows.append((float(r.real), float(r.imag), which))
        meta = f"experiment=roots n={args.n} d={args.d} p={args.p!r} q={args.q!r}"
        write_table(out, ["re", "im", "which"], rows, meta)
        return EXIT_OK

    config = _config(args)
    if args.command in ("concentration", "cluster") and config.params.degenerate:
        log.error("degenerate parameters p=%g q=%g refused", args.p, args.q)
        return EXIT_DEGENERATE
    meta = f"experiment={args.command} config={config.metadata()}"
    if args.command == "meanfield-sweep":
        header, rows = meanfield_sweep_table(config)
    elif args.command == "phase":
        header, rows = phase_table(config)
    elif args.command == "concentration":
        header, rows = concentration_table(config)
        growth = growth_conditions(config.params)
        meta += " " + " ".join(f"{k}={v:.6g}" for k, v in sorted(growth.items()))
    else:
        header, rows, source = cluster_table(config)
        meta += f" weights={source}"
    write_table(out, header, rows, meta)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return _run(args)
    except (InvalidArgumentError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_ARGS
    except OSError as exc:
        log.error("I/O failure: %s", exc)
        return EXIT_IO
    except HyperLPError as exc:
        log.error("%s", exc)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
