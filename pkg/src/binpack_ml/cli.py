"""Command-line entry point: ``binpack-ml <command>`` or ``python -m binpack_ml``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .classic import first_fit, first_fit_real
from .core import FrequencyVector, deviation_hat, frequencies, l1_error, split_fractional
from .profile import DEFAULT_M, profile_packing, profile_packing_fractional
from .workload import (
    Mode,
    adversarial_prediction,
    adversarial_sigma1,
    adversarial_sigma2,
    export_sequence,
    fractional_fixture,
    make_sequence,
    rounding_deviation,
)

log = logging.getLogger("binpack_ml")


def _finish(records, args) -> int:
    if args.plots:
        paths = harness.write_plot_data(records, args.group_by, args.plots)
        log.info("wrote %d plot series to %s", len(paths), args.plots)
    print(f"{len(records)} records" + (f" appended to {args.out}" if args.out else ""))
    return 0


def cmd_run(args) -> int:
    config = harness.load_config(args.config)
    out = args.out if args.out is not None else config.output_path
    records = harness.run_experiment(config, output_path=out, threads=args.threads)
    args.out = out
    return _finish(records, args)


def cmd_generate(args) -> int:
    spec = harness.parse_sequence_spec(Path(args.spec).read_text(), Path(args.spec).parent)
    seq = make_sequence(spec)
    export_sequence(args.out, seq.tolist(), spec.k)
    print(f"wrote {len(seq)} items (k={spec.k}) to {args.out}")
    return 0


def cmd_sweep_lambda(args) -> int:
    lambdas = [tuple(int(t) for t in s.split("/")) for s in args.lambdas.split(",")]
    mode = Mode.FIXED_FILE if args.source else Mode.FIXED_WEIBULL
    config = harness.lambda_sweep_config(
        n=args.n, k=args.k, m=args.m, seed=args.seed, i_lo=args.i_lo, i_hi=args.i_hi,
        lambdas=lambdas, mode=mode, sources=args.source, repetitions=args.repetitions)
    records = harness.run_experiment(config, output_path=args.out, threads=args.threads)
    return _finish(records, args)


def cmd_sweep_window(args) -> int:
    windows = sorted(set(np.unique(np.geomspace(args.w_lo, args.w_hi, args.w_count).round().astype(int))))
    mode = Mode.EVOLVING_FILES if args.source else Mode.EVOLVING_WEIBULL
    config = harness.window_sweep_config(
        windows, n=args.n, k=args.k, m=args.m, seed=args.seed, mode=mode, sources=args.source,
        repetitions=args.repetitions, replan=args.replan)
    records = harness.run_experiment(config, output_path=args.out, threads=args.threads)
    return _finish(records, args)


def cmd_adversarial(args) -> int:
    k, n, m = args.k, args.n, args.m
    if args.theorem == 3:
        pred = adversarial_prediction(k)
        print("sequence\teta\tProfilePacking\tFirstFit\tOPT")
        for name, seq, opt in (("sigma1", adversarial_sigma1(n, k), n),
                               ("sigma2", adversarial_sigma2(n, k), -(-2 * n // k))):
            eta = l1_error(frequencies(seq, k), pred)
            pp = profile_packing(seq, pred, m, k).cost()
            ff = first_fit(seq, k).cost()
            print(f"{name}\t{eta:.4f}\t{pp}\t{ff}\t{opt}")
        return 0
    seq = fractional_fixture(n, k, args.eps)
    integral, fractional = split_fractional(seq)
    pred = FrequencyVector.from_dict({k // 2: 1.0}, k)
    rounded = [int(round(v)) for v in seq]
    print(f"naive deviation (capacities)\t{rounding_deviation(seq) / k:.6g}")
    print(f"fractional deviation\t{deviation_hat(seq):.6g}")
    print(f"integral items\t{len(integral)}\tfractional items\t{len(fractional)}")
    print(f"ProfilePacking on rounded sizes\t{profile_packing(rounded, pred, m, k).cost()}")
    print(f"ProfilePacking with fractional fallback\t{profile_packing_fractional(seq, pred, m, k).cost()}")
    print(f"FirstFit\t{first_fit_real(seq, k).cost()}")
    print(f"OPT\t{n}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="binpack-ml", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default):
        sp.add_argument("--n", type=int, default=n_default)
        sp.add_argument("--k", type=int, default=100)
        sp.add_argument("--m", type=int, default=DEFAULT_M)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--repetitions", type=int, default=1)
        sp.add_argument("--source", action="append", default=[], help="BPPLIB file (repeatable)")
        sp.add_argument("--out", help="CSV file to append to")

    def outputs(sp, group_by):
        sp.add_argument("--threads", type=int, default=None, help="overrides BINPACK_THREADS")
        sp.add_argument("--plots", help="directory for tab-separated plot series")
        sp.add_argument("--group-by", default=group_by, choices=["eta", "b", "w"])

    sp = sub.add_parser("run", help="run an experiment config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    outputs(sp, "eta")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("generate", help="write a sequence as a BPPLIB file")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("sweep-lambda", help="Hybrid(lambda) against prefix-based predictions")
    common(sp, 100_000)
    sp.add_argument("--i-lo", type=int, default=25)
    sp.add_argument("--i-hi", type=int, default=125)
    sp.add_argument("--lambdas", default="0/1,1/4,1/2,3/4,1/1")
    outputs(sp, "eta")
    sp.set_defaults(func=cmd_sweep_lambda)

    sp = sub.add_parser("sweep-window", help="Adaptive(w) over a range of window sizes")
    common(sp, 200_000)
    sp.add_argument("--w-lo", type=int, default=100)
    sp.add_argument("--w-hi", type=int, default=100_000)
    sp.add_argument("--w-count", type=int, default=20)
    sp.add_argument("--replan", default="on-demand", choices=["on-demand", "epoch"])
    outputs(sp, "w")
    sp.set_defaults(func=cmd_sweep_window)

    sp = sub.add_parser("adversarial", help="adversarial fixtures")
    sp.add_argument("--theorem", type=int, choices=[3, 5], required=True,
                    help="3: one prediction, matching and mismatching inputs; 5: near-half fractional items")
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--k", type=int, default=100)
    sp.add_argument("--m", type=int, default=DEFAULT_M)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.set_defaults(func=cmd_adversarial)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (harness.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
