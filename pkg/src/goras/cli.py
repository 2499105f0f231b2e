"""
Command-line entry point.

    goras bench  [--config cfg.json] [--T 20,40,...] [--trials N] [--algos gora,dtw,fastdtw:1] --out-dir DIR
    goras align  a.gsk b.gsk --algo {gora|dtw|fastdtw:R}
    goras ust    in.gsk out.gsk          (also writes out.tau.csv)
    goras gen    out.gsk --T 100 --n 11 --smoothness 3 [--warp-seed S --roughness 0.3]
    goras import-ntu in.skeleton out.gsk

Exit codes: 0 success, 1 usage, 2 data error, 3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import NUMERICAL_ERRORS, ConfigurationError, GorasError
from .harness import ExperimentConfig, parse_algorithm, run_algorithm, run_experiment, summarize
from .io import import_ntu, load_sequence, save_sequence
from .liegroup import unit_sphere_weight
from .align import UstConfig, ust_reparameterize
from .report import emit_csv, emit_plots
from .sequence import apply_reparameterization, generate_synthetic, normalize_skeleton, random_trg

log = logging.getLogger("goras")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _labels(text: str | None) -> list[str] | None:
    if not text:
        return None
    return [s.strip() for s in text.split(",") if s.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _normalize_labels(args) -> list[str] | None:
    labels = _labels(getattr(args, "normalize", None))
    if labels is not None and len(labels) != 4:
        raise UsageError("--normalize needs four labels: root,spine,hip-left,hip-right")
    return labels


def _load(path, args):
    seq = load_sequence(path, _labels(args.joints))
    labels = _normalize_labels(args)
    return normalize_skeleton(seq, *labels) if labels else seq


def _ust_config(args) -> UstConfig:
    return UstConfig(stencil_size=args.stencil, weight=unit_sphere_weight(args.mass, args.radius))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_bench(args) -> int:
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    overrides = {
        "T_values": args.T,
        "trials_per_T": args.trials,
        "algorithms": _labels(args.algos),
        "seed": args.seed,
        "roughness": args.roughness,
        "n": args.n,
        "smoothness": args.smoothness,
        "joints": _labels(args.joints),
        "normalize": _normalize_labels(args),
        "stencil_size": args.stencil,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    if args.data_dir:
        config.source = "directory"
        config.data_dir = args.data_dir
    records = run_experiment(config)
    summary = summarize(records)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(records, out / "records.csv")
    emit_plots(summary, out)
    (out / "summary.json").write_text(json.dumps(summary.to_dict(), indent=2), encoding="utf-8")
    print(f"{'algorithm':<12} {'T':>5} {'runtime_s':>11} {'E0':>9} {'Ef':>9} {'Ef/E0':>7}")
    for (algo, T), c in summary.cells.items():
        print(f"{algo:<12} {T:>5} {c.mean_runtime:>11.4g} {c.mean_E0:>9.4f} {c.mean_Ef:>9.4f} {c.mean_ratio:>7.3f}")
    for algo in summary.algorithms:
        slope = summary.runtime_slope[algo]
        islope = summary.inefficiency_slope[algo]
        print(
            f"{algo}: runtime log-log slope "
            f"{'n/a' if slope is None else f'{slope:.3f}'}, "
            f"inefficiency slope {'n/a' if islope is None else f'{islope:.3e}'}"
        )
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


def cmd_align(args) -> int:
    try:
        parse_algorithm(args.algo)
    except ConfigurationError as exc:
        raise UsageError(str(exc)) from None
    a = _load(args.a, args)
    b = _load(args.b, args)
    out = run_algorithm(args.algo, a, b, _ust_config(args))
    ineff = "n/a" if out.inefficiency is None else f"{out.inefficiency:.6g}"
    print(f"algorithm {out.algorithm}")
    print(f"E0 {out.initial_error:.6g}")
    print(f"Ef {out.final_error:.6g}")
    print(f"T_R {out.run_time:.6g}")
    print(f"inefficiency {ineff}")
    if out.resampled:
        print("note: sequences were resampled to a common grid")
    return EXIT_OK


def cmd_ust(args) -> int:
    seq = _load(args.input, args)
    result = ust_reparameterize(seq, _ust_config(args))
    save_sequence(result.reparameterized, args.output)
    sidecar = Path(args.output).with_suffix(".tau.csv")
    with open(sidecar, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "tau_star", "g"])
        for t, tau, g in zip(seq.times, result.tau_star.values, result.g_profile.values):
            writer.writerow([repr(float(t)), repr(float(tau)), repr(float(g))])
    print(f"c {result.c:.6g}")
    print(f"wrote {args.output} and {sidecar}")
    return EXIT_OK


def cmd_gen(args) -> int:
    seq = generate_synthetic(args.seed, args.T, args.n, args.smoothness)
    if args.warp_seed is not None:
        tau = random_trg(args.warp_seed, args.T, args.roughness)
        seq = apply_reparameterization(seq, tau, args.stencil)
    save_sequence(seq, args.output)
    print(f"wrote {args.output} ({seq.T} frames, {seq.n} joints)")
    return EXIT_OK


def cmd_import_ntu(args) -> int:
    seq = import_ntu(args.input, _labels(args.joints))
    labels = _normalize_labels(args)
    if labels:
        seq = normalize_skeleton(seq, *labels)
    save_sequence(seq, args.output)
    print(f"wrote {args.output} ({seq.T} frames, joints: {', '.join(seq.joint_labels)})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = Parser(prog="goras", description="Skeleton sequence alignment on SE(3)^n.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    def common(sp, stencil=True, joints=True):
        if stencil:
            sp.add_argument("--stencil", type=int, default=5, help="finite-difference stencil size (default 5)")
        if joints:
            sp.add_argument("--joints", help="comma-separated joint labels to keep")
            sp.add_argument("--normalize", metavar="ROOT,SPINE,HIPL,HIPR", help="normalize using these four joints")

    def weight(sp):
        sp.add_argument("--mass", type=float, default=1.0, help="link mass for the metric (default 1)")
        sp.add_argument("--radius", type=float, default=1.0, help="sphere radius for the inertia (default 1)")

    sp = sub.add_parser("bench", help="run a benchmark sweep")
    sp.add_argument("--config", help="JSON file with ExperimentConfig fields")
    sp.add_argument("--T", type=_ints, help="comma-separated sequence lengths")
    sp.add_argument("--trials", type=int, help="trials per length")
    sp.add_argument("--algos", help="comma-separated algorithms: gora, dtw, fastdtw:R")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--roughness", type=float)
    sp.add_argument("--n", type=int, help="joints in synthetic templates")
    sp.add_argument("--smoothness", type=int, help="harmonics in synthetic templates")
    sp.add_argument("--data-dir", help="directory of .gsk templates instead of synthetic ones")
    sp.add_argument("--stencil", type=int)
    sp.add_argument("--joints", help="comma-separated joint labels to keep")
    sp.add_argument("--normalize", metavar="ROOT,SPINE,HIPL,HIPR", help="normalize templates using these joints")
    sp.add_argument("--out-dir", default="bench_out", help="output directory (default bench_out)")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("align", help="align two .gsk sequences")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--algo", default="gora", help="gora, dtw or fastdtw:R (default gora)")
    common(sp)
    weight(sp)
    sp.set_defaults(func=cmd_align)

    sp = sub.add_parser("ust", help="reparameterize a sequence to the standard timescale")
    sp.add_argument("input")
    sp.add_argument("output")
    common(sp)
    weight(sp)
    sp.set_defaults(func=cmd_ust)

    sp = sub.add_parser("gen", help="write a synthetic sequence")
    sp.add_argument("output")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--T", type=int, default=100)
    sp.add_argument("--n", type=int, default=11)
    sp.add_argument("--smoothness", type=int, default=3)
    sp.add_argument("--warp-seed", type=int, help="also apply a random time warp drawn with this seed")
    sp.add_argument("--roughness", type=float, default=0.3)
    common(sp, joints=False)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser(
        "import-ntu",
        help="convert an NTU RGB+D .skeleton file",
        description=(
            "Reads the NTU RGB+D text layout: frame count, then per frame a body count and per body "
            "a line of 10 attributes, a joint count and one line per joint with "
            "x y z depthX depthY colorX colorY qw qx qy qz trackingState. "
            "Only the first body is kept; joints without an orientation are dropped."
        ),
    )
    sp.add_argument("input")
    sp.add_argument("output")
    common(sp, stencil=False)
    sp.set_defaults(func=cmd_import_ntu)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits for --help, --version and usage errors
        return exc.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"goras: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"goras: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GorasError, OSError) as exc:
        print(f"goras: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
