"""Command line entry point: ``risbeam <subcommand> [--config FILE] [...]``.

CSV goes to ``--out`` or stdout; the decode demo prints a text trace.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from risbeam.config import load_spec
from risbeam.errors import ConfigurationError
from risbeam.harness import rows_to_csv, run_ba_probability, run_decode_demo, run_predict, run_rate_curve


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risbeam", description="RIS beam training simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "ba-prob": "perfect beam alignment probability per method",
        "rate-curve": "average achievable rate versus SNR",
        "predict": "analytic success prediction and rounds needed",
        "decode-demo": "step-by-step trace of binning and intersection decoding",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, help="key=value config file")
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--trials", type=_positive)
        p.add_argument("--out", type=Path, help="output file (default: stdout)")
        p.add_argument("--workers", type=_positive, default=1)
        p.add_argument("--noiseless", action="store_true")
        if name == "ba-prob":
            p.add_argument(
                "--combinatorial",
                action="store_true",
                help="skip channels; bin detection is error-free (needs --noiseless)",
            )
        if name == "predict":
            p.add_argument("--target", type=float, default=0.99, help="target success probability")
    return parser


def run(args: argparse.Namespace) -> str:
    spec = load_spec(
        args.command,
        args.config,
        seed=args.seed,
        trials=args.trials,
        workers=args.workers,
        noiseless=args.noiseless,
        combinatorial=getattr(args, "combinatorial", False),
        target=getattr(args, "target", None),
    )
    if args.command == "ba-prob":
        return rows_to_csv(run_ba_probability(spec))
    if args.command == "rate-curve":
        return rows_to_csv(run_rate_curve(spec))
    if args.command == "predict":
        return run_predict(spec)
    return run_decode_demo(spec).text


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = run(args)
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"risbeam: error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
