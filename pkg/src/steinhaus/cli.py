"""Command-line entry point: ``steinhaus-lab <experiment> [options]``.

Exit status: 0 on success, 1 on I/O failure, 2 on a configuration error,
3 on a numerical failure.
"""

import argparse
import csv
from datetime import datetime, timezone
import io
import json
import sys

from . import __version__
from .errors import ConfigError, DomainError, ResourceLimitError
from .experiments import KINDS, ExperimentConfig, format_value, run

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="steinhaus-lab",
        description="Ensemble and spatial statistics of exp(g |S_N(x)|^2) for a Steinhaus series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="experiment")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--out", help="CSV output path ('-' for stdout)")
        p.add_argument("--seed", type=int, help="master seed (overrides the config)")
        p.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
        p.add_argument("--reproducible", action="store_true",
                       help="omit the timestamp comment so reruns are byte-identical")
    return parser


def load_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if data.get("kind", args.kind) != args.kind:
            raise ConfigError(
                f"config declares kind {data['kind']!r} but {args.kind!r} was requested"
            )
    data["kind"] = args.kind
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.workers < 1:
        raise ConfigError("--workers must be at least 1")
    try:
        return ExperimentConfig.from_dict(data).validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def render_csv(header, rows, reproducible):
    buf = io.StringIO()
    if not reproducible:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# generated {stamp} by steinhaus-lab {__version__}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        header, rows = run(config, workers=args.workers)
    except (ConfigError, DomainError, ResourceLimitError, TypeError) as exc:
        print(f"steinhaus-lab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError) as exc:
        print(f"steinhaus-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    text = render_csv(header, rows, args.reproducible)
    out = args.out or config.output or "-"
    try:
        if out == "-":
            sys.stdout.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"steinhaus-lab: cannot write {out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
