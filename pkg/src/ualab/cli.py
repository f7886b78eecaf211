"""Command-line entry point ``ualab``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ualab.harness import (
    EXPERIMENTS,
    ConfigError,
    SummaryTable,
    build_config,
    parse_config_text,
    percolate_trace,
    run_experiment,
)
from ualab.percolation import WitnessCertificate, extract_witness, verify_witness

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--n", type=int, action="append", dest="n_grid", help="repeatable")
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--p", type=float, action="append", dest="p_grid", help="repeatable")
    p.add_argument("--x", type=int, action="append", dest="x_grid", help="vertex labels for the oracle run")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=lambda s: int(s, 0), dest="master_seed")
    p.add_argument("--t-max", type=int, dest="t_max")
    p.add_argument("--connectivity", action="store_true", default=None)
    p.add_argument("--out", dest="output_path")
    p.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ualab", description="Uniform attachment graph experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        _common(p)
        if name == "percolate":
            p.add_argument("--witness", type=int, help="vertex whose certificate to dump")
            p.add_argument("--witness-out", help="certificate JSON path (default stdout)")
        if name == "witness":
            p.add_argument("action", nargs="?", choices=["verify"])
            p.add_argument("certificate", nargs="?", type=Path)
    return parser


def _emit(text: str, path: str | None) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _write_table(table: SummaryTable, fmt: str, path: str) -> None:
    _emit(table.render(fmt), path)
    if fmt == "csv" and path and path != "-":
        Path(path + ".meta.json").write_text(json.dumps(table.metadata, indent=2) + "\n", encoding="utf-8")


def _config(args):
    file_values = parse_config_text(args.config.read_text(encoding="utf-8")) if args.config else {}
    keys = ("n_grid", "k", "r", "p_grid", "x_grid", "trials", "master_seed", "t_max", "connectivity", "output_path", "format")
    overrides = {key: getattr(args, key, None) for key in keys}
    experiment = "percolate" if args.command == "witness" and getattr(args, "action", None) else args.command
    return build_config(experiment, file_values, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
    except (ConfigError, TypeError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "witness" and args.action == "verify":
            if args.certificate is None:
                print("config error: certificate: path required", file=sys.stderr)
                return EXIT_CONFIG
            cert = WitnessCertificate.from_json(args.certificate.read_text(encoding="utf-8"))
            _, trace, sv = percolate_trace(cfg)
            ok, clause = verify_witness(cert, sv, trace)
            print("valid" if ok else f"invalid: {clause}")
            return EXIT_OK if ok else 1
        if args.command == "percolate":
            table, trace, sv = percolate_trace(cfg)
            _write_table(table, cfg.format, cfg.output_path)
            if args.witness is not None:
                _emit(extract_witness(trace, sv, args.witness).to_json() + "\n", args.witness_out)
            return EXIT_OK
        _write_table(run_experiment(cfg), cfg.format, cfg.output_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime abort; TrialError carries the failing seed
        print(f"aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
