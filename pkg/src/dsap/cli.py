"""Command-line entry point: ``dsap <mode> --config <path> [--out <path>]``.

Exit codes: 0 success, 1 configuration error, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from .config import MODES, ConfigError, parse_config
from .runner import run


def _package_version() -> str:
    try:
        return version("dsap")
    except PackageNotFoundError:
        return "0.0.0+local"


def _configs_dir() -> Path | None:
    candidates = [
        Path.cwd() / "configs",
        Path(__file__).resolve().parents[2] / "configs",
    ]
    for candidate in candidates:
        if candidate.is_dir():
            return candidate
    return None


def list_examples() -> int:
    directory = _configs_dir()
    if directory is None:
        print("no configs directory found")
        return 0
    for path in sorted(directory.glob("*.conf")):
        first = path.read_text(encoding="utf-8").splitlines()
        summary = first[0].lstrip("# ").strip() if first and first[0].startswith("#") else ""
        print(f"{path.name:24s} {summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsap",
        description="Adiabatic passage experiments on a three-site spin-one chain.",
    )
    parser.add_argument("--version", action="version", version=f"dsap {_package_version()}")
    parser.add_argument("--list-examples", action="store_true", help="list bundled example configs")
    parser.add_argument("mode", nargs="?", choices=MODES, help="experiment mode")
    parser.add_argument("--config", help="path to a key = value config document")
    parser.add_argument("--out", help="override the output path")
    parser.add_argument("--plot", action="store_true", help="also render a figure next to the output")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_examples:
        return list_examples()
    if args.mode is None:
        parser.print_usage(sys.stderr)
        print("dsap: a mode is required", file=sys.stderr)
        return 1

    try:
        document = ""
        if args.config is not None:
            try:
                document = Path(args.config).read_text(encoding="utf-8")
            except OSError as exc:
                print(f"dsap: cannot read config: {exc}", file=sys.stderr)
                return 1
        config = parse_config(document, default_mode=args.mode)
    except ConfigError as exc:
        print(f"dsap: config error: {exc}", file=sys.stderr)
        return 1

    try:
        written = run(config, out_override=args.out, plot=args.plot)
    except ConfigError as exc:
        print(f"dsap: config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numeric or I/O failure
        print(f"dsap: run failed: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
