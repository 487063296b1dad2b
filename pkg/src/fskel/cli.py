"""``fskel audit|norm|groups``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .fourier import a_norm, load_afunction
from .groups import GroupError, construct_group
from .harness import (
    CATALOG,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    UsageError,
    dumps,
    format_text,
    run_audit,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fskel", description="Audit projection families on the Fourier algebra of a finite group.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("audit", help="run audit suites")
    a.add_argument("--group", required=True, help="group spec, e.g. cyclic:4, symmetric:3")
    a.add_argument(
        "--subgroup-O",
        dest="O",
        action="append",
        help="generators of O (repeatable), or 'all' (default; |G| <= 16 only)",
    )
    a.add_argument("--suite", action="append", help="suite name (repeatable or comma-separated), or 'all'")
    a.add_argument("--tol-alg", type=float, default=1e-9)
    a.add_argument("--tol-norm", type=float, default=1e-7)
    a.add_argument("--samples", type=int, default=100)
    a.add_argument("--seed", type=int, default=42)
    a.add_argument("--normalizer-filter", action="store_true")
    a.add_argument("--format", choices=("json", "text"), default="json")
    a.add_argument("--out", help="write the report here instead of stdout")

    n = sub.add_parser("norm", help="print the Fourier-algebra norm of a function file")
    n.add_argument("file", help='JSON {"group": spec, "values": [[re, im], ...]}')
    n.add_argument("--group", help="expected group spec (defaults to the file's)")

    g = sub.add_parser("groups", help="list the built-in catalog")
    g.add_argument("--format", choices=("text", "machine"), default="text")
    return p


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_audit(args) -> int:
    suites = tuple(s.strip() for raw in (args.suite or ["all"]) for s in raw.split(",") if s.strip())
    o = "all" if not args.O or args.O == ["all"] else tuple(args.O)
    cfg = RunConfig(
        group=args.group,
        O=o,
        suites=suites,
        tol_alg=args.tol_alg,
        tol_norm=args.tol_norm,
        samples=args.samples,
        seed=args.seed,
        normalizer_filter=args.normalizer_filter,
        format=args.format,
        out=args.out,
    )
    result = run_audit(cfg)
    text = dumps(result.document) if cfg.format == "json" else format_text(result.document)
    _emit(text, cfg.out)
    return result.exit_code


def cmd_norm(args) -> int:
    group = construct_group(args.group) if args.group else None
    try:
        u = load_afunction(args.file, group)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from exc
    value = a_norm(u)
    print(f"{value:.12f}" if value != 0 else "0")
    return EXIT_OK


def cmd_groups(args) -> int:
    for spec in CATALOG:
        if args.format == "machine":
            print(spec)
        else:
            print(f"{spec:28s} order {construct_group(spec).order}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"audit": cmd_audit, "norm": cmd_norm, "groups": cmd_groups}[args.command]
    try:
        return handler(args)
    except (UsageError, GroupError, ValueError) as exc:
        print(f"fskel: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
