"""``ucc`` command line.

Exit codes:
  0  success
  1  validation errors present (or warnings under --strict)
  2  parse errors
  3  usage error
  4  I/O error
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, vocab
from .catalogue import (
    CatalogueError,
    DuplicateCardId,
    UnknownFilterValue,
    dumps,
    export_card_json,
    export_catalogue_json,
    ingest,
    query,
    stats,
)
from .parser import parse_diagnostics
from .render import layout_diagram, render_card_html, render_svg
from .risk import assess, explain
from .validator import validate

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 4

SKELETON = """\
# Use case card skeleton. Replace every <...> placeholder.
# Lines starting with '#' are comments. Values continue on following lines
# indented by two spaces. Booleans are 'yes' or 'no'.

[card]
id: my-use-case
title: <system name>
version: 0.1
date: 2024-01-01
provider: <provider>

[purpose]
# Keep context and scope under 100 words each.
context: <context and conditions of use>
scope: <what this use case covers>
# SDG numbers 1-17 the use case contributes to; repeat the key for several.
sdg: 9

[table]
# Slug from `ucc export vocab products`.
product: other-software
safety-component: no
# '<area>' or '<area>/<subarea>' from `ucc export vocab areas`; repeatable.
area: other
# Transparency flags (optional, repeatable): interacts_with_natural_persons,
# emotion_recognition, biometric_categorisation, generates_or_manipulates_content
primary-actor: user
stakeholder: <party> | <interest>
precondition: <precondition>
step: <first step of the main course>
extension: 1 | <what can go wrong> | <failure protection>
issue: <open issue or foreseeable misuse>

[actor user]
name: <primary actor>
kind: individual

# At least one use case needs 'ai: yes' before the card validates.
[usecase main-use-case]
name: <main use case>
ai: no
main: yes

[relation]
kind: association
source: user
target: main-use-case
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _use_color(stream) -> bool:
    return os.environ.get("UCC_NO_COLOR") != "1" and hasattr(stream, "isatty") and stream.isatty()


def _paint(text: str, code: str, enabled: bool) -> str:
    return f"\033[{code}m{text}\033[0m" if enabled else text


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read(path: str) -> str:
    with open(path, "rb") as fh:
        return fh.read().decode("utf-8")


def _load(path: str):
    """Return (card, exit_code); prints parse diagnostics to stderr."""
    try:
        text = _read(path)
    except (OSError, UnicodeDecodeError) as exc:
        _err(f"{path}: cannot read: {exc}")
        return None, EXIT_IO
    card, diags = parse_diagnostics(text)
    if diags:
        for d in diags:
            _err(d.to_text(path))
        return None, EXIT_PARSE
    return card, EXIT_OK


def _write(out: str | None, text: str) -> int:
    if out is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        _err(f"{out}: cannot write: {exc}")
        return EXIT_IO
    return EXIT_OK


# -- commands --------------------------------------------------------------

def cmd_init(args) -> int:
    path = Path(args.path)
    if path.exists():
        _err(f"{path}: already exists")
        return EXIT_IO
    try:
        with open(path, "x", encoding="utf-8", newline="\n") as fh:
            fh.write(SKELETON)
    except OSError as exc:
        _err(f"{path}: cannot write: {exc}")
        return EXIT_IO
    print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    color = _use_color(sys.stdout)
    worst = EXIT_OK
    report = []
    for path in args.paths:
        card, code = _load(path)
        if card is None:
            report.append({"path": path, "status": "parse-error" if code == EXIT_PARSE else "io-error",
                           "findings": []})
            worst = max(worst, code)
            continue
        diags = validate(card)
        code = EXIT_OK
        if diags.errors or (args.strict and diags.warnings):
            code = EXIT_INVALID
        worst = max(worst, code)
        report.append({"path": path, "status": "valid" if diags.is_valid else "invalid",
                       "findings": diags.to_list()})
        if args.format == "text":
            for f in diags:
                sev = _paint(f.severity, "31" if f.severity == "error" else "33", color)
                print(f"{path}: {f.rule} {sev} {f.subject}: {f.message}")
    if args.format == "json":
        sys.stdout.write(dumps(report))
    elif all(not r["findings"] for r in report) and worst == EXIT_OK:
        print(f"{len(args.paths)} card(s) OK")
    return worst


def cmd_assess(args) -> int:
    card, code = _load(args.path)
    if card is None:
        return code
    diags = validate(card)
    if not diags.is_valid:
        for f in diags.errors:
            _err(f"{args.path}: {f.to_text()}")
        return EXIT_INVALID
    result = assess(card, check=False)
    if args.format == "json":
        sys.stdout.write(dumps(result.to_dict()))
    else:
        tier = _paint(result.tier, "1", _use_color(sys.stdout))
        sys.stdout.write(f"{card.id}: tier {tier}\n" + explain(result))
    return EXIT_OK


def cmd_render(args) -> int:
    card, code = _load(args.path)
    if card is None:
        return code
    diags = validate(card)
    if not diags.is_valid:
        for f in diags.errors:
            _err(f"{args.path}: {f.to_text()}")
        return EXIT_INVALID
    if args.format == "svg":
        text = render_svg(layout_diagram(card, check=False), card)
    else:
        text = render_card_html(card, assess(card, check=False))
    return _write(args.out, text)


def _ingest(root: str):
    try:
        return ingest(root), EXIT_OK
    except DuplicateCardId as exc:
        _err(str(exc))
        return None, EXIT_INVALID
    except OSError as exc:
        _err(f"{root}: {exc}")
        return None, EXIT_IO


def _histogram(title: str, counts: dict) -> list[str]:
    lines = [title]
    if not counts:
        return lines + ["  (none)"]
    width = max(len(str(k)) for k in counts) + 1
    num = max(len(str(v)) for v in counts.values())
    for k, v in counts.items():
        lines.append(f"  {k}: {v}".ljust(width + num + 4) + "#" * v)
    return lines


def cmd_stats(args) -> int:
    cat, code = _ingest(args.root)
    if cat is None:
        return code
    report = stats(cat)
    if args.format == "json":
        sys.stdout.write(dumps(report.to_dict()))
        return EXIT_OK
    lines = [f"total: {report.total}", f"valid: {report.valid}", f"invalid: {report.invalid}", ""]
    lines += _histogram("per tier", report.per_tier) + [""]
    lines += _histogram("per application area", report.per_area) + [""]
    lines += _histogram("per product type", report.per_product) + [""]
    sdg_counts = {f"{n} {vocab.lookup_sdg(n).name}": v for n, v in report.per_sdg.items()}
    lines += _histogram("per SDG", sdg_counts)
    print("\n".join(lines))
    return EXIT_OK


def cmd_query(args) -> int:
    cat, code = _ingest(args.root)
    if cat is None:
        return code
    try:
        rows = query(cat, tier=args.tier, area=args.area, product=args.product, sdg=args.sdg)
    except UnknownFilterValue as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.format == "json":
        sys.stdout.write(dumps([e.to_dict() for e in rows]))
        return EXIT_OK
    if rows:
        w_id = max(len(e.card_id or "") for e in rows)
        w_tier = max(len(e.tier or "") for e in rows)
        for e in rows:
            print(f"{e.card_id:<{w_id}}  {e.tier:<{w_tier}}  {e.path}")
    _err(f"{len(rows)} match(es)")
    return EXIT_OK


def cmd_export(args) -> int:
    if args.target == "vocab":
        if args.name not in vocab.VOCAB_NAMES:
            _err(f"unknown vocabulary {args.name!r}; expected one of {', '.join(vocab.VOCAB_NAMES)}")
            return EXIT_USAGE
        return _write(args.out, dumps(vocab.vocab_json(args.name)))
    if args.target == "card":
        card, code = _load(args.name)
        if card is None:
            return code
        return _write(args.out, export_card_json(card))
    cat, code = _ingest(args.name)
    if cat is None:
        return code
    return _write(args.out, export_catalogue_json(cat))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ucc", description="Parse, validate, assess, render and catalogue use case cards.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("init", help="write a commented card skeleton")
    s.add_argument("path")
    s.set_defaults(func=cmd_init)

    s = sub.add_parser("validate", help="check cards and print diagnostics")
    s.add_argument("paths", nargs="+")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--strict", action="store_true", help="treat warnings as errors")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("assess", help="print the risk tier and its triggers")
    s.add_argument("path")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_assess)

    s = sub.add_parser("render", help="render the diagram (svg) or the whole card (html)")
    s.add_argument("path")
    s.add_argument("--format", choices=("svg", "html"), default="svg")
    s.add_argument("--out", help="output file (default: standard output)")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("stats", help="corpus statistics for a directory of cards")
    s.add_argument("root")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("query", help="list valid cards matching all given filters")
    s.add_argument("root")
    s.add_argument("--tier")
    s.add_argument("--area", help="area slug or area/subarea")
    s.add_argument("--product")
    s.add_argument("--sdg")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("export", help="emit JSON for a vocabulary, a card or a catalogue")
    s.add_argument("target", choices=("vocab", "card", "catalogue"))
    s.add_argument("name", help="vocabulary name (products|areas|sdgs|flags), card path, or root directory")
    s.add_argument("--out", help="output file (default: standard output)")
    s.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CatalogueError as exc:
        _err(str(exc))
        return EXIT_INVALID
    except BrokenPipeError:
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
