"""Command-line front end.

Exit codes: 0 success, 1 findings or conversion errors, 2 I/O or parse
failures.  Standard output carries data, standard error diagnostics.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .agraph import DEFAULT_TYPE_MAP, ag_to_gmt, gmt_to_ag, load_type_map, parse_ag, serialize_ag
from .anchoring import build_landmark_table, load_token_index, resolve_seg
from .errors import (
    AgParseError,
    AnchorError,
    BridgeError,
    GmtParseError,
    GmtSerializeError,
    InvertedSpanError,
    MergeError,
    RegistryError,
    TokenIndexError,
    UnresolvedTargetError,
)
from .merge import DEDUP_IDENTICAL, FOLD_TO_ALT, KEEP_ALL, MergePolicy, diff, merge
from .model import GmtDocument, SegmentRef, ValidationReport, iter_items, validate_structure
from .registry import default_registry, load_registry, validate_categories
from .xml_io import parse_gmt, serialize_gmt

OK, FINDINGS, FAILURE = 0, 1, 2


def _err(message: str) -> None:
    print(f"gmtannot: {message}", file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_document(path: str) -> GmtDocument:
    doc, diagnostics = parse_gmt(_read(path))
    for warning in diagnostics.warnings:
        print(f"{path}:{warning.line}:{warning.column}: {warning.message}", file=sys.stderr)
    return doc


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        doc = _load_document(args.file)
        if args.registry is not None:
            reg = load_registry(_read(args.registry))
        else:
            reg = default_registry()
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    except (GmtParseError, RegistryError) as exc:
        _err(str(exc))
        return FAILURE
    report = ValidationReport(
        validate_structure(doc).findings + validate_categories(doc, reg).findings
    )
    if report.findings:
        print(report.render())
    return OK if report.ok else FINDINGS


def cmd_convert(args: argparse.Namespace) -> int:
    try:
        type_map = load_type_map(_read(args.map)) if args.map else DEFAULT_TYPE_MAP
    except (OSError, BridgeError) as exc:
        _err(f"mapping table: {exc}")
        return FAILURE
    if args.source_format == "ag":
        return _convert_ag_to_gmt(args, type_map)
    return _convert_gmt_to_ag(args, type_map)


def _convert_ag_to_gmt(args: argparse.Namespace, type_map: dict) -> int:
    if len(args.inputs) != 1:
        _err("ag -> gmt takes exactly one input file")
        return FAILURE
    try:
        graph = parse_ag(_read(args.inputs[0]))
    except (OSError, AgParseError) as exc:
        _err(str(exc))
        return FAILURE
    try:
        docs = ag_to_gmt(graph, type_map)
    except BridgeError as exc:
        _err(str(exc))
        return FINDINGS
    out_dir = Path(args.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for doc in docs:
            name = "landmarks.xml" if doc.doc_type == "landmarkDesc" else f"{doc.doc_type}.xml"
            (out_dir / name).write_text(serialize_gmt(doc), encoding="utf-8")
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    return OK


def _convert_gmt_to_ag(args: argparse.Namespace, type_map: dict) -> int:
    if not args.inputs:
        _err("gmt -> ag needs a landmark file (plus any layer files)")
        return FAILURE
    try:
        landmark_doc = _load_document(args.inputs[0])
        layers = [_load_document(path) for path in args.inputs[1:]]
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    except GmtParseError as exc:
        _err(str(exc))
        return FAILURE
    try:
        graph = gmt_to_ag(landmark_doc, layers, type_map)
    except (BridgeError, UnresolvedTargetError, InvertedSpanError, AnchorError, ValueError) as exc:
        _err(str(exc))
        return FINDINGS
    try:
        Path(args.output).write_text(serialize_ag(graph), encoding="utf-8")
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    return OK


def cmd_resolve(args: argparse.Namespace) -> int:
    try:
        doc = _load_document(args.file)
        tokens = load_token_index(_read(args.tokens)) if args.tokens else None
        landmarks = (
            build_landmark_table(_load_document(args.landmarks))
            if args.landmarks
            else None
        )
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    except (GmtParseError, TokenIndexError, AnchorError) as exc:
        _err(str(exc))
        return FAILURE
    failed = False
    for path, node in doc.walk():
        for item in iter_items(node):
            if not isinstance(item, SegmentRef):
                continue
            try:
                span = resolve_seg(item, tokens=tokens, landmarks=landmarks)
            except (UnresolvedTargetError, InvertedSpanError) as exc:
                print(f"{args.file}: {path}: {exc}", file=sys.stderr)
                failed = True
                continue
            if span.is_span:
                print(f"{path}\t{span.start}\t{span.end}")
            else:
                print(f"{path}\tnodes:{','.join(span.target_nodes)}")
    if failed and not args.lenient:
        return FINDINGS
    return OK


def cmd_merge(args: argparse.Namespace) -> int:
    try:
        docs = [_load_document(path) for path in args.files]
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    except GmtParseError as exc:
        _err(str(exc))
        return FAILURE
    warnings: list[str] = []
    try:
        merged = merge(docs, MergePolicy(on_parallel=args.policy), warnings)
        text = serialize_gmt(merged)
    except (MergeError, GmtSerializeError) as exc:
        _err(str(exc))
        return FINDINGS
    for warning in warnings:
        print(f"gmtannot: {warning}", file=sys.stderr)
    try:
        Path(args.output).write_text(text, encoding="utf-8")
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    return OK


def cmd_diff(args: argparse.Namespace) -> int:
    try:
        left = _load_document(args.left)
        right = _load_document(args.right)
    except OSError as exc:
        _err(str(exc))
        return FAILURE
    except GmtParseError as exc:
        _err(str(exc))
        return FAILURE
    report = diff(left, right)
    if report.entries:
        print(report.render())
    return OK if report.all_equal else FINDINGS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmtannot",
        description="Validate, resolve, merge, diff and convert stand-off annotation documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a document's structure and data categories")
    p.add_argument("file")
    p.add_argument("--registry", help="registry file (default: the bundled registry)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between annotation graphs and GMT documents")
    p.add_argument("--from", dest="source_format", choices=("ag", "gmt"), required=True)
    p.add_argument("--to", dest="target_format", choices=("ag", "gmt"), required=True)
    p.add_argument("inputs", nargs="+")
    p.add_argument("-o", "--output", required=True, help="output directory (ag->gmt) or file (gmt->ag)")
    p.add_argument("--map", help="arc type mapping table (default: P/W)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("resolve", help="resolve segment references to spans")
    p.add_argument("file")
    p.add_argument("--tokens", help="token index file")
    p.add_argument("--landmarks", help="landmark description document")
    p.add_argument("--lenient", action="store_true", help="skip unresolvable targets instead of failing")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("merge", help="merge annotation layers of one document type")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.add_argument(
        "--policy",
        choices=(KEEP_ALL, DEDUP_IDENTICAL, FOLD_TO_ALT),
        default=KEEP_ALL,
    )
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("diff", help="compare two documents anchor by anchor")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "convert" and args.source_format == args.target_format:
        parser.error("--from and --to must name different formats")
    return args.func(args)


def run() -> None:
    sys.exit(main())
