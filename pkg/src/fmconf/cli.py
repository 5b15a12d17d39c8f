"""Command-line interface.

Subcommands: validate, enumerate, metrics, select, reconfigure. Exit
codes: 0 success, 2 input or model error, 3 I/O failure, 4 unsatisfiable
requirements. The environment variable ``SCAS_SCOPE_CAP`` overrides the
default 64-feature enumeration cap.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction
from itertools import islice
from pathlib import Path

from . import __version__
from .engine import enumerate_configurations, layer_metrics, layer_report
from .errors import FmconfError, InputSyntaxError, MalformedDocumentError
from .ingest import SourceFormat, parse
from .model import Configuration, FeatureModel
from .report import ReportEntry, render_report
from .selfconfig import RequirementSet, reconfigure, select_configuration

_SUFFIXES = {".xml": SourceFormat.XML, ".arcs": SourceFormat.ARC_TABLE}


def _detect_format(path: Path, flag: str | None) -> SourceFormat:
    if flag:
        return SourceFormat.XML if flag == "xml" else SourceFormat.ARC_TABLE
    fmt = _SUFFIXES.get(path.suffix.lower())
    if fmt is None:
        raise FmconfError(
            f"cannot detect the format of {path.name!r}; pass --format xml|arcs")
    return fmt


def _load(path_str: str, flag: str | None) -> tuple[FeatureModel, bytes]:
    path = Path(path_str)
    data = path.read_bytes()
    fmt = _detect_format(path, flag)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedDocumentError(f"input is not valid UTF-8: {exc}") from None
    return parse(text, fmt), data


def _scope_cap() -> int | None:
    raw = os.environ.get("SCAS_SCOPE_CAP")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise FmconfError(f"SCAS_SCOPE_CAP is not an integer: {raw!r}") from None


def _split_tokens(values: list[str] | None) -> list[str]:
    out = []
    for chunk in values or []:
        out.extend(t.strip() for t in chunk.split(",") if t.strip())
    return out


def _read_weights(model: FeatureModel, path_str: str) -> dict:
    weights = {}
    for lineno, raw in enumerate(Path(path_str).read_text("utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InputSyntaxError("expected 'token value'", lineno)
        token, value = parts
        try:
            weight = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise InputSyntaxError(f"bad weight {value!r}", lineno) from None
        weights[model.feature(token).id] = weight
    return weights


def _build_requirements(model: FeatureModel, args) -> RequirementSet:
    required = [model.feature(t).id for t in _split_tokens(args.require)]
    excluded = [model.feature(t).id for t in _split_tokens(args.exclude)]
    weights = _read_weights(model, args.weights) if args.weights else {}
    return RequirementSet.of(required, excluded, weights)


def _read_configuration(model: FeatureModel, path_str: str) -> Configuration:
    tokens: list[str] = []
    for raw in Path(path_str).read_text("utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = [t.strip() for t in line.split(",") if t.strip()]
        break
    return Configuration.from_tokens(model, tokens)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_validate(args) -> int:
    model, _ = _load(args.input, args.format)
    print(f"{len(model.features)} features, {len(model.arcs)} arcs")
    return 0


def _cmd_enumerate(args) -> int:
    model, _ = _load(args.input, args.format)
    stream = enumerate_configurations(model, args.scope, cap=_scope_cap(),
                                      allow_large=args.limit is not None)
    if args.limit is not None:
        stream = islice(stream, args.limit)
    if args.count_only:
        print(sum(1 for _ in stream))
    else:
        for config in stream:
            print(config.as_line())
    return 0


def _cmd_metrics(args) -> int:
    model, data = _load(args.input, args.format)
    cap = _scope_cap()
    if args.scope:
        feat = model.feature(args.scope)
        entries = [ReportEntry(feat.level, feat.layer,
                               layer_metrics(model, args.scope, cap=cap))]
    else:
        entries = [ReportEntry(level, layer, metrics)
                   for (level, layer), metrics in layer_report(model, cap=cap).items()]
    digest = hashlib.sha256(data).hexdigest()
    sys.stdout.write(render_report(model, entries, digest))
    if args.figures:
        from .figures import render_figures
        for path in render_figures(entries, Path(args.figures)):
            print(f"figure: {path}", file=sys.stderr)
    return 0


def _cmd_select(args) -> int:
    model, _ = _load(args.input, args.format)
    req = _build_requirements(model, args)
    config = select_configuration(model, args.scope, req, cap=_scope_cap())
    print(config.as_line())
    print(f"cost: {req.weight_of(config.selected)}")
    return 0


def _cmd_reconfigure(args) -> int:
    model, _ = _load(args.input, args.format)
    req = _build_requirements(model, args)
    current = _read_configuration(model, args.current)
    plan = reconfigure(model, args.scope, current, req, cap=_scope_cap())
    print(f"target: {plan.target.as_line()}")
    print(f"add: {','.join(sorted(f.token for f in plan.add))}".rstrip())
    print(f"remove: {','.join(sorted(f.token for f in plan.remove))}".rstrip())
    print(f"delta_size: {plan.delta_size}")
    print(f"cost: {plan.cost}")
    return 0


# ---------------------------------------------------------------------------
# Parser wiring
# ---------------------------------------------------------------------------

def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="feature model file (.xml or .arcs)")
    p.add_argument("--format", choices=("xml", "arcs"),
                   help="override format detection by extension")


def _add_requirements(p: argparse.ArgumentParser) -> None:
    p.add_argument("--require", action="append", metavar="TOKENS",
                   help="comma-separated features that must be selected (repeatable)")
    p.add_argument("--exclude", action="append", metavar="TOKENS",
                   help="comma-separated features that must not be selected (repeatable)")
    p.add_argument("--weights", metavar="FILE",
                   help="weights file, one 'token value' pair per line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fmconf",
        description="Feature-model configuration engine for layered SaaS models")
    parser.add_argument("--version", action="version", version=f"fmconf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a model")
    _add_input(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("enumerate", help="list valid configurations of a scope")
    _add_input(p)
    p.add_argument("--scope", required=True, help="scope feature token")
    p.add_argument("--limit", type=int, metavar="N",
                   help="emit at most N configurations (consents to large scopes)")
    p.add_argument("--count-only", action="store_true",
                   help="print the configuration count instead of the stream")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("metrics", help="variability and commonality report")
    _add_input(p)
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--scope", help="report a single scope")
    target.add_argument("--all-layers", action="store_true",
                        help="report every tagged (level, layer) subtree")
    p.add_argument("--figures", metavar="DIR",
                   help="render figures as PNG files into DIR")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("select", help="pick the cheapest valid configuration")
    _add_input(p)
    p.add_argument("--scope", required=True, help="scope feature token")
    _add_requirements(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("reconfigure", help="plan a minimal reconfiguration")
    _add_input(p)
    p.add_argument("--scope", required=True, help="scope feature token")
    p.add_argument("--current", required=True, metavar="FILE",
                   help="file holding the current configuration line")
    _add_requirements(p)
    p.set_defaults(func=_cmd_reconfigure)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FmconfError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
