"""Parsers and serializers for the two feature-model dialects.

XML dialect
    Element set: ``featureModel``, ``struct``, ``and``, ``or``,
    ``alternative``, ``feature``; attributes ``name``, ``mandatory``,
    ``abstract``. Nesting defines the tree. A child of an ``and`` element
    attaches through a singleton arc, ``[1,1]`` when the child carries
    ``mandatory="true"`` and ``[0,1]`` otherwise. An ``or`` element with c
    children becomes one arc over them with multiplicity ``[1,c]``; an
    ``alternative`` becomes ``[1,1]`` over its children. Non-structural
    elements under ``featureModel`` (constraints, comments, featureOrder)
    are skipped.

arc-table dialect
    A node block followed by one arc per line::

        # comment to end of line
        { 0(0.Root); 1(1.Child); 2(2.Other) }
        0 [1,1] {1}
        0 [0,1] {2}

    node block  ::=  "{" ( INT "(" INT "." NAME ")" ";"? )+ "}"
    arc         ::=  INT "[" INT "," INT "]" "{" ( INT ( "," INT )* )? "}"

    Arcs reference node indices; the model is rooted at index 0. Names may
    use any characters except whitespace and ``( ) { } [ ] , ; #``. The
    dialect is whitespace-tolerant, so the node block may span lines. An
    arc whose heads are all already parented by earlier arcs (or are the
    root) is read as a cross-tree constraint; arcs introducing new
    children are tree arcs, and an arc mixing the two is rejected.

Names are never normalized: both parsers store exactly the tokens the
input provides. Level and layer tags are inferred from well-known subtree
roots (provider/tenant/user children of the model root; PGUI-style tokens
for the four layers) and default to none.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import replace
from enum import Enum

from .errors import (
    DuplicateFeatureNameError,
    InputSyntaxError,
    MalformedDocumentError,
    MultipleParentsError,
    UnknownElementError,
    UnknownIndexError,
    UnrepresentableError,
)
from .model import (
    ArcKind,
    Feature,
    FeatureId,
    FeatureModel,
    HyperArc,
    Layer,
    Level,
    Multiplicity,
    build_model,
)


class SourceFormat(Enum):
    XML = "xml"
    ARC_TABLE = "arc_table"


# ---------------------------------------------------------------------------
# Level / layer tag inference
# ---------------------------------------------------------------------------

_LEVEL_ROOTS = {
    "provider": Level.PROVIDER,
    "tenant": Level.TENANT,
    "user": Level.USER,
}
_LAYER_SUFFIXES = {"gui": Layer.GUI, "bp": Layer.BP, "s": Layer.S, "db": Layer.DB}


def _layer_root_tag(token: str) -> Layer | None:
    t = token.lower()
    if t[:1] in ("p", "t", "u"):
        return _LAYER_SUFFIXES.get(t[1:])
    return None


def _with_inferred_tags(model: FeatureModel) -> FeatureModel:
    tags: dict[str, tuple[Level, Layer]] = {model.root.token: (Level.NONE, Layer.NONE)}
    stack = [model.root]
    while stack:
        fid = stack.pop()
        level, layer = tags[fid.token]
        for child in model.children(fid):
            child_level = level
            if fid == model.root:
                child_level = _LEVEL_ROOTS.get(child.token.lower(), Level.NONE)
            child_layer = _layer_root_tag(child.token) or layer
            tags[child.token] = (child_level, child_layer)
            stack.append(child)
    feats = [replace(f, level=tags[f.token][0], layer=tags[f.token][1])
             for f in model.features]
    return FeatureModel(feats, model.arcs, model.root)


# ---------------------------------------------------------------------------
# XML dialect
# ---------------------------------------------------------------------------

_STRUCT_TAGS = {"and", "or", "alternative", "feature"}


def parse_feature_xml(text: str) -> FeatureModel:
    """Parse an XML feature-model document (or a bare structural fragment)."""
    try:
        root_el = ET.fromstring(text)
    except ET.ParseError as exc:
        line, column = exc.position
        raise MalformedDocumentError(str(exc.msg) if hasattr(exc, "msg") else str(exc),
                                     line, column) from None

    if root_el.tag == "featureModel":
        struct = root_el.find("struct")
        if struct is None:
            raise MalformedDocumentError("featureModel has no struct element")
        tops = [el for el in struct]
        if len(tops) != 1:
            raise MalformedDocumentError(
                f"struct must contain exactly one root feature, found {len(tops)}")
        top = tops[0]
    elif root_el.tag in _STRUCT_TAGS:
        top = root_el
    else:
        raise UnknownElementError(f"unexpected document element <{root_el.tag}>")

    seen: set[str] = set()
    features: list[Feature] = []
    arcs: list[HyperArc] = []

    def walk(el: ET.Element) -> FeatureId:
        if el.tag not in _STRUCT_TAGS:
            raise UnknownElementError(f"unexpected element <{el.tag}> in the feature tree")
        name = el.get("name")
        if name is None:
            raise MalformedDocumentError(f"<{el.tag}> element has no name attribute")
        if name in seen:
            raise DuplicateFeatureNameError(f"duplicate feature {name!r}")
        seen.add(name)
        fid = FeatureId(name)
        features.append(Feature(fid, abstract=el.get("abstract") == "true"))
        children = list(el)
        child_ids = [walk(c) for c in children]
        if not child_ids:
            return fid
        if el.tag in ("or", "alternative"):
            hi = len(child_ids) if el.tag == "or" else 1
            arcs.append(HyperArc(fid, tuple(child_ids), Multiplicity(1, hi)))
        else:
            for child_el, child_id in zip(children, child_ids):
                lo = 1 if child_el.get("mandatory") == "true" else 0
                arcs.append(HyperArc(fid, (child_id,), Multiplicity(lo, 1)))
        return fid

    root_id = walk(top)
    model = build_model(features, arcs, root_id)
    return _with_inferred_tags(model)


def serialize_xml(model: FeatureModel) -> str:
    """Render a model in the XML dialect.

    Raises :class:`UnrepresentableError` for shapes the dialect cannot
    express: cross arcs, mutex groups, or-groups not of the form [1,c], and
    tails mixing a group arc with other arcs.
    """
    if model.cross_arcs:
        raise UnrepresentableError("the XML dialect cannot express cross arcs")

    singles: dict[str, dict[str, bool]] = {}   # tail -> head -> mandatory
    groups: dict[str, HyperArc] = {}
    for arc in model.arcs:
        kind = arc.kind()
        if kind in (ArcKind.MANDATORY, ArcKind.OPTIONAL):
            singles.setdefault(arc.tail.token, {})[arc.heads[0].token] = \
                kind is ArcKind.MANDATORY
        elif kind is ArcKind.XOR_GROUP:
            if arc.tail.token in groups:
                raise UnrepresentableError(
                    f"{arc.tail.token!r} has more than one feature group")
            groups[arc.tail.token] = arc
        elif kind is ArcKind.OR_GROUP and (arc.mult.min, arc.mult.max) == (1, len(arc.heads)):
            if arc.tail.token in groups:
                raise UnrepresentableError(
                    f"{arc.tail.token!r} has more than one feature group")
            groups[arc.tail.token] = arc
        else:
            raise UnrepresentableError(
                f"arc {arc} ({kind.value}) has no XML group form")
    mixed = set(singles) & set(groups)
    if mixed:
        raise UnrepresentableError(
            f"{sorted(mixed)[0]!r} mixes a feature group with other arcs")

    def element(fid: FeatureId, mandatory: bool | None) -> ET.Element:
        feat = model.feature(fid)
        group = groups.get(feat.token)
        if group is not None:
            tag = "alternative" if group.kind() is ArcKind.XOR_GROUP else "or"
            heads = list(group.heads)
        elif feat.token in singles:
            tag = "and"
            heads = sorted(singles[feat.token], key=lambda t: model.feature(t).id.sort_key())
            heads = [model.feature(t).id for t in heads]
        else:
            tag = "feature"
            heads = []
        el = ET.Element(tag)
        if feat.abstract:
            el.set("abstract", "true")
        if mandatory:
            el.set("mandatory", "true")
        el.set("name", feat.token)
        for head in heads:
            is_mand = singles[feat.token][head.token] if tag == "and" else None
            el.append(element(head, is_mand))
        return el

    doc = ET.Element("featureModel")
    struct = ET.SubElement(doc, "struct")
    struct.append(element(model.root, None))
    tree = ET.ElementTree(doc)
    ET.indent(tree, space="  ")
    body = ET.tostring(doc, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


# ---------------------------------------------------------------------------
# arc-table dialect
# ---------------------------------------------------------------------------

_NAME_CHARS = re.compile(r"[^\s(){}\[\],;#]+")


class _Scanner:
    """Character scanner with line/column tracking and comment skipping."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def skip_ws(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif ch.isspace():
                self._advance()
            else:
                return

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def location(self) -> tuple[int, int]:
        self.skip_ws()
        return self.line, self.col

    def fail(self, message: str) -> "InputSyntaxError":
        return InputSyntaxError(message, self.line, self.col)

    def try_take(self, ch: str) -> bool:
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == ch:
            self._advance()
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.try_take(ch):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise self.fail(f"expected {ch!r}, found {found!r}")

    def read_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self._advance()
        if self.pos == start:
            found = self.text[start] if start < len(self.text) else "end of input"
            raise self.fail(f"expected an integer, found {found!r}")
        return int(self.text[start:self.pos])

    def read_name(self) -> str:
        self.skip_ws()
        m = _NAME_CHARS.match(self.text, self.pos)
        if not m:
            raise self.fail("expected a node name")
        self._advance(len(m.group()))
        return m.group()


def parse_arc_table(text: str) -> FeatureModel:
    """Parse arc-table text into a model rooted at the node with index 0."""
    sc = _Scanner(text)
    sc.expect("{")
    names: dict[int, str] = {}
    while True:
        if sc.try_take("}"):
            if not names:
                raise sc.fail("the node block declares no nodes")
            break
        if sc.eof():
            raise sc.fail("unterminated node block")
        line, col = sc.location()
        idx = sc.read_int()
        sc.expect("(")
        inner = sc.read_int()
        if inner != idx:
            raise InputSyntaxError(
                f"node {idx} redeclared with mismatched index {inner}", line, col)
        sc.expect(".")
        name = sc.read_name()
        sc.expect(")")
        if idx in names:
            raise InputSyntaxError(f"duplicate node index {idx}", line, col)
        names[idx] = name
        sc.try_take(";")

    raw = []
    while not sc.eof():
        line, col = sc.location()
        tail = sc.read_int()
        sc.expect("[")
        lo = sc.read_int()
        sc.expect(",")
        hi = sc.read_int()
        sc.expect("]")
        sc.expect("{")
        heads: list[int] = []
        if not sc.try_take("}"):
            heads.append(sc.read_int())
            while not sc.try_take("}"):
                sc.expect(",")
                heads.append(sc.read_int())
        raw.append((tail, lo, hi, heads, line, col))

    if 0 not in names:
        raise UnknownIndexError("the node block declares no root (index 0)")

    def resolve(idx: int, line: int, col: int) -> FeatureId:
        if idx not in names:
            raise UnknownIndexError(f"index {idx} is not declared", line, col)
        return FeatureId(names[idx], idx)

    parented: set[int] = set()
    arcs: list[HyperArc] = []
    for tail, lo, hi, heads, line, col in raw:
        tail_id = resolve(tail, line, col)
        head_ids = tuple(resolve(h, line, col) for h in heads)
        fresh = [h for h in heads if h != 0 and h not in parented]
        if len(fresh) == len(heads):
            cross = False
            parented.update(heads)
        elif not fresh:
            cross = True
        else:
            raise MultipleParentsError(
                f"arc at line {line} mixes new children with already-parented heads")
        arcs.append(HyperArc(tail_id, head_ids, Multiplicity(lo, hi), cross=cross))

    features = [Feature(FeatureId(name, idx)) for idx, name in sorted(names.items())]
    model = build_model(features, arcs, FeatureId(names[0], 0))
    return _with_inferred_tags(model)


def serialize_arc_table(model: FeatureModel) -> str:
    """Render a model in the arc-table dialect.

    Every arc shape is expressible. Existing indices are kept when they
    form a usable numbering (root at 0); otherwise features are renumbered
    in canonical order. The dialect carries no abstract marker, so abstract
    flags are not preserved across a round trip.
    """
    feats = model.features
    for f in feats:
        if not _NAME_CHARS.fullmatch(f.token):
            raise UnrepresentableError(
                f"token {f.token!r} uses characters the table dialect reserves")

    indexed = all(f.id.index is not None for f in feats)
    root_feat = model.feature(model.root)
    if indexed and root_feat.id.index == 0:
        index_of = {f.token: f.id.index for f in feats}
    else:
        index_of = {}
        nxt = 1
        for f in feats:
            if f.token == root_feat.token:
                index_of[f.token] = 0
            else:
                index_of[f.token] = nxt
                nxt += 1

    lines = ["{"]
    for f in sorted(feats, key=lambda f: index_of[f.token]):
        i = index_of[f.token]
        lines.append(f"  {i}({i}.{f.token});")
    lines.append("}")
    for arc in sorted(model.arcs, key=lambda a: (
            a.cross,
            index_of[a.tail.token],
            tuple(index_of[h.token] for h in a.heads),
            a.mult.min, a.mult.max)):
        heads = ",".join(str(index_of[h.token]) for h in arc.heads)
        lines.append(f"{index_of[arc.tail.token]} {arc.mult} {{{heads}}}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def parse(text: str, fmt: SourceFormat) -> FeatureModel:
    if fmt is SourceFormat.XML:
        return parse_feature_xml(text)
    return parse_arc_table(text)


def serialize(model: FeatureModel, fmt: SourceFormat) -> str:
    """Render a model such that ``parse(serialize(m), fmt)`` equals ``m``
    for every model expressible in the dialect."""
    if fmt is SourceFormat.XML:
        return serialize_xml(model)
    return serialize_arc_table(model)
