"""Resolution of segment references against primary data.

Three anchoring mechanisms are supported:

* temporal: explicit start/end offsets resolve to themselves;
* event-based: landmark identifiers resolve through a landmark table
  built from a landmark description document;
* object-based: identifier targets resolve either to token spans of the
  primary text (through a token index) or to nodes of another annotation
  layer.

Offsets are opaque integers; the library never converts between time
and character units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional

from .errors import AnchorError, InvertedSpanError, TokenIndexError, UnresolvedTargetError
from .model import (
    Feature,
    GmtDocument,
    IdTargets,
    LandmarkEndpoints,
    PositionalSpan,
    SegmentRef,
    StructNode,
    find_node,
    iter_items,
)

#: Source marker for spans located directly in the primary data.
PRIMARY = "primary"

#: Node type that marks a landmark description entry.
LANDMARK_TYPE = "landmark"

#: Data category holding a landmark's position.
POSITION_CAT = "position"


class Token(NamedTuple):
    id: str
    start: int
    end: int


@dataclass(frozen=True)
class TokenIndex:
    """Sidecar index mapping token ids to character spans of a text."""

    entries: tuple[Token, ...]
    source_text: Optional[str] = None

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for token in self.entries:
            if token.start < 0 or token.end < 0:
                raise TokenIndexError(f"token '{token.id}' has a negative offset")
            if token.start > token.end:
                raise TokenIndexError(f"token '{token.id}' starts after it ends")
            if token.id in seen:
                raise TokenIndexError(f"duplicate token id '{token.id}'")
            seen.add(token.id)
        object.__setattr__(self, "_by_id", {t.id: t for t in self.entries})

    def get(self, token_id: str) -> Optional[Token]:
        return self._by_id.get(token_id)  # type: ignore[attr-defined]

    def __contains__(self, token_id: str) -> bool:
        return token_id in self._by_id  # type: ignore[attr-defined]


def load_token_index(text: str) -> TokenIndex:
    """Read the tab-separated token index format.

    One entry per line: ``tokenId<TAB>start<TAB>end``; ``#`` starts a
    comment line; blank lines are ignored.
    """
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TokenIndexError(f"line {lineno}: expected 'tokenId<TAB>start<TAB>end'")
        token_id, start_raw, end_raw = (p.strip() for p in parts)
        try:
            start, end = int(start_raw), int(end_raw)
        except ValueError:
            raise TokenIndexError(f"line {lineno}: offsets must be integers") from None
        if not token_id:
            raise TokenIndexError(f"line {lineno}: empty token id")
        entries.append(Token(token_id, start, end))
    return TokenIndex(tuple(entries))


def tokenize_whitespace(text: str, prefix: str = "w") -> TokenIndex:
    """Build a token index by whitespace tokenization of a text.

    Tokens are numbered ``w1, w2, ...`` in order; spans are character
    offsets with an exclusive end, non-overlapping and ordered.
    """
    entries = []
    offset = 0
    number = 0
    for chunk in text.split():
        start = text.index(chunk, offset)
        number += 1
        entries.append(Token(f"{prefix}{number}", start, start + len(chunk)))
        offset = start + len(chunk)
    return TokenIndex(tuple(entries), source_text=text)


#: Landmark id -> position, in time or offset units.
LandmarkTable = dict[str, int]


def build_landmark_table(doc: GmtDocument) -> LandmarkTable:
    """Collect id -> position from every landmark-typed node.

    Non-landmark nodes are ignored.  A landmark without an id or a
    position feature, or with a position that is not a non-negative
    integer, is an error.
    """
    table: LandmarkTable = {}
    for path, node in doc.walk():
        if node.type != LANDMARK_TYPE:
            continue
        if node.id is None:
            raise AnchorError(f"landmark at {path} has no id")
        position = None
        for item in iter_items(node):
            if isinstance(item, Feature) and item.cat == POSITION_CAT and item.text is not None:
                position = item.text.strip()
                break
        if position is None:
            raise AnchorError(f"landmark '{node.id}' at {path} has no position feature")
        try:
            value = int(position)
        except ValueError:
            raise AnchorError(f"landmark '{node.id}' at {path}: position {position!r} is not an integer") from None
        if value < 0:
            raise AnchorError(f"landmark '{node.id}' at {path}: position must be non-negative")
        if node.id in table:
            raise AnchorError(f"duplicate landmark id '{node.id}' at {path}")
        table[node.id] = value
    return table


@dataclass(frozen=True)
class ResolvedSpan:
    """Where a segment reference points after resolution.

    Either a concrete ``(start, end)`` span in some source, or -- for
    object-based anchoring -- the identifiers of the target nodes.
    """

    layer: str
    start: Optional[int] = None
    end: Optional[int] = None
    target_nodes: tuple[str, ...] = ()

    @property
    def is_span(self) -> bool:
        return self.start is not None


def resolve_seg(
    seg: SegmentRef,
    tokens: Optional[TokenIndex] = None,
    landmarks: Optional[LandmarkTable] = None,
    layers: Optional[Mapping[str, GmtDocument]] = None,
) -> ResolvedSpan:
    """Resolve one segment reference against the supplied context.

    Positional spans resolve to themselves.  Landmark endpoints are
    looked up in the landmark table.  Identifier targets must resolve
    entirely within one context: the token index first, then each layer
    document in turn; token matches yield the covering span (min start,
    max end), layer matches yield the target node list.
    """
    addr = seg.addr
    if isinstance(addr, PositionalSpan):
        return ResolvedSpan(PRIMARY, addr.start, addr.end)
    if isinstance(addr, LandmarkEndpoints):
        if landmarks is None:
            raise UnresolvedTargetError(addr.start, "no landmark table supplied")
        for endpoint in (addr.start, addr.end):
            if endpoint not in landmarks:
                raise UnresolvedTargetError(endpoint)
        start, end = landmarks[addr.start], landmarks[addr.end]
        if start > end:
            raise InvertedSpanError(
                f"landmarks '{addr.start}'..'{addr.end}' span {start}..{end}, which is inverted"
            )
        return ResolvedSpan(PRIMARY, start, end)
    if not addr.ids:
        raise UnresolvedTargetError("", "segment reference names no targets")
    if tokens is not None and all(t in tokens for t in addr.ids):
        spans = [tokens.get(t) for t in addr.ids]
        return ResolvedSpan(PRIMARY, min(s.start for s in spans), max(s.end for s in spans))
    for key, layer_doc in (layers or {}).items():
        if all(find_node(layer_doc, t) is not None for t in addr.ids):
            return ResolvedSpan(key, target_nodes=tuple(addr.ids))
    missing = addr.ids[0]
    for t in addr.ids:
        if (tokens is None or t not in tokens) and not any(
            find_node(d, t) is not None for d in (layers or {}).values()
        ):
            missing = t
            break
    raise UnresolvedTargetError(missing)


def derived_extent(
    node: StructNode,
    tokens: Optional[TokenIndex] = None,
    landmarks: Optional[LandmarkTable] = None,
    strict: bool = True,
    warnings: Optional[list[str]] = None,
) -> Optional[tuple[int, int]]:
    """Covering span over every resolvable segment of a node and its children.

    In strict mode an unresolvable target propagates as an error; in
    lenient mode it is skipped and recorded in ``warnings``.  Returns
    None when nothing resolves to offsets.
    """
    spans: list[tuple[int, int]] = []

    def visit(current: StructNode) -> None:
        for item in iter_items(current):
            if not isinstance(item, SegmentRef):
                continue
            try:
                resolved = resolve_seg(item, tokens=tokens, landmarks=landmarks)
            except (UnresolvedTargetError, InvertedSpanError) as exc:
                if strict:
                    raise
                if warnings is not None:
                    warnings.append(str(exc))
                continue
            if resolved.is_span:
                spans.append((resolved.start, resolved.end))
        for child in current.children:
            visit(child)

    visit(node)
    if not spans:
        return None
    return min(s for s, _ in spans), max(e for _, e in spans)
