"""Toolkit for stand-off linguistic annotation in the GMT XML format.

Parse, validate, anchor-resolve, merge, diff and serialize stand-off
annotation documents, convert them to and from annotation graphs, and
check data categories against a registry with inheritance.
"""

from .agraph import (
    DEFAULT_TYPE_MAP,
    AgArc,
    AnnotationGraph,
    ag_to_gmt,
    canonicalize_ag,
    gmt_to_ag,
    load_type_map,
    parse_ag,
    serialize_ag,
)
from .anchoring import (
    PRIMARY,
    LandmarkTable,
    ResolvedSpan,
    Token,
    TokenIndex,
    build_landmark_table,
    derived_extent,
    load_token_index,
    resolve_seg,
    tokenize_whitespace,
)
from .errors import (
    AgParseError,
    AnchorError,
    BridgeError,
    GmtError,
    GmtParseError,
    GmtSerializeError,
    InvertedSpanError,
    MergeError,
    RegistryError,
    TokenIndexError,
    UnresolvedTargetError,
)
from .merge import (
    BOTH_DIFFER,
    BOTH_EQUAL,
    DEDUP_IDENTICAL,
    FOLD_TO_ALT,
    KEEP_ALL,
    ONLY_LEFT,
    ONLY_RIGHT,
    DiffEntry,
    DiffReport,
    MergePolicy,
    anchor_key,
    diff,
    merge,
)
from .model import (
    ERROR,
    WARNING,
    AltSet,
    Bracket,
    Bundle,
    Feature,
    Finding,
    GmtDocument,
    IdTargets,
    LandmarkEndpoints,
    NodeItem,
    PositionalSpan,
    Relation,
    SegmentRef,
    StructNode,
    ValidationReport,
    collect_referenced_ids,
    find_node,
    select_preferred_alternative,
    validate_structure,
)
from .registry import (
    CategoryDef,
    ClosedSet,
    DecimalRange,
    OpenText,
    Reference,
    Registry,
    default_registry,
    is_subcategory,
    load_registry,
    validate_categories,
)
from .xml_io import ParseDiagnostics, ParseWarning, parse_gmt, serialize_gmt

__version__ = "0.1.0"

__all__ = [
    "AgArc",
    "AgParseError",
    "AltSet",
    "AnchorError",
    "AnnotationGraph",
    "BOTH_DIFFER",
    "BOTH_EQUAL",
    "Bracket",
    "BridgeError",
    "Bundle",
    "CategoryDef",
    "ClosedSet",
    "DecimalRange",
    "DEDUP_IDENTICAL",
    "DEFAULT_TYPE_MAP",
    "DiffEntry",
    "DiffReport",
    "ERROR",
    "Feature",
    "Finding",
    "FOLD_TO_ALT",
    "GmtDocument",
    "GmtError",
    "GmtParseError",
    "GmtSerializeError",
    "IdTargets",
    "InvertedSpanError",
    "KEEP_ALL",
    "LandmarkEndpoints",
    "LandmarkTable",
    "MergeError",
    "MergePolicy",
    "NodeItem",
    "ONLY_LEFT",
    "ONLY_RIGHT",
    "OpenText",
    "ParseDiagnostics",
    "ParseWarning",
    "PositionalSpan",
    "PRIMARY",
    "Reference",
    "Registry",
    "RegistryError",
    "Relation",
    "ResolvedSpan",
    "SegmentRef",
    "StructNode",
    "Token",
    "TokenIndex",
    "TokenIndexError",
    "UnresolvedTargetError",
    "ValidationReport",
    "WARNING",
    "ag_to_gmt",
    "anchor_key",
    "build_landmark_table",
    "canonicalize_ag",
    "collect_referenced_ids",
    "default_registry",
    "derived_extent",
    "diff",
    "find_node",
    "gmt_to_ag",
    "is_subcategory",
    "load_registry",
    "load_token_index",
    "load_type_map",
    "merge",
    "parse_ag",
    "parse_gmt",
    "resolve_seg",
    "select_preferred_alternative",
    "serialize_ag",
    "serialize_gmt",
    "tokenize_whitespace",
    "validate_categories",
    "validate_structure",
]
