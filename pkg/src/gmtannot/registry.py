"""A simplified data category registry.

Categories are declared in a line-based file, carry a value constraint
and may name a single parent category, giving sub-class inheritance.
Scheme-specific names are mapped onto canonical categories through
aliases.  The registry governs feature categories only; structural node
types are an open vocabulary.

File format (UTF-8, ``#`` comments)::

    name [parent=<name>] kind=<open|set:a,b,c|range:lo..hi|ref> [alias=x,y]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from typing import Optional, Union

from .errors import RegistryError
from .model import (
    ERROR,
    AltSet,
    Bracket,
    Feature,
    Finding,
    GmtDocument,
    NodeItem,
    StructNode,
    ValidationReport,
)


@dataclass(frozen=True)
class OpenText:
    """Any literal value is acceptable."""


@dataclass(frozen=True)
class ClosedSet:
    """The value must be one of a fixed set of strings."""

    values: tuple[str, ...]


@dataclass(frozen=True)
class DecimalRange:
    """The value must parse as a decimal within [lo, hi]."""

    lo: Decimal
    hi: Decimal


@dataclass(frozen=True)
class Reference:
    """The value is supplied by a target object in another document."""


ValueKind = Union[OpenText, ClosedSet, DecimalRange, Reference]


@dataclass(frozen=True)
class CategoryDef:
    name: str
    kind: ValueKind
    parent: Optional[str] = None
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class Registry:
    """Immutable map of category definitions with alias resolution."""

    categories: dict[str, CategoryDef] = field(default_factory=dict)

    def __post_init__(self) -> None:
        aliases: dict[str, str] = {}
        for cat in self.categories.values():
            for alias in cat.aliases:
                aliases[alias] = cat.name
        object.__setattr__(self, "_aliases", aliases)

    def __len__(self) -> int:
        return len(self.categories)

    def resolve(self, name: str) -> Optional[CategoryDef]:
        """Look up a category by canonical name or alias."""
        if name in self.categories:
            return self.categories[name]
        canonical = self._aliases.get(name)  # type: ignore[attr-defined]
        return self.categories.get(canonical) if canonical is not None else None


def load_registry(text: str) -> Registry:
    """Parse a registry file, checking every structural invariant.

    Duplicate names or aliases, unknown parents, inheritance cycles and
    malformed lines are load errors carrying the offending line number.
    Parents may be declared after their children.
    """
    categories: dict[str, CategoryDef] = {}
    alias_owner: dict[str, str] = {}
    lines_by_name: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cat = _parse_line(stripped, lineno)
        if cat.name in categories:
            raise RegistryError(f"duplicate category '{cat.name}'", lineno)
        for alias in cat.aliases:
            if alias in alias_owner:
                raise RegistryError(f"alias '{alias}' already maps to '{alias_owner[alias]}'", lineno)
            alias_owner[alias] = cat.name
        categories[cat.name] = cat
        lines_by_name[cat.name] = lineno
    for name, cat in categories.items():
        if cat.parent is not None and cat.parent not in categories:
            raise RegistryError(f"unknown parent '{cat.parent}' for '{name}'", lines_by_name[name])
        if cat.aliases and any(alias in categories for alias in cat.aliases):
            clash = next(a for a in cat.aliases if a in categories)
            raise RegistryError(f"alias '{clash}' clashes with a category name", lines_by_name[name])
    for name in categories:
        seen = {name}
        current = categories[name].parent
        while current is not None:
            if current in seen:
                raise RegistryError(f"inheritance cycle through '{current}'", lines_by_name[name])
            seen.add(current)
            current = categories[current].parent
    return Registry(categories)


def _parse_line(line: str, lineno: int) -> CategoryDef:
    parts = line.split()
    name = parts[0]
    parent: Optional[str] = None
    kind: Optional[ValueKind] = None
    aliases: tuple[str, ...] = ()
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise RegistryError(f"malformed token {part!r}", lineno)
        if key == "parent":
            parent = value
        elif key == "kind":
            kind = _parse_kind(value, lineno)
        elif key == "alias":
            aliases = tuple(a for a in value.split(",") if a)
        else:
            raise RegistryError(f"unknown key {key!r}", lineno)
    if kind is None:
        raise RegistryError(f"category '{name}' has no kind", lineno)
    return CategoryDef(name=name, kind=kind, parent=parent, aliases=aliases)


def _parse_kind(value: str, lineno: int) -> ValueKind:
    if value == "open":
        return OpenText()
    if value == "ref":
        return Reference()
    if value.startswith("set:"):
        members = tuple(m for m in value[4:].split(",") if m)
        if not members:
            raise RegistryError("closed set must not be empty", lineno)
        return ClosedSet(members)
    if value.startswith("range:"):
        lo_raw, sep, hi_raw = value[6:].partition("..")
        if not sep:
            raise RegistryError("range needs the form lo..hi", lineno)
        try:
            lo, hi = Decimal(lo_raw), Decimal(hi_raw)
        except InvalidOperation:
            raise RegistryError(f"range bounds {value[6:]!r} are not decimals", lineno) from None
        if lo > hi:
            raise RegistryError("range lower bound exceeds upper bound", lineno)
        return DecimalRange(lo, hi)
    raise RegistryError(f"unknown kind {value!r}", lineno)


def default_registry() -> Registry:
    """The registry bundled with the package."""
    text = resources.files("gmtannot.data").joinpath("default_registry.txt").read_text("utf-8")
    return load_registry(text)


def is_subcategory(registry: Registry, child: str, ancestor: str) -> bool:
    """True iff ancestor is reachable from child via parent links.

    Reflexive and transitive; both names may be aliases.  Unknown names
    are an error.
    """
    child_def = registry.resolve(child)
    if child_def is None:
        raise RegistryError(f"unknown category '{child}'")
    ancestor_def = registry.resolve(ancestor)
    if ancestor_def is None:
        raise RegistryError(f"unknown category '{ancestor}'")
    current: Optional[CategoryDef] = child_def
    while current is not None:
        if current.name == ancestor_def.name:
            return True
        current = registry.categories.get(current.parent) if current.parent else None
    return False


def validate_categories(doc: GmtDocument, registry: Registry) -> ValidationReport:
    """Check every feature of a document against the registry.

    Unknown categories (after alias resolution) and values violating the
    category's kind become error findings.  Structural node types are
    not checked.
    """
    findings: list[Finding] = []

    def check_feature(feat: Feature, path: str) -> None:
        cat = registry.resolve(feat.cat)
        if cat is None:
            findings.append(
                Finding(ERROR, "UNKNOWN_CATEGORY", path, f"category '{feat.cat}' is not in the registry")
            )
        else:
            findings.extend(_check_value(feat, cat, path))
        count = 0
        for sub in feat.nested or ():
            count += 1
            check_feature(sub, f"{path}/feat[{count}]")

    def check_items(items: tuple[NodeItem, ...], path: str) -> None:
        counts: dict[str, int] = {}
        alt_pos = 0
        for item in items:
            if isinstance(item, Feature):
                counts["feat"] = counts.get("feat", 0) + 1
                check_feature(item, f"{path}/feat[{counts['feat']}]")
            elif isinstance(item, AltSet):
                for bundle in item.alternatives:
                    alt_pos += 1
                    feat_pos = 0
                    for member in bundle:
                        if isinstance(member, Feature):
                            feat_pos += 1
                            check_feature(member, f"{path}/alt[{alt_pos}]/feat[{feat_pos}]")
                        else:
                            check_node(member, f"{path}/alt[{alt_pos}]")
            elif isinstance(item, Bracket):
                counts["brack"] = counts.get("brack", 0) + 1
                check_items(item.members, f"{path}/brack[{counts['brack']}]")

    def check_node(node: StructNode, path: str) -> None:
        check_items(node.items, path)
        for j, child in enumerate(node.children):
            check_node(child, f"{path}/struct[{j + 1}]")

    for i, root in enumerate(doc.roots):
        check_node(root, f"/struct[{i + 1}]")
    return ValidationReport(tuple(findings))


def _check_value(feat: Feature, cat: CategoryDef, path: str) -> list[Finding]:
    kind = cat.kind
    if isinstance(kind, OpenText):
        return []
    if isinstance(kind, Reference):
        if feat.target is None:
            return [
                Finding(
                    ERROR,
                    "VALUE_KIND_MISMATCH",
                    path,
                    f"category '{cat.name}' takes its value by reference; expected a target",
                )
            ]
        return []
    if feat.text is None:
        return [
            Finding(
                ERROR,
                "VALUE_KIND_MISMATCH",
                path,
                f"category '{cat.name}' expects a literal value",
            )
        ]
    if isinstance(kind, ClosedSet):
        if feat.text not in kind.values:
            return [
                Finding(
                    ERROR,
                    "VALUE_NOT_IN_SET",
                    path,
                    f"value {feat.text!r} is not one of {{{', '.join(kind.values)}}} for '{cat.name}'",
                )
            ]
        return []
    try:
        value = Decimal(feat.text.strip())
    except InvalidOperation:
        return [
            Finding(ERROR, "VALUE_NOT_DECIMAL", path, f"value {feat.text!r} is not a decimal for '{cat.name}'")
        ]
    if value < kind.lo or value > kind.hi:
        return [
            Finding(
                ERROR,
                "VALUE_OUT_OF_RANGE",
                path,
                f"value {feat.text} is outside [{kind.lo}, {kind.hi}] for '{cat.name}'",
            )
        ]
    return []
