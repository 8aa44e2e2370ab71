"""Deterministic refinement rewrites over DFM schemata.

The seven operation kinds map to the refinement steps (renaming,
additivity labeling, descriptive marking, discretization, optionality,
time-hierarchy completion, attribute removal) plus shared-hierarchy
merging. Each rewrite is a pure function: valid schema in, valid schema
out. Operations are also available as serializable command objects with a
hash-chained application log, so a refinement session can be replayed.
"""

from __future__ import annotations

import enum
import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .codec import serialize_yaml
from .model import Additivity, Dependency, DfmSchema, Measure


class RefinementError(Exception):
    code = "RefinementError"


class UnknownNodeError(RefinementError):
    code = "UnknownNode"


class UnknownMeasureError(RefinementError):
    code = "UnknownMeasure"


class NameCollisionError(RefinementError):
    code = "NameCollision"


class DescriptiveWithChildrenError(RefinementError):
    code = "DescriptiveWithChildren"


class CannotRemoveFactError(RefinementError):
    code = "CannotRemoveFact"


class CannotRemoveMeasureError(RefinementError):
    code = "CannotRemoveMeasure"


class NonIsomorphicSubhierarchiesError(RefinementError):
    code = "NonIsomorphicSubhierarchies"


class RoleCountMismatchError(RefinementError):
    code = "RoleCountMismatch"


class ApplyError(RefinementError):
    """Failure inside apply_ops: carries the step index and the schema as
    it stood before the failing step."""

    code = "Apply"

    def __init__(self, step: int, cause: RefinementError, schema: DfmSchema):
        super().__init__(f"step {step}: {cause}")
        self.step = step
        self.cause = cause
        self.schema = schema


def _dedupe(deps: Iterable[Dependency]) -> tuple[Dependency, ...]:
    seen: set[tuple] = set()
    out: list[Dependency] = []
    for d in deps:
        if d.triple not in seen:
            seen.add(d.triple)
            out.append(d)
    return tuple(out)


def _strip_orphan_roles(deps: Sequence[Dependency]) -> tuple[Dependency, ...]:
    """Roles are only legal on arcs into shared entries; after a rewrite
    shrinks a node's in-degree below 2, its remaining role is dropped."""
    in_deg = Counter(d.target for d in deps)
    return tuple(
        Dependency(d.source, d.target, None) if d.role and in_deg[d.target] < 2 else d
        for d in deps
    )


def _all_names(schema: DfmSchema) -> set[str]:
    names = {schema.fact}
    names |= set(schema.attributes)
    for m in schema.measures:
        names.add(m.name)
        names.add(m.rendered_name)
    return names


def _rename_endpoints(
    deps: Sequence[Dependency], old: str, new: str
) -> tuple[Dependency, ...]:
    return tuple(
        Dependency(
            new if d.source == old else d.source,
            new if d.target == old else d.target,
            d.role,
        )
        for d in deps
    )


def rename(schema: DfmSchema, old: str, new: str) -> DfmSchema:
    """Rename an attribute or a measure (by base name) everywhere at once:
    measure list, every dependency endpoint, and both mark sets."""
    if old == new:
        return schema
    if new in _all_names(schema):
        raise NameCollisionError(f"name {new!r} already in use")
    measure = schema.measure(old)
    if measure is not None:
        new_measure = Measure(new, measure.additivity)
        measures = tuple(new_measure if m.name == old else m for m in schema.measures)
        deps = _rename_endpoints(
            schema.dependencies, measure.rendered_name, new_measure.rendered_name
        )
        return DfmSchema(schema.fact, measures, deps, schema.descriptive, schema.optional)
    if old in schema.attributes:
        deps = _rename_endpoints(schema.dependencies, old, new)
        repl = lambda marks: frozenset(new if n == old else n for n in marks)
        return DfmSchema(schema.fact, schema.measures, deps, repl(schema.descriptive), repl(schema.optional))
    raise UnknownNodeError(f"no attribute or measure named {old!r}")


def set_additivity(schema: DfmSchema, measure: str, level: Additivity) -> DfmSchema:
    """Relabel a measure's additivity, keeping the rendered (suffixed)
    name consistent in the dependency list."""
    m = schema.measure(measure)
    if m is None:
        raise UnknownMeasureError(f"no measure named {measure!r}")
    if m.additivity is level:
        return schema
    new_m = Measure(m.name, level)
    measures = tuple(new_m if x.name == measure else x for x in schema.measures)
    deps = _rename_endpoints(schema.dependencies, m.rendered_name, new_m.rendered_name)
    return DfmSchema(schema.fact, measures, deps, schema.descriptive, schema.optional)


def mark_descriptive(schema: DfmSchema, attr: str) -> DfmSchema:
    if attr not in schema.attributes:
        raise UnknownNodeError(f"no attribute named {attr!r}")
    if schema.out_degree(attr) > 0:
        raise DescriptiveWithChildrenError(
            f"{attr} has outgoing arcs; descriptive attributes are leaves"
        )
    if attr in schema.descriptive:
        return schema
    return DfmSchema(
        schema.fact,
        schema.measures,
        schema.dependencies,
        schema.descriptive | {attr},
        schema.optional,
    )


def mark_optional(schema: DfmSchema, attr: str) -> DfmSchema:
    if attr not in schema.attributes:
        raise UnknownNodeError(f"no attribute named {attr!r}")
    if attr in schema.optional:
        return schema
    return DfmSchema(
        schema.fact,
        schema.measures,
        schema.dependencies,
        schema.descriptive,
        schema.optional | {attr},
    )


def discretize(
    schema: DfmSchema, attr: str, range_name: str, mode: str = "replace"
) -> DfmSchema:
    """Replace a dense-domain attribute by a banded version.

    mode="replace" (default) substitutes the node in place; mode="insert"
    keeps the attribute and adds the range as a coarser roll-up level.
    """
    if attr not in schema.attributes:
        raise UnknownNodeError(f"no attribute named {attr!r}")
    if range_name in _all_names(schema):
        raise NameCollisionError(f"name {range_name!r} already in use")
    if mode == "replace":
        return rename(schema, attr, range_name)
    if mode == "insert":
        deps = schema.dependencies + (Dependency(attr, range_name),)
        descriptive = schema.descriptive
        if attr in descriptive:
            # the attribute now has a child; the band inherits the mark
            descriptive = (descriptive - {attr}) | {range_name}
        return DfmSchema(schema.fact, schema.measures, deps, descriptive, schema.optional)
    raise ValueError(f"unknown discretize mode {mode!r}")


_DATE_SUFFIX = re.compile(r"date$", re.IGNORECASE)


def _date_like_attributes(schema: DfmSchema) -> list[str]:
    return [a for a in schema.attributes if _DATE_SUFFIX.search(a)]


def time_node_names(schema: DfmSchema, date_attr: str) -> tuple[str, str]:
    """Names for the generated Month/Year nodes: plain when the schema has
    a single date attribute, prefixed with the date attribute's base name
    (minus the trailing "Date" token) otherwise."""
    prefix = ""
    if len(_date_like_attributes(schema)) > 1 or not _DATE_SUFFIX.search(date_attr):
        prefix = _DATE_SUFFIX.sub("", date_attr)
    return prefix + "Month", prefix + "Year"


def complete_time_hierarchy(schema: DfmSchema, date_attr: str) -> DfmSchema:
    """Add a Month -> Year chain above a date attribute. Idempotent:
    existing nodes and arcs are reused, never duplicated."""
    if date_attr not in schema.attributes:
        raise UnknownNodeError(f"no attribute named {date_attr!r}")
    if date_attr in schema.descriptive:
        raise DescriptiveWithChildrenError(
            f"{date_attr} is descriptive; complete the hierarchy before marking it"
        )
    month, year = time_node_names(schema, date_attr)
    deps = _dedupe(
        schema.dependencies + (Dependency(date_attr, month), Dependency(month, year))
    )
    return DfmSchema(schema.fact, schema.measures, deps, schema.descriptive, schema.optional)


def remove_attribute(schema: DfmSchema, attr: str) -> DfmSchema:
    """Remove an attribute: its non-descriptive children are re-attached
    to every former parent (the fact included), its descriptive children
    are deleted outright along with their marks."""
    if attr == schema.fact:
        raise CannotRemoveFactError("the fact cannot be removed")
    if schema.measure(attr) is not None or attr in schema.rendered_measure_names:
        raise CannotRemoveMeasureError(f"{attr} is a measure, not an attribute")
    if attr not in schema.attributes:
        raise UnknownNodeError(f"no attribute named {attr!r}")

    parents = sorted({d.source for d in schema.dependencies if d.target == attr})
    children = sorted({d.target for d in schema.dependencies if d.source == attr})
    doomed = {attr}
    for child in children:
        if child in schema.descriptive:
            # descriptive children go away with their parent, but only if
            # this was their sole parent
            if all(p == attr for p in schema.parents(child)):
                doomed.add(child)

    deps = [
        d
        for d in schema.dependencies
        if d.source not in doomed and d.target not in doomed
    ]
    for child in children:
        if child in doomed:
            continue
        for parent in parents:
            deps.append(Dependency(parent, child))
    new_deps = _strip_orphan_roles(_dedupe(deps))
    survivors = {d.source for d in new_deps} | {d.target for d in new_deps}
    return DfmSchema(
        schema.fact,
        schema.measures,
        new_deps,
        frozenset(n for n in schema.descriptive if n in survivors and n not in doomed),
        frozenset(n for n in schema.optional if n in survivors and n not in doomed),
    )


def _normalize(name: str) -> str:
    return "".join(ch for ch in name.lower() if ch.isalnum())


def _common_suffix(names: Sequence[str]) -> str:
    if not names:
        return ""
    reversed_names = [n[::-1] for n in names]
    prefix = reversed_names[0]
    for n in reversed_names[1:]:
        while not n.startswith(prefix):
            prefix = prefix[:-1]
            if not prefix:
                return ""
    return prefix[::-1]


def _subtree(schema: DfmSchema, root: str) -> tuple[set[str], set[tuple[str, str, Optional[str]]]]:
    """Descendant nodes and arcs strictly below `root`."""
    adjacency: dict[str, list[Dependency]] = {}
    for d in schema.dependencies:
        adjacency.setdefault(d.source, []).append(d)
    nodes: set[str] = set()
    arcs: set[tuple[str, str, Optional[str]]] = set()
    stack = [root]
    while stack:
        node = stack.pop()
        for d in adjacency.get(node, ()):
            arcs.add(d.triple)
            if d.target not in nodes:
                nodes.add(d.target)
                stack.append(d.target)
    return nodes, arcs


def merge_shared_hierarchy(
    schema: DfmSchema,
    attrs: Sequence[str],
    merged: str,
    roles: Sequence[str],
) -> DfmSchema:
    """Collapse role-equivalent attributes (e.g. pick-up and drop-off
    dates) into one shared node; each former incoming arc keeps its role.
    The attributes' sub-hierarchies must be copies of each other up to the
    role-specific name prefix."""
    if len(attrs) != len(roles) or len(set(attrs)) < 2:
        raise RoleCountMismatchError(
            "need at least two distinct attributes with one role each"
        )
    for a in attrs:
        if a not in schema.attributes:
            raise UnknownNodeError(f"no attribute named {a!r}")
    if merged in _all_names(schema) and merged not in attrs:
        raise NameCollisionError(f"name {merged!r} already in use")

    suffix = _common_suffix(list(attrs))
    prefixes = {a: a[: len(a) - len(suffix)] if suffix else a for a in attrs}

    def strip(name: str, root: str) -> str:
        p = prefixes[root]
        return name[len(p):] if p and name.startswith(p) else name

    subtrees = {a: _subtree(schema, a) for a in attrs}
    keyed = {
        a: (
            {_normalize(strip(n, a)) for n in nodes},
            {
                (_normalize(strip(s, a)) if s != a else "", _normalize(strip(t, a)))
                for (s, t, _r) in arcs
            },
        )
        for a, (nodes, arcs) in subtrees.items()
    }
    first = attrs[0]
    for a in attrs[1:]:
        if keyed[a] != keyed[first]:
            raise NonIsomorphicSubhierarchiesError(
                f"sub-hierarchies of {first!r} and {a!r} differ"
            )

    # unified names come from the first sub-hierarchy with its prefix cut
    first_nodes, first_arcs = subtrees[first]
    unify: dict[str, str] = {first: merged}
    taken = _all_names(schema)
    for n in sorted(first_nodes):
        candidate = strip(n, first)
        if candidate in taken and candidate not in first_nodes:
            candidate = n  # stripping would collide with an unrelated node
        unify[n] = candidate

    # nodes reachable only through the merged attributes disappear
    exclusive: set[str] = set()
    for a, (nodes, _arcs) in subtrees.items():
        exclusive |= nodes
    kept_elsewhere = _reachable_without(schema, set(attrs))
    exclusive -= kept_elsewhere
    removed = set(attrs) | (exclusive - first_nodes)

    name_map: dict[str, str] = dict(unify)
    for a in attrs:
        name_map[a] = merged
    for a in attrs[1:]:
        nodes_a, _ = subtrees[a]
        for n in sorted(nodes_a & exclusive):
            # corresponding first-subtree node, via the normalized key
            key = _normalize(strip(n, a))
            for fn in first_nodes:
                if _normalize(strip(fn, first)) == key:
                    name_map[n] = unify[fn]
                    break

    role_of = dict(zip(attrs, roles))
    deps: list[Dependency] = []
    for d in schema.dependencies:
        if d.target in attrs:
            deps.append(Dependency(name_map.get(d.source, d.source), merged, role_of[d.target] or None))
        elif d.source in removed or d.target in removed:
            if d.source in name_map and d.target in name_map:
                deps.append(Dependency(name_map[d.source], name_map[d.target], d.role))
            # arcs into dropped duplicate copies vanish
        else:
            deps.append(
                Dependency(name_map.get(d.source, d.source), name_map.get(d.target, d.target), d.role)
            )
    new_deps = _strip_orphan_roles(_dedupe(deps))

    def remap_marks(marks: frozenset[str]) -> frozenset[str]:
        out = set()
        for n in marks:
            if n in attrs:
                continue
            out.add(name_map.get(n, n))
        survivors = {d.source for d in new_deps} | {d.target for d in new_deps}
        return frozenset(n for n in out if n in survivors)

    return DfmSchema(
        schema.fact,
        schema.measures,
        new_deps,
        remap_marks(schema.descriptive),
        remap_marks(schema.optional),
    )


def _reachable_without(schema: DfmSchema, blocked: set[str]) -> frozenset[str]:
    adjacency: dict[str, list[str]] = {}
    for d in schema.dependencies:
        adjacency.setdefault(d.source, []).append(d.target)
    seen = {schema.fact}
    stack = [schema.fact]
    while stack:
        node = stack.pop()
        for nxt in adjacency.get(node, ()):
            if nxt in blocked or nxt in seen:
                continue
            seen.add(nxt)
            stack.append(nxt)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# command objects and the replayable log


class OpKind(enum.Enum):
    RENAME = "Rename"
    SET_ADDITIVITY = "SetAdditivity"
    MARK_DESCRIPTIVE = "MarkDescriptive"
    DISCRETIZE = "Discretize"
    MARK_OPTIONAL = "MarkOptional"
    COMPLETE_TIME_HIERARCHY = "CompleteTimeHierarchy"
    REMOVE_ATTRIBUTE = "RemoveAttribute"
    MERGE_SHARED_HIERARCHY = "MergeSharedHierarchy"


@dataclass(frozen=True)
class RefinementOp:
    kind: OpKind
    params: dict[str, Any] = field(default_factory=dict)

    def apply(self, schema: DfmSchema) -> DfmSchema:
        p = self.params
        if self.kind is OpKind.RENAME:
            return rename(schema, p["old"], p["new"])
        if self.kind is OpKind.SET_ADDITIVITY:
            return set_additivity(schema, p["measure"], Additivity(p["level"]))
        if self.kind is OpKind.MARK_DESCRIPTIVE:
            return mark_descriptive(schema, p["attr"])
        if self.kind is OpKind.DISCRETIZE:
            return discretize(schema, p["attr"], p["range_name"], p.get("mode", "replace"))
        if self.kind is OpKind.MARK_OPTIONAL:
            return mark_optional(schema, p["attr"])
        if self.kind is OpKind.COMPLETE_TIME_HIERARCHY:
            return complete_time_hierarchy(schema, p["date_attr"])
        if self.kind is OpKind.REMOVE_ATTRIBUTE:
            return remove_attribute(schema, p["attr"])
        if self.kind is OpKind.MERGE_SHARED_HIERARCHY:
            return merge_shared_hierarchy(schema, p["attrs"], p["merged"], p["roles"])
        raise ValueError(f"unhandled op kind {self.kind}")

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": self.params}

    @classmethod
    def from_dict(cls, data: dict) -> "RefinementOp":
        return cls(OpKind(data["kind"]), dict(data.get("params") or {}))


def schema_hash(schema: DfmSchema) -> str:
    return hashlib.sha256(serialize_yaml(schema).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LogEntry:
    op: RefinementOp
    pre_hash: str
    post_hash: str


@dataclass(frozen=True)
class RefinementLog:
    entries: tuple[LogEntry, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        for a, b in zip(self.entries, self.entries[1:]):
            if a.post_hash != b.pre_hash:
                raise ValueError("refinement log hash chain is broken")

    def ops(self) -> list[RefinementOp]:
        return [e.op for e in self.entries]

    def __add__(self, other: "RefinementLog") -> "RefinementLog":
        return RefinementLog(self.entries + other.entries)


def apply_ops(
    schema: DfmSchema, ops: Sequence[RefinementOp]
) -> tuple[DfmSchema, RefinementLog]:
    """Apply ops left to right, recording a hash-chained log. On failure
    raises ApplyError carrying the step index and the last good schema."""
    entries: list[LogEntry] = []
    current = schema
    for i, op in enumerate(ops):
        pre = schema_hash(current)
        try:
            nxt = op.apply(current)
        except RefinementError as exc:
            raise ApplyError(i, exc, current) from exc
        entries.append(LogEntry(op, pre, schema_hash(nxt)))
        current = nxt
    return current, RefinementLog(tuple(entries))


def replay(schema: DfmSchema, log: RefinementLog) -> DfmSchema:
    result, _ = apply_ops(schema, log.ops())
    return result
