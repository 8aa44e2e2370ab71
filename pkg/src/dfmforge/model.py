"""Core data model for DFM schemata.

A schema is a rooted DAG: the fact is the root, measures hang directly off
the fact, and attributes form roll-up hierarchies. Measures carry an
additivity level which is rendered as a name suffix; dependency endpoints
always use the *rendered* (suffixed) measure name so that the in-memory
graph mirrors the YAML dialect exactly.

All values here are immutable; operations elsewhere return new schemata.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional


class Additivity(enum.Enum):
    ADDITIVE = "additive"
    SEMI_ADDITIVE = "semi-additive"
    NON_ADDITIVE = "non-additive"


# Rendered-name suffix for each additivity level. Additive measures keep
# their plain name.
ADDITIVITY_SUFFIX = {
    Additivity.ADDITIVE: "",
    Additivity.SEMI_ADDITIVE: " (SUM-AVG)",
    Additivity.NON_ADDITIVE: " (AVG)",
}

_SUFFIX_TO_ADDITIVITY = {
    " (SUM-AVG)": Additivity.SEMI_ADDITIVE,
    " (AVG)": Additivity.NON_ADDITIVE,
}


def split_additivity_suffix(name: str) -> tuple[str, Additivity]:
    """Split a rendered name into (base name, additivity)."""
    for suffix, level in _SUFFIX_TO_ADDITIVITY.items():
        if name.endswith(suffix) and len(name) > len(suffix):
            return name[: -len(suffix)], level
    return name, Additivity.ADDITIVE


def check_node_name(value: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ValueError("node names must be non-empty text")
    return value


@dataclass(frozen=True)
class Measure:
    """A fact payload value. `name` is the suffix-free base name."""

    name: str
    additivity: Additivity = Additivity.ADDITIVE

    def __post_init__(self) -> None:
        check_node_name(self.name)

    @property
    def rendered_name(self) -> str:
        return self.name + ADDITIVITY_SUFFIX[self.additivity]


@dataclass(frozen=True)
class Dependency:
    """One many-to-one roll-up arc (a functional dependency)."""

    source: str
    target: str
    role: Optional[str] = None

    def __post_init__(self) -> None:
        check_node_name(self.source)
        check_node_name(self.target)

    @property
    def triple(self) -> tuple[str, str, Optional[str]]:
        return (self.source, self.target, self.role)


@dataclass(frozen=True, eq=False)
class DfmSchema:
    """A DFM schema as a value. Construction is lenient: structural
    invariants are checked by :func:`validate`, not here, so that broken
    LLM output can still be represented and scored."""

    fact: str
    measures: tuple[Measure, ...] = ()
    dependencies: tuple[Dependency, ...] = ()
    descriptive: frozenset[str] = frozenset()
    optional: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        check_node_name(self.fact)
        object.__setattr__(self, "measures", tuple(self.measures))
        object.__setattr__(self, "dependencies", tuple(self.dependencies))
        object.__setattr__(self, "descriptive", frozenset(self.descriptive))
        object.__setattr__(self, "optional", frozenset(self.optional))

    # -- identity ---------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DfmSchema):
            return NotImplemented
        return (
            self.fact == other.fact
            and Counter(self.measures) == Counter(other.measures)
            and Counter(d.triple for d in self.dependencies)
            == Counter(d.triple for d in other.dependencies)
            and self.descriptive == other.descriptive
            and self.optional == other.optional
        )

    def __hash__(self) -> int:
        return hash(
            (
                self.fact,
                frozenset(Counter(self.measures).items()),
                frozenset(Counter(d.triple for d in self.dependencies).items()),
                self.descriptive,
                self.optional,
            )
        )

    # -- derived views ----------------------------------------------------

    @property
    def measure_names(self) -> frozenset[str]:
        """Base (suffix-free) measure names."""
        return frozenset(m.name for m in self.measures)

    @property
    def rendered_measure_names(self) -> frozenset[str]:
        return frozenset(m.rendered_name for m in self.measures)

    @property
    def attributes(self) -> frozenset[str]:
        """All dependency endpoints that are neither the fact nor a measure."""
        endpoints: set[str] = set()
        for d in self.dependencies:
            endpoints.add(d.source)
            endpoints.add(d.target)
        return frozenset(endpoints - {self.fact} - set(self.rendered_measure_names))

    @property
    def nodes(self) -> frozenset[str]:
        """Fact, base measure names, and attributes."""
        return frozenset({self.fact}) | self.measure_names | self.attributes

    def measure(self, base_name: str) -> Optional[Measure]:
        for m in self.measures:
            if m.name == base_name:
                return m
        return None

    def children(self, node: str) -> list[str]:
        return [d.target for d in self.dependencies if d.source == node]

    def parents(self, node: str) -> list[str]:
        return [d.source for d in self.dependencies if d.target == node]

    def in_degree(self, node: str) -> int:
        return sum(1 for d in self.dependencies if d.target == node)

    def out_degree(self, node: str) -> int:
        return sum(1 for d in self.dependencies if d.source == node)

    def dimensions(self) -> frozenset[str]:
        """Attributes with an arc directly from the fact."""
        attrs = self.attributes
        return frozenset(
            d.target for d in self.dependencies if d.source == self.fact and d.target in attrs
        )

    def reachable_from_fact(self) -> frozenset[str]:
        adjacency: dict[str, list[str]] = {}
        for d in self.dependencies:
            adjacency.setdefault(d.source, []).append(d.target)
        seen = {self.fact}
        stack = [self.fact]
        while stack:
            node = stack.pop()
            for nxt in adjacency.get(node, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return frozenset(seen)


class ValidationCode(enum.Enum):
    DISCONNECTED = "Disconnected"
    CYCLE = "Cycle"
    FACT_HAS_PARENT = "FactHasParent"
    DANGLING_MARK = "DanglingMark"
    FAKE_NODE = "FakeNode"
    DESCRIPTIVE_WITH_CHILDREN = "DescriptiveWithChildren"
    DUPLICATE_ARC = "DuplicateArc"
    ROLE_OUTSIDE_SHARED_HIERARCHY = "RoleOutsideSharedHierarchy"


@dataclass(frozen=True)
class Violation:
    code: ValidationCode
    subject: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "violations", tuple(self.violations))

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[ValidationCode]:
        return {v.code for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"code": v.code.value, "subject": v.subject, "message": v.message}
                for v in self.violations
            ],
        }


def _find_cycle_nodes(schema: DfmSchema) -> set[str]:
    adjacency: dict[str, list[str]] = {}
    nodes: set[str] = set()
    for d in schema.dependencies:
        adjacency.setdefault(d.source, []).append(d.target)
        nodes.add(d.source)
        nodes.add(d.target)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(nodes, WHITE)
    on_cycle: set[str] = set()

    def visit(node: str, path: list[str]) -> None:
        color[node] = GRAY
        path.append(node)
        for nxt in adjacency.get(node, ()):
            if color[nxt] == GRAY:
                on_cycle.update(path[path.index(nxt):])
                on_cycle.add(nxt)
            elif color[nxt] == WHITE:
                visit(nxt, path)
        path.pop()
        color[node] = BLACK

    for node in sorted(nodes):
        if color[node] == WHITE:
            visit(node, [])
    return on_cycle


def validate(schema: DfmSchema) -> ValidationReport:
    """Check all structural invariants; an empty report means the schema
    is a well-formed DFM schema (connected DAG rooted in the fact, marks
    consistent, measure names consistent between tags)."""
    violations: list[Violation] = []

    # duplicate (from, to, role) triples
    triple_counts = Counter(d.triple for d in schema.dependencies)
    for triple, count in sorted(triple_counts.items(), key=lambda kv: str(kv[0])):
        if count > 1:
            violations.append(
                Violation(
                    ValidationCode.DUPLICATE_ARC,
                    f"{triple[0]} -> {triple[1]}",
                    f"arc ({triple[0]}, {triple[1]}, {triple[2]}) appears {count} times",
                )
            )

    # fact must have in-degree 0
    for d in schema.dependencies:
        if d.target == schema.fact:
            violations.append(
                Violation(
                    ValidationCode.FACT_HAS_PARENT,
                    schema.fact,
                    f"arc {d.source} -> {d.target} enters the fact",
                )
            )

    # cycles (self-loops included)
    for node in sorted(_find_cycle_nodes(schema)):
        violations.append(
            Violation(ValidationCode.CYCLE, node, f"{node} lies on a dependency cycle")
        )

    # measures: exactly one arc fact -> measure, nothing else touches them
    rendered = {m.rendered_name: m for m in schema.measures}
    for m in schema.measures:
        incoming = [d for d in schema.dependencies if d.target == m.rendered_name]
        from_fact = [d for d in incoming if d.source == schema.fact]
        if not from_fact:
            violations.append(
                Violation(
                    ValidationCode.DISCONNECTED,
                    m.name,
                    f"measure {m.name} has no arc from the fact",
                )
            )
        for d in incoming:
            if d.source != schema.fact:
                violations.append(
                    Violation(
                        ValidationCode.FAKE_NODE,
                        m.name,
                        f"measure {m.rendered_name} entered by non-fact arc from {d.source}",
                    )
                )
        for d in schema.dependencies:
            if d.source == m.rendered_name:
                violations.append(
                    Violation(
                        ValidationCode.FAKE_NODE,
                        m.name,
                        f"measure {m.rendered_name} used as hierarchy member (arc to {d.target})",
                    )
                )

    # fake nodes: attributes whose name clashes with a measure up to the
    # additivity suffix (the classic renamed-under-one-tag-only failure)
    base_names = schema.measure_names
    for attr in sorted(schema.attributes):
        stripped, _ = split_additivity_suffix(attr)
        if attr in base_names or (stripped != attr and stripped in base_names):
            violations.append(
                Violation(
                    ValidationCode.FAKE_NODE,
                    attr,
                    f"node {attr} duplicates a measure up to its additivity suffix",
                )
            )

    # reachability: every attribute reachable from the fact
    reachable = schema.reachable_from_fact()
    for attr in sorted(schema.attributes):
        if attr not in reachable:
            violations.append(
                Violation(
                    ValidationCode.DISCONNECTED,
                    attr,
                    f"{attr} is not reachable from the fact",
                )
            )

    # marks must sit on existing attributes
    for label, marks in (("descriptive", schema.descriptive), ("optional", schema.optional)):
        for name in sorted(marks):
            if name not in schema.attributes:
                violations.append(
                    Violation(
                        ValidationCode.DANGLING_MARK,
                        name,
                        f"{label} mark on {name}, which is not an attribute",
                    )
                )

    # descriptive attributes are hierarchy leaves
    for name in sorted(schema.descriptive):
        if name in schema.attributes and schema.out_degree(name) > 0:
            violations.append(
                Violation(
                    ValidationCode.DESCRIPTIVE_WITH_CHILDREN,
                    name,
                    f"descriptive attribute {name} has outgoing arcs",
                )
            )

    # roles only on arcs entering shared-hierarchy nodes
    for d in schema.dependencies:
        if d.role and schema.in_degree(d.target) < 2:
            violations.append(
                Violation(
                    ValidationCode.ROLE_OUTSIDE_SHARED_HIERARCHY,
                    d.target,
                    f"arc {d.source} -> {d.target} carries role {d.role!r} "
                    f"but {d.target} is not a shared-hierarchy entry",
                )
            )

    return ValidationReport(tuple(violations))


def shared_hierarchy_entries(schema: DfmSchema) -> frozenset[str]:
    """Nodes entered by two or more arcs."""
    counts = Counter(d.target for d in schema.dependencies)
    return frozenset(node for node, n in counts.items() if n >= 2)
