"""Randomized generators and brute-force oracles shared by the tests.

Everything here is deliberately independent of the library's own graph
machinery: reachability is re-derived with a plain BFS over an adjacency
dict, degrees by counting, so these can serve as oracles for the code
under test.
"""

from __future__ import annotations

import random
from typing import Optional

from dfmforge.model import Additivity, Dependency, DfmSchema, Measure
from dfmforge.relational import Column, ForeignKey, RelationalSchema, Table

# ---------------------------------------------------------------------------
# brute-force oracles


def bfs_reachable(schema: DfmSchema, start: Optional[str] = None) -> set[str]:
    adjacency: dict[str, list[str]] = {}
    for d in schema.dependencies:
        adjacency.setdefault(d.source, []).append(d.target)
    start = start or schema.fact
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, []):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def indegree_count(schema: DfmSchema) -> dict[str, int]:
    counts: dict[str, int] = {}
    for d in schema.dependencies:
        counts[d.target] = counts.get(d.target, 0) + 1
    return counts


def node_names(schema: DfmSchema) -> set[str]:
    names = {schema.fact} | set(schema.measure_names)
    for d in schema.dependencies:
        names.add(d.source)
        names.add(d.target)
    for m in schema.measures:
        names.discard(m.rendered_name)
    return names


# ---------------------------------------------------------------------------
# random valid schemata


def random_schema(
    rng: random.Random,
    max_nodes: int = 40,
    min_attrs: int = 2,
    with_roles: bool = True,
) -> DfmSchema:
    """A random valid DFM schema: rooted DAG of attributes plus measures.

    Names are fixed-width ("A00", "A01", ...) so no name is a substring of
    another, which keeps diff matching unambiguous.
    """
    n_attrs = rng.randint(min_attrs, max(min_attrs, max_nodes - 3))
    n_measures = rng.randint(0, 3)
    fact = "FACT"
    attrs = [f"A{i:02d}" for i in range(n_attrs)]
    measures = tuple(
        Measure(f"M{i:02d}", rng.choice(list(Additivity))) for i in range(n_measures)
    )

    deps: list[Dependency] = [Dependency(fact, m.rendered_name) for m in measures]
    # every attribute gets at least one parent among earlier nodes
    for i, attr in enumerate(attrs):
        pool = [fact] + attrs[:i]
        # bias towards hierarchy chains rather than a flat star
        parent = rng.choice(pool if rng.random() < 0.4 else pool[-3:])
        deps.append(Dependency(parent, attr))
        # occasional extra parent creates shared hierarchies
        if i >= 2 and rng.random() < 0.15:
            extra = rng.choice([p for p in pool if p != parent])
            deps.append(Dependency(extra, attr))

    schema = DfmSchema(fact, measures, tuple(deps))

    if with_roles:
        shared = {t for t, n in indegree_count(schema).items() if n >= 2}
        new_deps = []
        used = set()
        for d in schema.dependencies:
            if d.target in shared and rng.random() < 0.5:
                role = f"r{len(used)}"
                used.add(role)
                new_deps.append(Dependency(d.source, d.target, role))
            else:
                new_deps.append(d)
        schema = DfmSchema(fact, measures, tuple(new_deps))

    leaf_attrs = [a for a in attrs if all(d.source != a for d in schema.dependencies)]
    descriptive = frozenset(a for a in leaf_attrs if rng.random() < 0.2)
    optional = frozenset(a for a in attrs if rng.random() < 0.15)
    return DfmSchema(fact, measures, schema.dependencies, descriptive, optional)


# ---------------------------------------------------------------------------
# random relational sources


def random_relational(
    rng: random.Random, max_tables: int = 12
) -> tuple[RelationalSchema, str]:
    """A random acyclic relational schema; returns (schema, fact table)."""
    n_tables = rng.randint(1, max_tables)
    tables: list[Table] = []
    names = [f"T{i}" for i in range(n_tables)]
    # build in reverse topological order so FKs only point at later-built
    # (earlier-indexed) tables: table i may reference tables > i
    for i in reversed(range(n_tables)):
        cols: list[Column] = [Column(f"id{i}")]
        pk = [f"id{i}"]
        if i == 0 and rng.random() < 0.5:
            cols.append(Column("when"))
            pk.append("when")
        fks: list[ForeignKey] = []
        targets = list(range(i + 1, n_tables))
        rng.shuffle(targets)
        for j in targets[: rng.randint(0, min(3, len(targets)))]:
            col = f"ref{j}"
            cols.append(Column(col))
            fks.append(ForeignKey((col,), f"T{j}"))
        for k in range(rng.randint(0, 4)):
            cols.append(Column(f"c{k}", is_numeric=rng.random() < 0.5))
        tables.append(Table(f"T{i}", tuple(cols), tuple(pk), tuple(fks)))
    tables.reverse()
    return RelationalSchema(tuple(tables)), "T0"


# ---------------------------------------------------------------------------
# mutation injector for diff calibration
#
# Each mutation is designed to cost exactly one diff error, and mutations
# never touch the same node or arc twice, so k mutations => total k.

MUTATION_KINDS = ("additivity", "optional", "descriptive", "rename", "arc", "leaf")


def _eligible_mutations(schema: DfmSchema, touched: set[str]) -> list[tuple[str, str]]:
    from dfmforge.model import shared_hierarchy_entries

    out: list[tuple[str, str]] = []
    attrs = sorted(schema.attributes)
    in_deg = indegree_count(schema)
    for m in schema.measures:
        if m.name not in touched:
            out.append(("additivity", m.name))
    for a in attrs:
        if a in touched:
            continue
        out.append(("optional", a))
        if schema.out_degree(a) == 0:
            out.append(("descriptive", a))
            if a not in schema.descriptive and a not in schema.optional and in_deg[a] == 1:
                parent = schema.parents(a)[0]
                if parent not in touched:
                    out.append(("leaf", a))
        out.append(("rename", a))
    for d in schema.dependencies:
        if in_deg[d.target] >= 2 and d.source not in touched and d.target not in touched:
            out.append(("arc", f"{d.source}|{d.target}|{d.role or ''}"))
    return out


def _apply_mutation(schema: DfmSchema, kind: str, subject: str) -> DfmSchema:
    if kind == "additivity":
        m = schema.measure(subject)
        flips = [lv for lv in Additivity if lv is not m.additivity]
        new = Measure(m.name, flips[0])
        measures = tuple(new if x.name == subject else x for x in schema.measures)
        deps = tuple(
            Dependency(
                new.rendered_name if d.source == m.rendered_name else d.source,
                new.rendered_name if d.target == m.rendered_name else d.target,
                d.role,
            )
            for d in schema.dependencies
        )
        return DfmSchema(schema.fact, measures, deps, schema.descriptive, schema.optional)
    if kind == "optional":
        optional = (
            schema.optional - {subject}
            if subject in schema.optional
            else schema.optional | {subject}
        )
        return DfmSchema(
            schema.fact, schema.measures, schema.dependencies, schema.descriptive, optional
        )
    if kind == "descriptive":
        descriptive = (
            schema.descriptive - {subject}
            if subject in schema.descriptive
            else schema.descriptive | {subject}
        )
        return DfmSchema(
            schema.fact, schema.measures, schema.dependencies, descriptive, schema.optional
        )
    if kind == "rename":
        new_name = subject + "zz"
        deps = tuple(
            Dependency(
                new_name if d.source == subject else d.source,
                new_name if d.target == subject else d.target,
                d.role,
            )
            for d in schema.dependencies
        )
        swap = lambda marks: frozenset(new_name if n == subject else n for n in marks)
        return DfmSchema(
            schema.fact, schema.measures, deps, swap(schema.descriptive), swap(schema.optional)
        )
    if kind == "arc":
        src, tgt, role = subject.split("|")
        role_val = role or None
        deps = []
        dropped = False
        for d in schema.dependencies:
            if not dropped and d.source == src and d.target == tgt and d.role == role_val:
                dropped = True
                continue
            deps.append(d)
        # a role left alone on a now-single arc must keep its role: diff
        # compares role sets only when the arc pair exists on both sides
        return DfmSchema(
            schema.fact, schema.measures, tuple(deps), schema.descriptive, schema.optional
        )
    if kind == "leaf":
        deps = tuple(d for d in schema.dependencies if d.target != subject)
        return DfmSchema(
            schema.fact,
            schema.measures,
            deps,
            schema.descriptive - {subject},
            schema.optional - {subject},
        )
    raise ValueError(kind)


def inject_mutations(
    schema: DfmSchema, k: int, rng: random.Random
) -> Optional[DfmSchema]:
    """Apply k independent single-error mutations; None if the schema is
    too small to host k non-interacting mutations."""
    touched: set[str] = set()
    current = schema
    for _ in range(k):
        options = _eligible_mutations(current, touched)
        if not options:
            return None
        kind, subject = options[rng.randrange(len(options))]
        current = _apply_mutation(current, kind, subject)
        if kind == "arc":
            src, tgt, _role = subject.split("|")
            touched.update((src, tgt))
        elif kind == "leaf":
            touched.add(subject)
            touched.update(schema.parents(subject))
        elif kind == "rename":
            touched.add(subject)
            touched.add(subject + "zz")
        else:
            touched.add(subject)
    return current


# ---------------------------------------------------------------------------
# random precondition-respecting refinement ops


def random_refinement_op(schema: DfmSchema, rng: random.Random):
    """Pick one refinement op with arguments satisfying its preconditions;
    returns a RefinementOp or None when nothing is applicable."""
    from dfmforge.refine import OpKind, RefinementOp

    attrs = sorted(schema.attributes)
    fresh = f"NEW{rng.randrange(10**6):06d}"
    options = []
    if attrs or schema.measures:
        old = rng.choice(attrs + sorted(schema.measure_names))
        options.append(RefinementOp(OpKind.RENAME, {"old": old, "new": fresh}))
    if schema.measures:
        m = rng.choice(sorted(schema.measure_names))
        level = rng.choice(list(Additivity))
        options.append(RefinementOp(OpKind.SET_ADDITIVITY, {"measure": m, "level": level.value}))
    leaves = [a for a in attrs if schema.out_degree(a) == 0]
    if leaves:
        options.append(RefinementOp(OpKind.MARK_DESCRIPTIVE, {"attr": rng.choice(leaves)}))
    if attrs:
        options.append(RefinementOp(OpKind.MARK_OPTIONAL, {"attr": rng.choice(attrs)}))
        options.append(
            RefinementOp(
                OpKind.DISCRETIZE,
                {"attr": rng.choice(attrs), "range_name": fresh,
                 "mode": rng.choice(["replace", "insert"])},
            )
        )
    non_descriptive = [a for a in attrs if a not in schema.descriptive]
    if non_descriptive:
        options.append(
            RefinementOp(
                OpKind.COMPLETE_TIME_HIERARCHY, {"date_attr": rng.choice(non_descriptive)}
            )
        )
        options.append(
            RefinementOp(OpKind.REMOVE_ATTRIBUTE, {"attr": rng.choice(non_descriptive)})
        )
    # merging two fresh leaves is always isomorphic (empty sub-hierarchies)
    plain_leaves = [
        a for a in leaves
        if a not in schema.descriptive and a not in schema.optional
    ]
    if len(plain_leaves) >= 2:
        pair = rng.sample(plain_leaves, 2)
        options.append(
            RefinementOp(
                OpKind.MERGE_SHARED_HIERARCHY,
                {"attrs": pair, "merged": fresh, "roles": ["first", "second"]},
            )
        )
    if not options:
        return None
    return rng.choice(options)
