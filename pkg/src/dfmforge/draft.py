"""Supply-driven derivation of a draft DFM schema.

The derivation chases the functional dependencies encoded in the source:
primary keys determine their table's other columns, foreign keys link a
table's key to the referenced table's key. Node names keep the draft form
``TABLE.column`` (composite keys join their parts with a comma).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import Dependency, DfmSchema, Measure
from .relational import RelationalSchema, Table


class DraftError(Exception):
    code = "DraftError"


class UnknownFactTableError(DraftError):
    code = "UnknownFactTable"


class CyclicForeignKeysError(DraftError):
    code = "CyclicForeignKeys"


@dataclass(frozen=True)
class DraftConfig:
    fact_table: str
    # None = default rule: numeric, non-key, non-FK fact-table columns
    measure_columns: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.measure_columns is not None:
            object.__setattr__(self, "measure_columns", tuple(self.measure_columns))


def qualified(table: str, column: str) -> str:
    return f"{table}.{column}"


def key_node(table: Table) -> str:
    """Node name for a table's primary key; composite keys become one
    comma-joined node (e.g. ``WORKOUTS.date,WORKOUTS.time``)."""
    return ",".join(qualified(table.name, c) for c in table.primary_key)


def _check_fk_acyclic(rel: RelationalSchema, fact_table: str) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}

    def visit(name: str, trail: list[str]) -> None:
        color[name] = GRAY
        trail.append(name)
        for fk in rel.table(name).foreign_keys:
            state = color.get(fk.target_table, WHITE)
            if state == GRAY:
                cycle = trail[trail.index(fk.target_table):] + [fk.target_table]
                raise CyclicForeignKeysError(
                    "foreign-key cycle reachable from the fact table: "
                    + " -> ".join(cycle)
                )
            if state == WHITE:
                visit(fk.target_table, trail)
        trail.pop()
        color[name] = BLACK

    visit(fact_table, [])


def derive_draft(rel: RelationalSchema, cfg: DraftConfig) -> DfmSchema:
    """Chase keys and foreign keys breadth-first from the fact table and
    arrange the reached attributes into roll-up hierarchies."""
    try:
        fact_table = rel.table(cfg.fact_table)
    except KeyError:
        raise UnknownFactTableError(f"no table named {cfg.fact_table!r}") from None
    _check_fk_acyclic(rel, cfg.fact_table)

    fact = fact_table.name
    pk = set(fact_table.primary_key)
    fk_cols = fact_table.fk_columns

    if cfg.measure_columns is not None:
        measure_cols = list(cfg.measure_columns)
        for c in measure_cols:
            fact_table.column(c)
    else:
        measure_cols = [
            c.name
            for c in fact_table.columns
            if c.is_numeric and c.name not in pk and c.name not in fk_cols
        ]
    measures = tuple(Measure(qualified(fact, c)) for c in measure_cols)

    deps: list[Dependency] = [Dependency(fact, m.rendered_name) for m in measures]

    # dimensions: non-FK key parts of the fact table, plus the key node of
    # every table the fact table references
    for col in fact_table.primary_key:
        if col not in fk_cols:
            deps.append(Dependency(fact, qualified(fact, col)))

    queue: deque[tuple[str, Table]] = deque()
    visited: set[str] = set()
    for fk in fact_table.foreign_keys:
        target = rel.table(fk.target_table)
        deps.append(Dependency(fact, key_node(target)))
        if target.name not in visited:
            visited.add(target.name)
            queue.append((key_node(target), target))

    while queue:
        knode, table = queue.popleft()
        pk_cols = set(table.primary_key)
        fk_col_set = table.fk_columns
        for col in table.columns:
            if col.name in pk_cols or col.name in fk_col_set:
                continue
            deps.append(Dependency(knode, qualified(table.name, col.name)))
        for fk in table.foreign_keys:
            target = rel.table(fk.target_table)
            deps.append(Dependency(knode, key_node(target)))
            if target.name not in visited:
                visited.add(target.name)
                queue.append((key_node(target), target))

    # dedupe (two FKs to the same table keep both arcs only if roles
    # differed; the draft carries no roles, so identical arcs collapse)
    seen: set[tuple] = set()
    unique: list[Dependency] = []
    for d in deps:
        if d.triple not in seen:
            seen.add(d.triple)
            unique.append(d)

    return DfmSchema(fact=fact, measures=measures, dependencies=tuple(unique))


def expected_node_count(rel: RelationalSchema, cfg: DraftConfig) -> int:
    """Independent node-count formula for a derived draft: one fact, one
    node per measure, one key node plus one node per non-key non-FK column
    for every reached non-fact table, and one dimension node per non-FK
    key part of the fact table."""
    fact_table = rel.table(cfg.fact_table)
    reached: set[str] = set()
    queue = deque(fk.target_table for fk in fact_table.foreign_keys)
    while queue:
        name = queue.popleft()
        if name in reached:
            continue
        reached.add(name)
        queue.extend(fk.target_table for fk in rel.table(name).foreign_keys)

    count = 1  # the fact
    if cfg.measure_columns is not None:
        count += len(cfg.measure_columns)
    else:
        pk = set(fact_table.primary_key)
        count += sum(
            1
            for c in fact_table.columns
            if c.is_numeric and c.name not in pk and c.name not in fact_table.fk_columns
        )
    count += sum(1 for c in fact_table.primary_key if c not in fact_table.fk_columns)
    for name in reached:
        t = rel.table(name)
        non_key = [
            c
            for c in t.columns
            if c.name not in set(t.primary_key) and c.name not in t.fk_columns
        ]
        count += 1 + len(non_key)
    return count
