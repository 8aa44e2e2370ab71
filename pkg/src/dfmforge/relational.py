"""Relational source schemata: the input to supply-driven derivation.

The file format is JSON or YAML with the same field names:

    tables:
      - name: PURCHASES
        columns:
          - {name: date}
          - {name: product, }
          - {name: amount, is_numeric: true}
        primary_key: [date, product]
        foreign_keys:
          - {columns: [product], target_table: PRODUCT}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import yaml


class RelationalError(Exception):
    code = "RelationalError"


class EmptySchemaError(RelationalError):
    code = "EmptySchema"


class BrokenForeignKeyError(RelationalError):
    code = "BrokenForeignKey"


@dataclass(frozen=True)
class Column:
    name: str
    is_numeric: bool = False


@dataclass(frozen=True)
class ForeignKey:
    columns: tuple[str, ...]
    target_table: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[Column, ...]
    primary_key: tuple[str, ...]
    foreign_keys: tuple[ForeignKey, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "primary_key", tuple(self.primary_key))
        object.__setattr__(self, "foreign_keys", tuple(self.foreign_keys))

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.columns)

    @property
    def fk_columns(self) -> frozenset[str]:
        out: set[str] = set()
        for fk in self.foreign_keys:
            out.update(fk.columns)
        return frozenset(out)


@dataclass(frozen=True)
class RelationalSchema:
    tables: tuple[Table, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tables", tuple(self.tables))
        self._check()

    def _check(self) -> None:
        if not self.tables:
            raise EmptySchemaError("relational schema has no tables")
        by_name = {}
        for t in self.tables:
            if t.name in by_name:
                raise RelationalError(f"duplicate table name {t.name!r}")
            by_name[t.name] = t
        for t in self.tables:
            if not t.primary_key:
                raise RelationalError(f"table {t.name} has an empty primary key")
            names = set(t.column_names)
            for k in t.primary_key:
                if k not in names:
                    raise RelationalError(f"primary key column {t.name}.{k} does not exist")
            for fk in t.foreign_keys:
                target = by_name.get(fk.target_table)
                if target is None:
                    raise BrokenForeignKeyError(
                        f"{t.name}: foreign key targets missing table {fk.target_table!r}"
                    )
                for c in fk.columns:
                    if c not in names:
                        raise BrokenForeignKeyError(
                            f"{t.name}: foreign key column {c!r} does not exist"
                        )
                if len(fk.columns) != len(target.primary_key):
                    raise BrokenForeignKeyError(
                        f"{t.name} -> {fk.target_table}: foreign key arity "
                        f"{len(fk.columns)} != primary key arity {len(target.primary_key)}"
                    )

    def table(self, name: str) -> Table:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)


def _columns_from(data: Sequence[Any], table: str) -> list[Column]:
    out = []
    for item in data:
        if isinstance(item, str):
            out.append(Column(item))
        elif isinstance(item, dict):
            out.append(Column(str(item["name"]), bool(item.get("is_numeric", False))))
        else:
            raise RelationalError(f"table {table}: bad column entry {item!r}")
    return out


def schema_from_dict(data: dict) -> RelationalSchema:
    tables_data = data.get("tables")
    if not tables_data:
        raise EmptySchemaError("relational schema has no tables")
    tables = []
    for t in tables_data:
        fks = tuple(
            ForeignKey(tuple(fk["columns"]), fk["target_table"])
            for fk in t.get("foreign_keys") or []
        )
        tables.append(
            Table(
                name=t["name"],
                columns=tuple(_columns_from(t.get("columns") or [], t["name"])),
                primary_key=tuple(t.get("primary_key") or []),
                foreign_keys=fks,
            )
        )
    return RelationalSchema(tuple(tables))


def load_relational(text: str) -> RelationalSchema:
    """Load a relational schema from JSON or YAML text (JSON being a YAML
    subset, one parser covers both)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise RelationalError(f"unparseable relational schema: {exc}") from exc
    if not isinstance(data, dict):
        raise RelationalError("relational schema must be a mapping with a 'tables' list")
    return schema_from_dict(data)


def schema_to_dict(schema: RelationalSchema) -> dict:
    return {
        "tables": [
            {
                "name": t.name,
                "columns": [
                    {"name": c.name, "is_numeric": c.is_numeric} for c in t.columns
                ],
                "primary_key": list(t.primary_key),
                "foreign_keys": [
                    {"columns": list(fk.columns), "target_table": fk.target_table}
                    for fk in t.foreign_keys
                ],
            }
            for t in schema.tables
        ]
    }
