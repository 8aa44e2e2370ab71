import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfmforge.codec import serialize_yaml
from dfmforge.draft import (
    CyclicForeignKeysError,
    DraftConfig,
    UnknownFactTableError,
    derive_draft,
    expected_node_count,
    key_node,
)
from dfmforge.model import validate
from dfmforge.relational import (
    BrokenForeignKeyError,
    Column,
    EmptySchemaError,
    ForeignKey,
    RelationalError,
    RelationalSchema,
    Table,
    load_relational,
    schema_from_dict,
    schema_to_dict,
)

from conftest import FIXTURES, load_case
from genutil import random_relational


def purchases():
    return load_relational(
        (FIXTURES / "relational" / "purchases.json").read_text(encoding="utf-8")
    )


def test_purchases_draft_matches_golden_bytes():
    s = derive_draft(purchases(), DraftConfig("PURCHASES"))
    assert serialize_yaml(s) == load_case("purchases_draft.yaml")


def test_purchases_draft_shape():
    s = derive_draft(purchases(), DraftConfig("PURCHASES"))
    assert len(s.measures) == 3
    assert len(s.dimensions()) == 3
    assert len(s.attributes) == 12
    assert s.dimensions() == frozenset({"PURCHASES.date", "PRODUCT.id", "STORE.id"})
    assert validate(s).ok


def test_fk_columns_are_not_nodes():
    s = derive_draft(purchases(), DraftConfig("PURCHASES"))
    for banned in ("PURCHASES.product", "PURCHASES.store", "PRODUCT.category"):
        assert banned not in s.nodes


def test_explicit_measure_columns_override():
    s = derive_draft(
        purchases(), DraftConfig("PURCHASES", measure_columns=("amount",))
    )
    assert s.measure_names == frozenset({"PURCHASES.amount"})
    # the other numeric columns are simply dropped, not turned into attrs
    assert "PURCHASES.quantity" not in s.nodes
    with pytest.raises(KeyError):
        derive_draft(purchases(), DraftConfig("PURCHASES", measure_columns=("nope",)))


def test_composite_key_becomes_single_comma_node():
    rel = RelationalSchema(
        (
            Table(
                "WORKOUTS",
                (Column("date"), Column("time"), Column("reps", is_numeric=True)),
                ("date", "time"),
            ),
        )
    )
    s = derive_draft(rel, DraftConfig("WORKOUTS"))
    assert "WORKOUTS.date" in s.nodes and "WORKOUTS.time" in s.nodes
    # composite keys collapse into one node only for *referenced* tables
    rel2 = RelationalSchema(
        (
            Table(
                "VISITS",
                (Column("id"), Column("w1"), Column("w2")),
                ("id",),
                (ForeignKey(("w1", "w2"), "WORKOUTS"),),
            ),
            rel.tables[0],
        )
    )
    s2 = derive_draft(rel2, DraftConfig("VISITS"))
    assert "WORKOUTS.date,WORKOUTS.time" in s2.nodes
    assert key_node(rel.tables[0]) == "WORKOUTS.date,WORKOUTS.time"
    assert validate(s2).ok


def test_two_fks_to_same_table_collapse():
    rel = RelationalSchema(
        (
            Table(
                "RENTALS",
                (Column("id"), Column("pick"), Column("drop")),
                ("id",),
                (
                    ForeignKey(("pick",), "DATE"),
                    ForeignKey(("drop",), "DATE"),
                ),
            ),
            Table("DATE", (Column("id"),), ("id",)),
        )
    )
    s = derive_draft(rel, DraftConfig("RENTALS"))
    arcs = [d for d in s.dependencies if d.target == "DATE.id"]
    assert len(arcs) == 1  # the draft carries no roles, identical arcs collapse


def test_cyclic_foreign_keys_rejected():
    rel = RelationalSchema(
        (
            Table("A", (Column("id"), Column("b")), ("id",), (ForeignKey(("b",), "B"),)),
            Table("B", (Column("id"), Column("a")), ("id",), (ForeignKey(("a",), "A"),)),
        )
    )
    with pytest.raises(CyclicForeignKeysError) as err:
        derive_draft(rel, DraftConfig("A"))
    assert "->" in str(err.value)


def test_cycle_outside_reach_is_fine():
    rel = RelationalSchema(
        (
            Table("FACT", (Column("id"),), ("id",)),
            Table("A", (Column("id"), Column("b")), ("id",), (ForeignKey(("b",), "B"),)),
            Table("B", (Column("id"), Column("a")), ("id",), (ForeignKey(("a",), "A"),)),
        )
    )
    s = derive_draft(rel, DraftConfig("FACT"))
    assert s.nodes == frozenset({"FACT", "FACT.id"})


def test_unknown_fact_table():
    with pytest.raises(UnknownFactTableError):
        derive_draft(purchases(), DraftConfig("NOPE"))


def test_relational_loader_errors():
    with pytest.raises(EmptySchemaError):
        load_relational("tables: []")
    with pytest.raises(RelationalError):
        load_relational("- not\n- a mapping")
    with pytest.raises(BrokenForeignKeyError):
        schema_from_dict(
            {
                "tables": [
                    {
                        "name": "T",
                        "columns": ["id", "x"],
                        "primary_key": ["id"],
                        "foreign_keys": [{"columns": ["x"], "target_table": "GONE"}],
                    }
                ]
            }
        )
    with pytest.raises(RelationalError):
        schema_from_dict({"tables": [{"name": "T", "columns": ["id"], "primary_key": []}]})


def test_relational_dict_roundtrip():
    rel = purchases()
    assert schema_from_dict(schema_to_dict(rel)) == rel
    # JSON text is valid YAML, one loader covers both
    assert load_relational(json.dumps(schema_to_dict(rel))) == rel


def test_draft_deterministic():
    a = derive_draft(purchases(), DraftConfig("PURCHASES"))
    b = derive_draft(purchases(), DraftConfig("PURCHASES"))
    assert serialize_yaml(a) == serialize_yaml(b)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_relational_drafts_valid_with_node_count_oracle(seed):
    rng = random.Random(seed)
    rel, fact = random_relational(rng, max_tables=12)
    cfg = DraftConfig(fact)
    s = derive_draft(rel, cfg)
    assert validate(s).ok, validate(s).to_dict()
    assert len(s.nodes) == expected_node_count(rel, cfg)
