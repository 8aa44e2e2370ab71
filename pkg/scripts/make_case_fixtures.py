"""Regenerate the committed case fixtures.

Each case draft is derived from an inline relational source, checked
against its intended shape (dims / measures / attributes, shared
hierarchies where applicable), and written to fixtures/cases/. The C2
refined golden is produced by a scripted op sequence over the C2 draft.
"""

from pathlib import Path

from dfmforge.codec import serialize_yaml
from dfmforge.draft import DraftConfig, derive_draft
from dfmforge.model import Additivity, shared_hierarchy_entries, validate
from dfmforge.refine import (
    complete_time_hierarchy,
    mark_descriptive,
    mark_optional,
    remove_attribute,
    rename,
    set_additivity,
)
from dfmforge.relational import load_relational, schema_from_dict

ROOT = Path(__file__).resolve().parent.parent
CASES = ROOT / "fixtures" / "cases"


def t(name, columns, pk, fks=()):
    return {
        "name": name,
        "columns": [
            {"name": c[0], "is_numeric": len(c) > 1} if isinstance(c, tuple) else {"name": c}
            for c in columns
        ],
        "primary_key": list(pk),
        "foreign_keys": [{"columns": list(c), "target_table": tt} for c, tt in fks],
    }


def c1_source():
    return schema_from_dict(
        {
            "tables": [
                t(
                    "COMPLAINTS",
                    ["date", "customer", "channel"],
                    ["date", "customer", "channel"],
                    [((["customer"]), "CUSTOMER"), ((["channel"]), "CHANNEL")],
                ),
                t("CUSTOMER", ["id", "name", "type", "city"], ["id"], [((["city"]), "CITY")]),
                t("CITY", ["id", "name", "region"], ["id"], [((["region"]), "REGION")]),
                t("REGION", ["id"], ["id"]),
                t("CHANNEL", ["id", "name", "type"], ["id"]),
            ]
        }
    )


def c3_source():
    return schema_from_dict(
        {
            "tables": [
                t(
                    "EXERCISES",
                    [
                        "workoutDate",
                        "workoutTime",
                        "athlete",
                        ("reps", 1),
                        ("sets", 1),
                        ("weight", 1),
                    ],
                    ["workoutDate", "workoutTime", "athlete"],
                    [
                        ((["workoutDate", "workoutTime"]), "WORKOUTS"),
                        ((["athlete"]), "ATHLETE"),
                    ],
                ),
                t(
                    "WORKOUTS",
                    ["date", "time", "type", "duration", "intensity"],
                    ["date", "time"],
                ),
                t(
                    "ATHLETE",
                    ["id", "name", "birthDate", "gender", "weightClass", "team"],
                    ["id"],
                    [((["team"]), "TEAM")],
                ),
                t("TEAM", ["id", "name", "coach", "division"], ["id"]),
            ]
        }
    )


def c4_source():
    return schema_from_dict(
        {
            "tables": [
                t(
                    "ORDERS",
                    [
                        "date",
                        "customer",
                        "warehouse",
                        ("amount", 1),
                        ("quantity", 1),
                        ("discount", 1),
                        ("freight", 1),
                    ],
                    ["date", "customer", "warehouse"],
                    [((["customer"]), "CUSTOMER"), ((["warehouse"]), "WAREHOUSE")],
                ),
                t(
                    "CUSTOMER",
                    ["id", "name", "segment", "email", "phone", "city"],
                    ["id"],
                    [((["city"]), "CITY")],
                ),
                t(
                    "WAREHOUSE",
                    ["id", "name", ("capacity", 1), "openingYear", "city"],
                    ["id"],
                    [((["city"]), "CITY")],
                ),
                t(
                    "CITY",
                    ["id", "name", ("population", 1), "region"],
                    ["id"],
                    [((["region"]), "REGION")],
                ),
                t("REGION", ["id", "name", "state"], ["id"]),
            ]
        }
    )


def c5_source():
    return schema_from_dict(
        {
            "tables": [
                t(
                    "SALES",
                    [
                        "date",
                        "product",
                        "store",
                        "customer",
                        "promotion",
                        ("amount", 1),
                        ("quantity", 1),
                        ("discount", 1),
                        ("cost", 1),
                        ("margin", 1),
                    ],
                    ["date", "product", "store", "customer", "promotion"],
                    [
                        ((["product"]), "PRODUCT"),
                        ((["store"]), "STORE"),
                        ((["customer"]), "CUSTOMER"),
                        ((["promotion"]), "PROMOTION"),
                    ],
                ),
                t(
                    "PRODUCT",
                    ["id", "name", "brand", "size", ("weight", 1), "color", "category"],
                    ["id"],
                    [((["category"]), "CATEGORY")],
                ),
                t("CATEGORY", ["id", "name", "department"], ["id"]),
                t(
                    "STORE",
                    ["id", "name", "format", "openDate", "phone", "city"],
                    ["id"],
                    [((["city"]), "CITY")],
                ),
                t(
                    "CUSTOMER",
                    ["id", "name", "gender", "birthDate", "email", "segment", "city"],
                    ["id"],
                    [((["city"]), "CITY")],
                ),
                t(
                    "CITY",
                    ["id", "name", ("population", 1), "region"],
                    ["id"],
                    [((["region"]), "REGION")],
                ),
                t("REGION", ["id", "name", "state", "country"], ["id"]),
                t(
                    "PROMOTION",
                    ["id", "name", "type", "startDate", "endDate", ("budget", 1)],
                    ["id"],
                ),
            ]
        }
    )


SHAPES = {
    # case: (dims, measures, attrs, shared hierarchies expected)
    "c1": (3, 0, 10, False),
    "c2": (3, 3, 12, False),
    "c3": (2, 3, 13, False),
    "c4": (3, 4, 16, True),
    "c5": (5, 5, 34, True),
}


RENAMES = {
        "PURCHASES.date": "Date",
        "PRODUCT.id": "Product",
        "PRODUCT.name": "ProductName",
        "CATEGORY.id": "Category",
        "CATEGORY.name": "CategoryName",
        "STORE.id": "StoreId",
        "STORE.name": "StoreName",
        "CITY.id": "City",
        "CITY.name": "CityName",
        "REGION.id": "Region",
        "REGION.name": "RegionName",
        "REGION.state": "State",
        "PURCHASES.amount": "Amount",
        "PURCHASES.quantity": "Quantity",
    "PURCHASES.unitPrice": "UnitPrice",
}


def c2_renamed(draft):
    s = draft
    for old, new in RENAMES.items():
        s = rename(s, old, new)
    return s


def c2_refined(draft):
    s = c2_renamed(draft)
    s = set_additivity(s, "UnitPrice", Additivity.NON_ADDITIVE)
    for attr in ("ProductName", "CategoryName", "StoreName", "CityName", "RegionName"):
        s = mark_descriptive(s, attr)
    s = mark_optional(s, "State")
    s = complete_time_hierarchy(s, "Date")
    s = remove_attribute(s, "StoreId")
    return s


def main():
    drafts = {}
    for case, source in (
        ("c1", (c1_source(), "COMPLAINTS")),
        ("c2", None),
        ("c3", (c3_source(), "EXERCISES")),
        ("c4", (c4_source(), "ORDERS")),
        ("c5", (c5_source(), "SALES")),
    ):
        if case == "c2":
            rel = load_relational(
                (ROOT / "fixtures" / "relational" / "purchases.json").read_text()
            )
            draft = derive_draft(rel, DraftConfig("PURCHASES"))
        else:
            rel, fact = source
            draft = derive_draft(rel, DraftConfig(fact))
        dims, measures, attrs, shared = SHAPES[case]
        assert len(draft.dimensions()) == dims, (case, sorted(draft.dimensions()))
        assert len(draft.measures) == measures, (case, draft.measure_names)
        assert len(draft.attributes) == attrs, (case, len(draft.attributes))
        assert bool(shared_hierarchy_entries(draft)) == shared, case
        assert validate(draft).ok, (case, validate(draft).to_dict())
        drafts[case] = draft
        (CASES / f"{case}_draft.yaml").write_text(serialize_yaml(draft), encoding="utf-8")

    renamed = c2_renamed(drafts["c2"])
    assert validate(renamed).ok, validate(renamed).to_dict()
    (CASES / "c2_renamed.yaml").write_text(serialize_yaml(renamed), encoding="utf-8")
    refined = c2_refined(drafts["c2"])
    assert validate(refined).ok, validate(refined).to_dict()
    (CASES / "c2_refined.yaml").write_text(serialize_yaml(refined), encoding="utf-8")
    print("wrote", sorted(p.name for p in CASES.glob("*.yaml")))


if __name__ == "__main__":
    main()
