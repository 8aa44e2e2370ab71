"""Record the golden replay transcripts used by the deterministic tests.

Two transcripts are produced under fixtures/transcripts/:

- c2_pipeline.jsonl: the full six-step pipeline over the C2 draft; each
  scripted answer is the next intermediate schema wrapped in a fenced
  block with some surrounding prose, and the final answer equals the
  committed c2_refined.yaml.
- c2_fix.jsonl: a rename answer that forgot one arc, followed by the
  "Some arcs are missing, please try again." fix-up that restores it.
"""

from pathlib import Path

from dfmforge.codec import parse_yaml, serialize_yaml
from dfmforge.llm.client import ClientConfig, RecordingClient, ScriptedClient
from dfmforge.llm.prompts import build_bundle
from dfmforge.llm.session import (
    ChatSession,
    RefinementStep,
    iterate_fix,
    run_pipeline,
    run_step,
)
from dfmforge.model import Dependency, DfmSchema

ROOT = Path(__file__).resolve().parent.parent
CASES = ROOT / "fixtures" / "cases"
TRANSCRIPTS = ROOT / "fixtures" / "transcripts"

OPTIONAL_STATEMENT = "Not all regions have a state."
REMOVAL_STATEMENT = "StoreId is not interesting to me."
FIX_ARCS = "Some arcs are missing, please try again."


def snapshots():
    """The intermediate schema after each of the six steps, derived from
    the committed draft and refined fixtures."""
    import dfmforge.refine as rf
    from dfmforge.model import Additivity

    draft = parse_yaml((CASES / "c2_draft.yaml").read_text(encoding="utf-8"))
    renames = {
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
    s = draft
    for old, new in renames.items():
        s = rf.rename(s, old, new)
    s1 = s
    s2 = rf.set_additivity(s1, "UnitPrice", Additivity.NON_ADDITIVE)
    s3 = s2
    for attr in ("ProductName", "CategoryName", "StoreName", "CityName", "RegionName"):
        s3 = rf.mark_descriptive(s3, attr)
    s4 = rf.mark_optional(s3, "State")
    s5 = rf.complete_time_hierarchy(s4, "Date")
    s6 = rf.remove_attribute(s5, "StoreId")
    refined = parse_yaml((CASES / "c2_refined.yaml").read_text(encoding="utf-8"))
    assert s6 == refined, "scripted pipeline must land on the committed refined fixture"
    return [s1, s2, s3, s4, s5, s6]


def pipeline_answers(steps):
    prose = [
        "Here is the schema with more intuitive names:",
        "I labeled the measures by additivity:",
        "I marked the purely descriptive attributes:",
        "Understood, State is optional:",
        "I completed the time hierarchy:",
        "I removed StoreId and promoted its children:",
    ]
    return [
        f"{blurb}\n```yaml\n{serialize_yaml(schema)}```\nLet me know if this works."
        for blurb, schema in zip(prose, steps)
    ]


def record_pipeline(path: Path):
    answers = pipeline_answers(snapshots())
    calls = iter(answers)
    scripted = ScriptedClient(lambda messages, config: next(calls))
    path.unlink(missing_ok=True)
    client = RecordingClient(scripted, path)
    draft = parse_yaml((CASES / "c2_draft.yaml").read_text(encoding="utf-8"))
    result = run_pipeline(
        draft,
        build_bundle("improved"),
        {
            RefinementStep.OPTIONAL: OPTIONAL_STATEMENT,
            RefinementStep.REMOVAL: REMOVAL_STATEMENT,
        },
        client,
        ClientConfig(),
    )
    refined = parse_yaml((CASES / "c2_refined.yaml").read_text(encoding="utf-8"))
    assert result.final_schema == refined
    assert not result.skipped_steps


def record_fix(path: Path):
    [s1, *_] = snapshots()
    missing = DfmSchema(
        s1.fact,
        s1.measures,
        tuple(d for d in s1.dependencies if (d.source, d.target) != ("Region", "State")),
        s1.descriptive,
        s1.optional,
    )
    answers = iter(
        [
            "```yaml\n" + serialize_yaml(missing) + "```",
            "You are right, I dropped an arc. Here is the corrected schema:\n"
            "```yaml\n" + serialize_yaml(s1) + "```",
        ]
    )
    scripted = ScriptedClient(lambda messages, config: next(answers))
    path.unlink(missing_ok=True)
    client = RecordingClient(scripted, path)
    session = ChatSession(bundle=build_bundle("improved"), client=client)
    draft = parse_yaml((CASES / "c2_draft.yaml").read_text(encoding="utf-8"))
    first = run_step(session, RefinementStep.RENAME, draft)
    assert first == missing
    fixed = iterate_fix(session, FIX_ARCS)
    assert fixed == s1


def main():
    TRANSCRIPTS.mkdir(parents=True, exist_ok=True)
    record_pipeline(TRANSCRIPTS / "c2_pipeline.jsonl")
    record_fix(TRANSCRIPTS / "c2_fix.jsonl")
    print("wrote", sorted(p.name for p in TRANSCRIPTS.glob("*.jsonl")))


if __name__ == "__main__":
    main()
