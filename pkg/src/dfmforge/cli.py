"""Command-line entry point.

Exit-code convention: 0 success, 1 data errors (validation findings, diff
discrepancies, refinement failures), 2 usage or IO errors. The diff
command's exit code is its error total capped at 125 so scripts can read
small totals directly.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import yaml

from .codec import CodecError, parse_yaml, serialize_yaml, to_dict, to_json
from .diffeval import GroundTruthSet, MatchConfig, NameNorm, diff as diff_schemas, report_render
from .draft import DraftConfig, DraftError, derive_draft
from .llm.client import ClientConfig, HttpChatClient, RecordingClient, ReplayClient
from .llm.extract import ExtractionFailure
from .llm.prompts import build_bundle
from .llm.session import ChatSession, RefinementStep, iterate_fix, run_pipeline, run_step
from .model import validate
from .refine import ApplyError, RefinementOp, apply_ops
from .relational import RelationalError, load_relational
from .render import to_dot
from .service import create_app


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def _parse_schema(path: str):
    try:
        return parse_yaml(_read_file(path))
    except CodecError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        sys.exit(1)


def _emit_schema(schema, fmt: str) -> None:
    if fmt == "json":
        click.echo(to_json(schema))
    else:
        click.echo(serialize_yaml(schema), nl=False)


format_option = click.option(
    "--format", "fmt", type=click.Choice(["yaml", "json"]), default="yaml"
)


@click.group()
def main() -> None:
    """Draft, refine, and evaluate DFM schemata."""


@main.command()
@click.argument("path")
@format_option
def parse(path: str, fmt: str) -> None:
    """Parse a schema file leniently and reprint it canonically."""
    _emit_schema(_parse_schema(path), fmt)


@main.command(name="validate")
@click.argument("path")
def validate_cmd(path: str) -> None:
    """Check a schema against the structural invariants."""
    report = validate(_parse_schema(path))
    if report.ok:
        click.echo("ok")
        return
    for v in report.violations:
        click.echo(f"{v.code.value}: {v.subject}: {v.message}")
    sys.exit(1)


@main.command()
@click.argument("rel_path")
@click.argument("fact_table")
@click.option("--measures", default=None, help="comma-separated measure columns")
@format_option
def draft(rel_path: str, fact_table: str, measures: str | None, fmt: str) -> None:
    """Derive a draft schema from a relational source (JSON or YAML)."""
    try:
        rel = load_relational(_read_file(rel_path))
        cfg = DraftConfig(
            fact_table,
            tuple(measures.split(",")) if measures else None,
        )
        schema = derive_draft(rel, cfg)
    except (RelationalError, DraftError, KeyError) as exc:
        code = getattr(exc, "code", type(exc).__name__)
        click.echo(f"{code}: {exc}", err=True)
        sys.exit(1)
    _emit_schema(schema, fmt)


@main.command()
@click.argument("schema_path")
@click.argument("ops_path")
@format_option
def apply(schema_path: str, ops_path: str, fmt: str) -> None:
    """Apply a JSON/YAML list of refinement ops to a schema."""
    schema = _parse_schema(schema_path)
    try:
        raw = yaml.safe_load(_read_file(ops_path))
        ops = [RefinementOp.from_dict(op) for op in raw]
    except (yaml.YAMLError, KeyError, ValueError, TypeError) as exc:
        click.echo(f"bad ops file: {exc}", err=True)
        sys.exit(1)
    try:
        result, _log = apply_ops(schema, ops)
    except ApplyError as exc:
        click.echo(f"step {exc.step}: {exc.cause.code}: {exc.cause}", err=True)
        sys.exit(1)
    _emit_schema(result, fmt)


def _client(replay: str | None, record: str | None):
    if replay:
        return ReplayClient(replay)
    client = HttpChatClient()
    if record:
        return RecordingClient(client, record)
    return client


@main.command(name="refine-llm")
@click.argument("schema_path")
@click.option("--mode", type=click.Choice(["basic", "improved"]), default="improved")
@click.option("--replay", default=None, help="replay transcript instead of a live backend")
@click.option("--record", default=None, help="record exchanges to this JSONL file")
@click.option("--optional-statement", default=None)
@click.option("--removal-statement", default=None)
@click.option("--transcript", default=None, help="save the session transcript here")
@format_option
def refine_llm(
    schema_path: str,
    mode: str,
    replay: str | None,
    record: str | None,
    optional_statement: str | None,
    removal_statement: str | None,
    transcript: str | None,
    fmt: str,
) -> None:
    """Run the six-step refinement pipeline over a draft schema."""
    schema = _parse_schema(schema_path)
    statements = {}
    if optional_statement:
        statements[RefinementStep.OPTIONAL] = optional_statement
    if removal_statement:
        statements[RefinementStep.REMOVAL] = removal_statement
    result = run_pipeline(
        schema, build_bundle(mode), statements, _client(replay, record), ClientConfig()
    )
    if transcript:
        result.session.save_transcript(transcript)
    if result.skipped_steps:
        skipped = ", ".join(s.value for s in result.skipped_steps)
        click.echo(f"skipped steps: {skipped}", err=True)
    _emit_schema(result.final_schema, fmt)


@main.command()
@click.argument("schema_path")
@click.argument("fix_text")
@click.option("--step", "step_name", default="rename", help="step to run before the fix")
@click.option("--statement", default=None, help="end-user statement for the step")
@click.option("--mode", type=click.Choice(["basic", "improved"]), default="improved")
@click.option("--replay", default=None)
@click.option("--record", default=None)
@click.option("--transcript", default=None)
@format_option
def fix(
    schema_path: str,
    fix_text: str,
    step_name: str,
    statement: str | None,
    mode: str,
    replay: str | None,
    record: str | None,
    transcript: str | None,
    fmt: str,
) -> None:
    """Run one refinement step, then send a fix-up prompt in-session."""
    schema = _parse_schema(schema_path)
    try:
        step = RefinementStep(step_name)
    except ValueError:
        click.echo(f"unknown step {step_name!r}", err=True)
        sys.exit(2)
    session = ChatSession(bundle=build_bundle(mode), client=_client(replay, record))
    try:
        run_step(session, step, schema, statement)
        result = iterate_fix(session, fix_text)
    except ExtractionFailure:
        click.echo("extraction failed; raw response kept in transcript", err=True)
        if transcript:
            session.save_transcript(transcript)
        sys.exit(1)
    if transcript:
        session.save_transcript(transcript)
    _emit_schema(result, fmt)


@main.command(name="diff")
@click.argument("candidate_path")
@click.argument("truth_paths", nargs=-1, required=True)
@click.option(
    "--report-format",
    type=click.Choice(["text", "json", "csv"]),
    default="text",
)
@click.option("--exact-names", is_flag=True, help="disable case/symbol-insensitive matching")
def diff_cmd(candidate_path: str, truth_paths: tuple[str, ...], report_format: str, exact_names: bool) -> None:
    """Score a candidate schema against one or more ground truths."""
    candidate = _parse_schema(candidate_path)
    truths = GroundTruthSet(tuple(_parse_schema(p) for p in truth_paths))
    cfg = MatchConfig(
        name_normalization=NameNorm.EXACT if exact_names else NameNorm.CASE_INSENSITIVE_ALNUM
    )
    report = diff_schemas(candidate, truths, cfg)
    click.echo(report_render(report, report_format), nl=False)
    sys.exit(min(report.total, 125))


@main.command()
@click.argument("path")
@click.option("--format", "fmt", type=click.Choice(["dot"]), default="dot")
def render(path: str, fmt: str) -> None:
    """Export a schema for visualization (currently DOT only)."""
    click.echo(to_dot(_parse_schema(path)), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8765, type=click.IntRange(1, 65535))
@click.option("--static-dir", default=None)
@click.option("--replay", default=None, help="serve the LLM endpoints from a replay transcript")
@click.option("--mode", type=click.Choice(["basic", "improved"]), default="improved")
@click.option("--cors", default="*", help="comma-separated CORS origins")
def serve(host: str, port: int, static_dir: str | None, replay: str | None, mode: str, cors: str) -> None:
    """Run the HTTP service (and static UI assets, when built)."""
    import uvicorn

    app = create_app(
        llm_client=ReplayClient(replay) if replay else None,
        bundle_mode=mode,
        static_dir=static_dir,
        cors_origins=tuple(cors.split(",")),
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
