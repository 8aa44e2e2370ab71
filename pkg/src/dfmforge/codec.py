"""YAML codec for the DFM dialect, plus a mirroring JSON form.

Tag set: fact/name, measures[].name, dependencies[].from/to/role,
descriptive[], optional[]. Parsing is deliberately lenient (it must load
malformed model output so the evaluator can score it); structural checks
live in :func:`dfmforge.model.validate`.

Serialization is deterministic: tags in a fixed order, dependencies sorted
by (from, to, role), marks sorted by name. Measure names carry their
additivity suffix both under ``measures`` and in ``dependencies`` entries.
"""

from __future__ import annotations

import json
from typing import Any, Optional

import yaml

from .model import (
    Additivity,
    Dependency,
    DfmSchema,
    Measure,
    split_additivity_suffix,
)


class CodecError(Exception):
    """Base class for parse errors."""

    code = "CodecError"


class YamlSyntaxError(CodecError):
    code = "YamlSyntax"


class MissingTagError(CodecError):
    code = "MissingTag"

    def __init__(self, tag: str):
        super().__init__(f"missing required tag: {tag}")
        self.tag = tag


class UnknownTagError(CodecError):
    code = "UnknownTag"

    def __init__(self, tag: str):
        super().__init__(f"unknown tag: {tag}")
        self.tag = tag


class NonScalarNameError(CodecError):
    code = "NonScalarName"

    def __init__(self, context: str, value: Any):
        super().__init__(f"{context}: expected a non-empty scalar name, got {value!r}")


_KNOWN_TOP_TAGS = {"fact", "measures", "dependencies", "descriptive", "optional"}


def _scalar_name(value: Any, context: str) -> str:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = str(value)
    if not isinstance(value, str) or not value.strip():
        raise NonScalarNameError(context, value)
    return value


def _name_of(item: Any, context: str) -> str:
    """Accept both `- name: X` items and bare `- X` scalars."""
    if isinstance(item, dict):
        if "name" not in item or item["name"] is None:
            raise MissingTagError(f"{context}.name")
        return _scalar_name(item["name"], context)
    return _scalar_name(item, context)


def parse_yaml(text: str, strict: bool = False) -> DfmSchema:
    """Parse one YAML document into a DfmSchema.

    Measure-name suffixes `` (AVG)`` / `` (SUM-AVG)`` are folded into the
    measure's additivity; dependency endpoints are stored exactly as
    written (so suffix mismatches survive as fake nodes for validate to
    flag).
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise YamlSyntaxError(str(exc)) from exc
    if not isinstance(data, dict):
        raise YamlSyntaxError("top level of a DFM document must be a mapping")

    if strict:
        for tag in data:
            if tag not in _KNOWN_TOP_TAGS:
                raise UnknownTagError(str(tag))

    if "fact" not in data or data["fact"] is None:
        raise MissingTagError("fact")
    fact_entry = data["fact"]
    if isinstance(fact_entry, dict):
        if "name" not in fact_entry or fact_entry["name"] is None:
            raise MissingTagError("fact.name")
        fact = _scalar_name(fact_entry["name"], "fact")
    else:
        fact = _scalar_name(fact_entry, "fact")

    measures: list[Measure] = []
    for item in data.get("measures") or []:
        rendered = _name_of(item, "measures")
        base, additivity = split_additivity_suffix(rendered)
        measures.append(Measure(base, additivity))

    dependencies: list[Dependency] = []
    for item in data.get("dependencies") or []:
        if not isinstance(item, dict):
            raise NonScalarNameError("dependencies", item)
        if "from" not in item or item["from"] is None:
            raise MissingTagError("dependencies.from")
        if "to" not in item or item["to"] is None:
            raise MissingTagError("dependencies.to")
        role = item.get("role")
        if role is not None:
            role = _scalar_name(role, "dependencies.role")
        dependencies.append(
            Dependency(
                _scalar_name(item["from"], "dependencies.from"),
                _scalar_name(item["to"], "dependencies.to"),
                role,
            )
        )

    descriptive = [_name_of(item, "descriptive") for item in data.get("descriptive") or []]
    optional = [_name_of(item, "optional") for item in data.get("optional") or []]

    return DfmSchema(
        fact=fact,
        measures=tuple(measures),
        dependencies=tuple(dependencies),
        descriptive=frozenset(descriptive),
        optional=frozenset(optional),
    )


def to_dict(schema: DfmSchema) -> dict:
    """Deterministic tag-ordered plain-dict form (shared by YAML and JSON)."""
    doc: dict[str, Any] = {"fact": {"name": schema.fact}}
    doc["measures"] = [{"name": m.rendered_name} for m in schema.measures]
    deps = sorted(schema.dependencies, key=lambda d: (d.source, d.target, d.role or ""))
    dep_items = []
    for d in deps:
        item: dict[str, str] = {"from": d.source, "to": d.target}
        if d.role is not None:
            item["role"] = d.role
        dep_items.append(item)
    doc["dependencies"] = dep_items
    if schema.descriptive:
        doc["descriptive"] = sorted(schema.descriptive)
    if schema.optional:
        doc["optional"] = sorted(schema.optional)
    return doc


def serialize_yaml(schema: DfmSchema) -> str:
    return yaml.safe_dump(
        to_dict(schema), sort_keys=False, default_flow_style=False, allow_unicode=True
    )


def to_json(schema: DfmSchema, indent: Optional[int] = None) -> str:
    return json.dumps(to_dict(schema), indent=indent)


def from_dict(data: dict) -> DfmSchema:
    """Inverse of :func:`to_dict`; also accepts the JSON body shape used
    by the HTTP service."""
    return parse_yaml(yaml.safe_dump(data, sort_keys=False))


def from_json(text: str) -> DfmSchema:
    return from_dict(json.loads(text))
