"""Pull a DFM schema out of free-form chat output.

Models are asked to return only YAML, but in practice answers arrive
wrapped in prose or code fences, so extraction tries, in order: every
fenced code block, then the longest region starting at a ``fact:`` line
that parses as a schema document.
"""

from __future__ import annotations

import re
import textwrap

from ..codec import CodecError, parse_yaml
from ..model import DfmSchema

_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n(.*?)```", re.DOTALL)
_FACT_LINE = re.compile(r"^\s*['\"]?fact['\"]?\s*:")


class ExtractionFailure(Exception):
    """No parseable YAML schema found in the response text."""

    def __init__(self, raw_text: str):
        super().__init__("no parseable DFM YAML found in response")
        self.raw_text = raw_text


def _try(chunk: str) -> DfmSchema | None:
    try:
        return parse_yaml(textwrap.dedent(chunk))
    except (CodecError, ValueError):
        return None


def extract_schema(text: str) -> DfmSchema:
    for match in _FENCE.finditer(text):
        schema = _try(match.group(1))
        if schema is not None:
            return schema

    lines = text.splitlines()
    for i, line in enumerate(lines):
        if not _FACT_LINE.match(line):
            continue
        for end in range(len(lines), i, -1):
            schema = _try("\n".join(lines[i:end]))
            if schema is not None:
                return schema
    raise ExtractionFailure(text)
