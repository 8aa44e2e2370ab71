"""Default prompt texts and bundle construction.

The texts ship as editable data files under dfmforge/prompts/. The basic
bundle is ROLE+FORMAT+TASK; the improved bundle adds a per-step PROCEDURE
and two worked examples, the first structured as a chain of thought
(per-step partial results with explanations), the second output-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from ..codec import parse_yaml
from ..model import DfmSchema


def _read(name: str) -> str:
    return resources.files("dfmforge.prompts").joinpath(name).read_text(encoding="utf-8")


def role_text() -> str:
    return _read("role.txt").strip()


def format_text() -> str:
    return _read("format.txt").strip()


def task_text() -> str:
    return _read("task.txt").strip()


def procedure_text() -> str:
    return _read("procedure.txt").strip()


def investigation_prompts() -> list[str]:
    return [line for line in _read("investigation.txt").splitlines() if line.strip()]


@dataclass(frozen=True)
class PromptExample:
    input_schema: DfmSchema
    output_schema: DfmSchema
    reasoning_steps: Optional[str] = None


@dataclass(frozen=True)
class PromptBundle:
    role_text: str
    format_text: str
    task_text: str
    procedure_text: Optional[str] = None
    examples: tuple[PromptExample, ...] = ()

    def __post_init__(self) -> None:
        for label, text in (
            ("role", self.role_text),
            ("format", self.format_text),
            ("task", self.task_text),
        ):
            if not text or not text.strip():
                raise ValueError(f"{label} text must be non-empty")
        object.__setattr__(self, "examples", tuple(self.examples))


def _load_example(stem: str, with_steps: bool) -> PromptExample:
    return PromptExample(
        input_schema=parse_yaml(_read(f"{stem}_input.yaml")),
        output_schema=parse_yaml(_read(f"{stem}_output.yaml")),
        reasoning_steps=_read(f"{stem}_steps.txt").strip() if with_steps else None,
    )


def build_bundle(mode: str = "basic", overrides: Optional[dict] = None) -> PromptBundle:
    """mode='basic': ROLE+FORMAT+TASK only. mode='improved': adds the
    PROCEDURE component and two examples (the first chain-of-thought)."""
    overrides = overrides or {}
    kwargs: dict = {
        "role_text": overrides.get("role_text", role_text()),
        "format_text": overrides.get("format_text", format_text()),
        "task_text": overrides.get("task_text", task_text()),
    }
    if mode == "basic":
        pass
    elif mode == "improved":
        kwargs["procedure_text"] = overrides.get("procedure_text", procedure_text())
        kwargs["examples"] = overrides.get(
            "examples",
            (
                _load_example("example1", with_steps=True),
                _load_example("example2", with_steps=False),
            ),
        )
    else:
        raise ValueError(f"unknown bundle mode {mode!r}")
    return PromptBundle(**kwargs)
