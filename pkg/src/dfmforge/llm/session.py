"""Refinement chat sessions and the six-step pipeline.

One session per test case; sessions never share history. Temperature
defaults to 0. The ROLE text fills the system slot, FORMAT+TASK
(+PROCEDURE) form the first user message, and examples are inlined as
user/assistant turn pairs.
"""

from __future__ import annotations

import enum
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..codec import serialize_yaml
from ..model import DfmSchema
from .client import ChatClient, ClientConfig, Message
from .extract import ExtractionFailure, extract_schema
from .prompts import PromptBundle


class RefinementStep(enum.Enum):
    RENAME = "rename"
    ADDITIVITY = "additivity"
    DESCRIPTIVE = "descriptive"
    OPTIONAL = "optional"
    TIME_HIERARCHY = "time-hierarchy"
    REMOVAL = "removal"


PIPELINE_ORDER = (
    RefinementStep.RENAME,
    RefinementStep.ADDITIVITY,
    RefinementStep.DESCRIPTIVE,
    RefinementStep.OPTIONAL,
    RefinementStep.TIME_HIERARCHY,
    RefinementStep.REMOVAL,
)

# the Optional and Removal tasks are end-user statements supplied per case
STEP_TASKS = {
    RefinementStep.RENAME: "Make names more intuitive for end-users.",
    RefinementStep.ADDITIVITY: "Label measures as either additive, semi-additive, or non-additive.",
    RefinementStep.DESCRIPTIVE: "Either find descriptive attributes or discretize them.",
    RefinementStep.TIME_HIERARCHY: "Complete time hierarchies.",
}

_STATEMENT_STEPS = {RefinementStep.OPTIONAL, RefinementStep.REMOVAL}

YAML_ONLY = "Return only the YAML without any further information/explanation."


class SessionError(Exception):
    pass


@dataclass
class Turn:
    prompt_text: str
    response_text: str
    extracted_schema: Optional[DfmSchema]
    timestamp: float


@dataclass
class ChatSession:
    bundle: PromptBundle
    client: ChatClient
    config: ClientConfig = field(default_factory=ClientConfig)
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex)
    turns: list[Turn] = field(default_factory=list)

    def _base_messages(self) -> list[Message]:
        first_user = self.bundle.format_text + "\n\n" + self.bundle.task_text
        if self.bundle.procedure_text:
            first_user += "\n\n" + self.bundle.procedure_text
        messages: list[Message] = [
            {"role": "system", "content": self.bundle.role_text},
            {"role": "user", "content": first_user},
        ]
        for example in self.bundle.examples:
            messages.append(
                {
                    "role": "user",
                    "content": "Here is a draft DFM schema:\n"
                    + serialize_yaml(example.input_schema)
                    + "Refine it following the task.",
                }
            )
            answer = ""
            if example.reasoning_steps:
                answer = example.reasoning_steps + "\n"
            answer += serialize_yaml(example.output_schema)
            messages.append({"role": "assistant", "content": answer})
        return messages

    def outbound_messages(self, prompt: str) -> list[Message]:
        messages = self._base_messages()
        for turn in self.turns:
            messages.append({"role": "user", "content": turn.prompt_text})
            messages.append({"role": "assistant", "content": turn.response_text})
        messages.append({"role": "user", "content": prompt})
        return messages

    def send(self, prompt: str) -> DfmSchema:
        """Send a prompt, record the turn, and return the extracted
        schema. Raises ExtractionFailure after recording if no YAML can
        be recovered (the raw text stays in the transcript)."""
        response = self.client.send(self.outbound_messages(prompt), self.config)
        try:
            schema: Optional[DfmSchema] = extract_schema(response)
        except ExtractionFailure:
            schema = None
        self.turns.append(Turn(prompt, response, schema, time.time()))
        if schema is None:
            raise ExtractionFailure(response)
        return schema

    # -- transcript -------------------------------------------------------

    def transcript_records(self) -> list[dict]:
        records = []
        index = 0
        for turn in self.turns:
            for role, text in (("user", turn.prompt_text), ("assistant", turn.response_text)):
                records.append(
                    {
                        "session_id": self.session_id,
                        "turn": index,
                        "role": role,
                        "text": text,
                        "model": self.config.model,
                        "temperature": self.config.temperature,
                        "timestamp": turn.timestamp,
                    }
                )
                index += 1
        return records

    def save_transcript(self, path: str | Path) -> None:
        import json

        with Path(path).open("w", encoding="utf-8") as fh:
            for record in self.transcript_records():
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def case_prompt(schema: DfmSchema, task: str, yaml_only: bool = True) -> str:
    prompt = "Here is a draft DFM schema:\n" + serialize_yaml(schema) + task
    if yaml_only:
        prompt += " " + YAML_ONLY
    return prompt


def run_step(
    session: ChatSession,
    step: RefinementStep,
    input_schema: DfmSchema,
    user_statement: Optional[str] = None,
) -> DfmSchema:
    """Run one refinement step: compose the case prompt, send, extract."""
    if step in _STATEMENT_STEPS:
        if not user_statement:
            raise SessionError(f"step {step.value} needs an end-user statement")
        task = user_statement
    else:
        task = STEP_TASKS[step]
    return session.send(case_prompt(input_schema, task))


def iterate_fix(session: ChatSession, fix_text: str) -> DfmSchema:
    """Send a fix-up prompt inside the same session (iteration is
    intra-session, unlike the case isolation across test cases)."""
    if not session.turns:
        raise SessionError("iterate_fix needs at least one prior turn")
    return session.send(fix_text)


@dataclass
class PipelineResult:
    final_schema: DfmSchema
    per_step: list[tuple[RefinementStep, Optional[DfmSchema]]]
    session: ChatSession

    @property
    def skipped_steps(self) -> list[RefinementStep]:
        return [step for step, schema in self.per_step if schema is None]


def run_pipeline(
    draft: DfmSchema,
    bundle: PromptBundle,
    statements: dict[RefinementStep, str],
    client: ChatClient,
    config: Optional[ClientConfig] = None,
) -> PipelineResult:
    """Run the six steps in order, each feeding the next. Steps needing an
    end-user statement are skipped when none is given; extraction failures
    keep the previous snapshot and are recorded as skipped."""
    session = ChatSession(bundle=bundle, client=client, config=config or ClientConfig())
    current = draft
    per_step: list[tuple[RefinementStep, Optional[DfmSchema]]] = []
    for step in PIPELINE_ORDER:
        statement = statements.get(step)
        if step in _STATEMENT_STEPS and not statement:
            per_step.append((step, None))
            continue
        try:
            current = run_step(session, step, current, statement)
            per_step.append((step, current))
        except ExtractionFailure:
            per_step.append((step, None))
    return PipelineResult(final_schema=current, per_step=per_step, session=session)
