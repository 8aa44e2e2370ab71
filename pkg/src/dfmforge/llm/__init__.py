from .client import (
    API_KEY_ENV,
    ChatClient,
    ClientConfig,
    ClientError,
    HttpChatClient,
    RecordingClient,
    ReplayClient,
    ReplayMissError,
    ScriptedClient,
    exchange_key,
)
from .extract import ExtractionFailure, extract_schema
from .prompts import PromptBundle, PromptExample, build_bundle, investigation_prompts
from .session import (
    PIPELINE_ORDER,
    STEP_TASKS,
    ChatSession,
    PipelineResult,
    RefinementStep,
    SessionError,
    Turn,
    case_prompt,
    iterate_fix,
    run_pipeline,
    run_step,
)

__all__ = [
    "API_KEY_ENV",
    "ChatClient",
    "ClientConfig",
    "ClientError",
    "HttpChatClient",
    "RecordingClient",
    "ReplayClient",
    "ReplayMissError",
    "ScriptedClient",
    "exchange_key",
    "ExtractionFailure",
    "extract_schema",
    "PromptBundle",
    "PromptExample",
    "build_bundle",
    "investigation_prompts",
    "PIPELINE_ORDER",
    "STEP_TASKS",
    "ChatSession",
    "PipelineResult",
    "RefinementStep",
    "SessionError",
    "Turn",
    "case_prompt",
    "iterate_fix",
    "run_pipeline",
    "run_step",
]
