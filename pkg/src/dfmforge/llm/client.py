"""Chat-completion clients: HTTP backend, recorder, and replayer.

The record/replay pair makes every LLM-dependent path testable and
deterministic: record mode wraps a live client and persists each exchange
as one JSON line; replay mode serves responses keyed by a hash of the
outbound messages and config.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

API_KEY_ENV = "DFMFORGE_LLM_KEY"

Message = dict[str, str]  # {"role": ..., "content": ...}


@dataclass(frozen=True)
class ClientConfig:
    model: str = "gpt-4o"
    temperature: float = 0.0
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    timeout: float = 120.0


class ClientError(Exception):
    pass


class ReplayMissError(ClientError):
    pass


class ChatClient(Protocol):
    def send(self, messages: list[Message], config: ClientConfig) -> str: ...


def exchange_key(messages: list[Message], config: ClientConfig) -> str:
    payload = json.dumps(
        {"messages": messages, "model": config.model, "temperature": config.temperature},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class HttpChatClient:
    """Standard messages-array chat-completion backend. The API key is
    read from the DFMFORGE_LLM_KEY environment variable."""

    def send(self, messages: list[Message], config: ClientConfig) -> str:
        key = os.environ.get(API_KEY_ENV)
        if not key:
            raise ClientError(f"environment variable {API_KEY_ENV} is not set")
        body = {
            "model": config.model,
            "temperature": config.temperature,
            "messages": messages,
        }
        try:
            response = httpx.post(
                config.endpoint,
                json=body,
                headers={"Authorization": f"Bearer {key}"},
                timeout=config.timeout,
            )
            response.raise_for_status()
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise ClientError(f"chat backend failure: {exc}") from exc
        except (KeyError, IndexError, ValueError) as exc:
            raise ClientError(f"malformed chat backend response: {exc}") from exc


class ScriptedClient:
    """Computes responses with a plain function; used to author golden
    transcripts and in tests."""

    def __init__(self, fn: Callable[[list[Message], ClientConfig], str]):
        self._fn = fn

    def send(self, messages: list[Message], config: ClientConfig) -> str:
        return self._fn(messages, config)


class RecordingClient:
    """Wraps another client and appends every exchange to a JSONL file."""

    def __init__(self, inner: ChatClient, path: str | Path):
        self.inner = inner
        self.path = Path(path)

    def send(self, messages: list[Message], config: ClientConfig) -> str:
        response = self.inner.send(messages, config)
        record = {
            "key": exchange_key(messages, config),
            "model": config.model,
            "temperature": config.temperature,
            "messages": messages,
            "response": response,
        }
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response


class ReplayClient:
    """Serves recorded responses; any unrecorded prompt is a hard miss."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._responses: dict[str, str] = {}
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                self._responses[record["key"]] = record["response"]

    def send(self, messages: list[Message], config: ClientConfig) -> str:
        key = exchange_key(messages, config)
        try:
            return self._responses[key]
        except KeyError:
            raise ReplayMissError(
                f"no recorded response for message hash {key[:12]}…"
            ) from None
