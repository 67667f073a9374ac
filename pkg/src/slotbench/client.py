"""HTTP client for chat-completions endpoints with tool calling.

Speaks the de-facto chat-completions wire schema: messages in, one
choice out, tool calls under message.tool_calls with JSON-encoded
argument strings. Retries infrastructure failures (connection errors,
HTTP 5xx/429) up to three attempts with exponential backoff; these are
distinct from the simulated in-task tool failures, which arrive as
ordinary tool results and are never retried here.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from typing import Any

import httpx

from .agents import AgentTurn
from .environment import ToolCall, ToolResult
from .errors import EndpointError

_RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    model: str
    api_key_env: str = ""
    temperature: float = 0.0
    max_output_tokens: int = 16384
    timeout: float = 120.0
    max_attempts: int = 3
    backoff_base: float = 0.5


class ChatCompletionsClient:
    """Thread-safe wrapper around one endpoint; shareable across episodes."""

    def __init__(
        self, config: EndpointConfig, transport: httpx.BaseTransport | None = None
    ):
        self._config = config
        headers = {}
        if config.api_key_env:
            key = os.environ.get(config.api_key_env, "")
            if not key:
                raise EndpointError(
                    f"environment variable {config.api_key_env} is empty or unset"
                )
            headers["Authorization"] = f"Bearer {key}"
        self._client = httpx.Client(
            timeout=config.timeout, headers=headers, transport=transport
        )

    def complete(
        self, messages: list[dict[str, Any]], tools: list[dict[str, Any]]
    ) -> dict[str, Any]:
        config = self._config
        payload = {
            "model": config.model,
            "messages": messages,
            "tools": tools,
            "temperature": config.temperature,
            "max_tokens": config.max_output_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(config.max_attempts):
            if attempt:
                time.sleep(config.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.post(config.url, json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code in _RETRY_STATUS:
                last_error = EndpointError(
                    f"endpoint returned HTTP {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise EndpointError(
                    f"endpoint returned HTTP {response.status_code}: "
                    f"{response.text[:200]}"
                )
            return response.json()
        raise EndpointError(
            f"endpoint unreachable after {config.max_attempts} attempts: {last_error}"
        )

    def close(self) -> None:
        self._client.close()


def _parse_tool_calls(message: dict[str, Any]) -> tuple[ToolCall, ...]:
    calls = []
    for raw in message.get("tool_calls") or ():
        function = raw.get("function", {})
        arguments = function.get("arguments", "")
        try:
            parsed = json.loads(arguments) if arguments else {}
        except json.JSONDecodeError:
            parsed = {}
        if not isinstance(parsed, dict):
            parsed = {}
        calls.append(
            ToolCall(
                name=function.get("name", ""),
                arguments=parsed,
                call_id=raw.get("id", ""),
            )
        )
    return tuple(calls)


class EndpointAgent:
    """Adapts a chat endpoint to the Agent protocol for one episode."""

    def __init__(
        self,
        client: ChatCompletionsClient,
        system_prompt: str,
        tools: list[dict[str, Any]],
    ):
        self._client = client
        self._tools = tools
        self._messages: list[dict[str, Any]] = [
            {"role": "system", "content": system_prompt},
            {
                "role": "user",
                "content": "Fill every hidden slot, then call done.",
            },
        ]
        self._pending: tuple[ToolCall, ...] = ()

    def next_turn(self, results: list[ToolResult]) -> AgentTurn:
        for call, result in zip(self._pending, results):
            self._messages.append(
                {
                    "role": "tool",
                    "tool_call_id": call.call_id,
                    "content": json.dumps(result.to_doc(), sort_keys=True),
                }
            )
        response = self._client.complete(self._messages, self._tools)
        try:
            choice = response["choices"][0]
            message = choice["message"]
        except (KeyError, IndexError, TypeError) as exc:
            raise EndpointError(f"malformed endpoint response: {exc}")
        self._messages.append(message)
        calls = _parse_tool_calls(message)
        self._pending = calls
        usage = response.get("usage") or {}
        return AgentTurn(
            tool_calls=calls,
            message=message.get("content") or "",
            completion_tokens=int(usage.get("completion_tokens", 0)),
            truncated=choice.get("finish_reason") == "length",
        )
