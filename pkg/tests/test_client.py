"""Endpoint client and agent adapter against a mock transport."""

import json

import httpx
import pytest

from slotbench.client import ChatCompletionsClient, EndpointAgent, EndpointConfig
from slotbench.environment import ToolResult
from slotbench.errors import EndpointError

CONFIG = EndpointConfig(url="http://e.test/v1/chat/completions", model="m", backoff_base=0.0)


def response_doc(tool_calls=None, content=None, finish_reason="tool_calls", tokens=7):
    message = {"role": "assistant", "content": content}
    if tool_calls is not None:
        message["tool_calls"] = tool_calls
    return {
        "choices": [{"message": message, "finish_reason": finish_reason}],
        "usage": {"completion_tokens": tokens},
    }


def one_call(name="done", arguments="{}", call_id="call_1"):
    return {"id": call_id, "function": {"name": name, "arguments": arguments}}


def client_with(handler):
    return ChatCompletionsClient(CONFIG, transport=httpx.MockTransport(handler))


class TestClient:
    def test_posts_the_chat_payload(self):
        seen = {}

        def handler(request):
            seen.update(json.loads(request.content))
            return httpx.Response(200, json=response_doc())

        client = client_with(handler)
        client.complete([{"role": "user", "content": "hi"}], tools=[{"a": 1}])
        assert seen["model"] == "m"
        assert seen["messages"] == [{"role": "user", "content": "hi"}]
        assert seen["tools"] == [{"a": 1}]
        assert seen["temperature"] == 0.0
        assert seen["max_tokens"] == 16384

    def test_retries_transient_statuses_then_succeeds(self):
        statuses = iter([500, 429])

        def handler(request):
            status = next(statuses, 200)
            if status != 200:
                return httpx.Response(status)
            return httpx.Response(200, json=response_doc())

        client = client_with(handler)
        out = client.complete([], [])
        assert out["choices"][0]["finish_reason"] == "tool_calls"

    def test_gives_up_after_max_attempts(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(503)

        client = client_with(handler)
        with pytest.raises(EndpointError, match="after 3 attempts"):
            client.complete([], [])
        assert len(attempts) == 3

    def test_retries_connection_errors(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            if len(attempts) < 3:
                raise httpx.ConnectError("refused")
            return httpx.Response(200, json=response_doc())

        client = client_with(handler)
        assert client.complete([], [])["usage"]["completion_tokens"] == 7

    def test_non_retryable_status_raises_immediately(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(400, text="bad request")

        client = client_with(handler)
        with pytest.raises(EndpointError, match="HTTP 400"):
            client.complete([], [])
        assert len(attempts) == 1

    def test_api_key_header_from_environment(self, monkeypatch):
        monkeypatch.setenv("TEST_KEY", "sk-abc")
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("Authorization")
            return httpx.Response(200, json=response_doc())

        config = EndpointConfig(url=CONFIG.url, model="m", api_key_env="TEST_KEY")
        ChatCompletionsClient(config, transport=httpx.MockTransport(handler)).complete([], [])
        assert seen["auth"] == "Bearer sk-abc"

    def test_missing_api_key_fails_at_construction(self, monkeypatch):
        monkeypatch.delenv("NO_SUCH_KEY", raising=False)
        config = EndpointConfig(url=CONFIG.url, model="m", api_key_env="NO_SUCH_KEY")
        with pytest.raises(EndpointError, match="NO_SUCH_KEY"):
            ChatCompletionsClient(config)


def scripted_agent(responses):
    queue = iter(responses)
    requests = []

    def handler(request):
        requests.append(json.loads(request.content))
        return httpx.Response(200, json=next(queue))

    agent = EndpointAgent(client_with(handler), "SYSTEM", tools=[{"t": 1}])
    return agent, requests


class TestEndpointAgent:
    def test_threads_system_and_user_messages(self):
        agent, requests = scripted_agent([response_doc(tool_calls=[one_call()])])
        turn = agent.next_turn([])
        assert requests[0]["messages"][0] == {"role": "system", "content": "SYSTEM"}
        assert requests[0]["messages"][1]["role"] == "user"
        assert [c.name for c in turn.tool_calls] == ["done"]
        assert turn.completion_tokens == 7
        assert not turn.truncated

    def test_parses_arguments_and_call_ids(self):
        call = one_call(
            name="set_slot", arguments='{"row": 1, "col": 2, "item_id": "X9"}', call_id="c42"
        )
        agent, _ = scripted_agent([response_doc(tool_calls=[call])])
        turn = agent.next_turn([])
        assert turn.tool_calls[0].arguments == {"row": 1, "col": 2, "item_id": "X9"}
        assert turn.tool_calls[0].call_id == "c42"

    def test_malformed_arguments_become_empty_dict(self):
        calls = [
            one_call(arguments="{not json"),
            one_call(arguments='["a", "list"]'),
            one_call(arguments=""),
        ]
        agent, _ = scripted_agent([response_doc(tool_calls=calls)])
        turn = agent.next_turn([])
        assert all(c.arguments == {} for c in turn.tool_calls)

    def test_tool_results_are_threaded_back(self):
        agent, requests = scripted_agent(
            [
                response_doc(tool_calls=[one_call(call_id="c1")]),
                response_doc(content="all done", tool_calls=None, finish_reason="stop"),
            ]
        )
        agent.next_turn([])
        turn = agent.next_turn([ToolResult(True, {"grid": []})])
        tool_message = requests[1]["messages"][-1]
        assert tool_message["role"] == "tool"
        assert tool_message["tool_call_id"] == "c1"
        assert json.loads(tool_message["content"]) == {
            "ok": True,
            "payload": {"grid": []},
        }
        assert turn.tool_calls == ()
        assert turn.message == "all done"

    def test_assistant_message_joins_the_thread(self):
        agent, requests = scripted_agent(
            [
                response_doc(tool_calls=[one_call()], content="thinking"),
                response_doc(content="bye", finish_reason="stop"),
            ]
        )
        agent.next_turn([])
        agent.next_turn([ToolResult(True, True)])
        roles = [m["role"] for m in requests[1]["messages"]]
        assert roles == ["system", "user", "assistant", "tool"]

    def test_length_finish_reason_sets_truncated(self):
        agent, _ = scripted_agent([response_doc(finish_reason="length", tokens=16384)])
        turn = agent.next_turn([])
        assert turn.truncated
        assert turn.completion_tokens == 16384

    def test_malformed_response_raises(self):
        agent, _ = scripted_agent([{"choices": []}])
        with pytest.raises(EndpointError, match="malformed"):
            agent.next_turn([])

    def test_missing_usage_defaults_to_zero(self):
        doc = response_doc()
        del doc["usage"]
        agent, _ = scripted_agent([doc])
        assert agent.next_turn([]).completion_tokens == 0
