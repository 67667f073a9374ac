"""Agent interface and the two scripted reference agents.

An agent is anything with a `next_turn` method: it receives the results
of the previous turn's tool calls and returns the next batch of calls
(or an empty turn to finish with a message). The scripted agents below
read the PUBLIC instance only; they never see the answer key.

The oracle solves by local filtering plus global-check search and has a
fixed call pattern, so at B=0 its step count is exactly 3H + 2. The
random agent fills each slot uniformly from the locally valid
candidates, giving expected reward exactly prod_s 1/(1 + b_s).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Iterator, Protocol

from .constraints import attrs_satisfy
from .environment import ToolCall, ToolResult, domain_tool_names
from .instance import HiddenSlot, Instance, Position


@dataclass(frozen=True)
class AgentTurn:
    """One agent response: tool calls to dispatch, or a final message."""

    tool_calls: tuple[ToolCall, ...] = ()
    message: str = ""
    completion_tokens: int = 0
    truncated: bool = False


class Agent(Protocol):
    def next_turn(self, results: list[ToolResult]) -> AgentTurn: ...


def _read_calls(instance: Instance, attrs_tool: str) -> tuple[
    tuple[ToolCall, ...], tuple[tuple[Position, str], ...]
]:
    """Two batch attribute reads per hidden slot, one per constraint field."""
    calls: list[ToolCall] = []
    order: list[tuple[Position, str]] = []
    for slot in instance.hidden:
        for constraint in slot.constraints:
            calls.append(
                ToolCall(
                    attrs_tool,
                    {"ids": list(slot.candidates), "field": constraint.field},
                )
            )
            order.append((slot.position, constraint.field))
    return tuple(calls), tuple(order)


def _locally_valid(
    slot: HiddenSlot, values: dict[str, dict[str, Any]]
) -> list[str]:
    """Candidates whose read attribute values satisfy both slot constraints."""
    valid = []
    for item_id in slot.candidates:
        attrs = {field: values[field][item_id] for field in values}
        if all(attrs_satisfy(attrs, c) for c in slot.constraints):
            valid.append(item_id)
    return valid


class OracleAgent:
    """Deterministic solver over the public instance.

    Turn 1 issues 2H batch attribute reads. Each following turn places
    one combination of locally valid candidates (H set_slot calls) and
    checks the global constraints; the first passing check triggers
    done. A failed read falls back to set_slot/check cycles for that
    slot; a failed or exhausted global check submits the current grid.
    """

    def __init__(self, instance: Instance):
        self._instance = instance
        self._slots = instance.hidden
        _, info, attrs, check_slot, check_global = domain_tool_names(
            instance.domain
        )
        self._attrs_tool = attrs
        self._check_slot_tool = check_slot
        self._check_global_tool = check_global
        self._phase = "read"
        self._read_order: tuple[tuple[Position, str], ...] = ()
        self._valid: dict[Position, list[str]] = {}
        self._fallback_pairs: list[tuple[Position, str]] = []
        self._combos: Iterator[tuple[str, ...]] = iter(())

    def next_turn(self, results: list[ToolResult]) -> AgentTurn:
        if self._phase == "read":
            calls, self._read_order = _read_calls(self._instance, self._attrs_tool)
            self._phase = "filter"
            return AgentTurn(tool_calls=calls)
        if self._phase == "filter":
            self._ingest_reads(results)
            if self._fallback_pairs:
                self._phase = "fallback"
                return AgentTurn(tool_calls=self._fallback_calls())
            return self._start_search()
        if self._phase == "fallback":
            self._ingest_fallback(results)
            return self._start_search()
        if self._phase == "search":
            check = results[-1] if results else ToolResult(False, None)
            if check.ok and check.payload is True:
                self._phase = "finish"
                return AgentTurn(tool_calls=(ToolCall("done", {}),))
            if not check.ok:
                # global-check budget gone (or call failed): submit as-is
                self._phase = "finish"
                return AgentTurn(tool_calls=(ToolCall("done", {}),))
            return self._next_combo_turn()
        return AgentTurn(message="episode complete")

    def _ingest_reads(self, results: list[ToolResult]) -> None:
        values: dict[Position, dict[str, dict[str, Any]]] = {}
        failed: set[Position] = set()
        for (pos, field), result in zip(self._read_order, results):
            if result.ok:
                values.setdefault(pos, {})[field] = result.payload["values"]
            else:
                failed.add(pos)
        for slot in self._slots:
            pos = slot.position
            if pos in failed:
                self._fallback_pairs.extend(
                    (pos, item_id) for item_id in slot.candidates
                )
            else:
                self._valid[pos] = _locally_valid(slot, values[pos])

    def _fallback_calls(self) -> tuple[ToolCall, ...]:
        calls: list[ToolCall] = []
        for pos, item_id in self._fallback_pairs:
            calls.append(
                ToolCall(
                    "set_slot",
                    {"row": pos[0], "col": pos[1], "item_id": item_id},
                )
            )
            calls.append(ToolCall(self._check_slot_tool, {"row": pos[0], "col": pos[1]}))
        return tuple(calls)

    def _ingest_fallback(self, results: list[ToolResult]) -> None:
        for index, (pos, item_id) in enumerate(self._fallback_pairs):
            check_index = 2 * index + 1
            if check_index >= len(results):
                break
            check = results[check_index]
            if check.ok and check.payload is True:
                self._valid.setdefault(pos, []).append(item_id)
        for slot in self._slots:
            # nothing confirmed valid: try everything rather than give up
            if not self._valid.get(slot.position):
                self._valid[slot.position] = list(slot.candidates)

    def _start_search(self) -> AgentTurn:
        self._phase = "search"
        self._combos = itertools.product(
            *(self._valid[slot.position] for slot in self._slots)
        )
        return self._next_combo_turn()

    def _next_combo_turn(self) -> AgentTurn:
        combo = next(self._combos, None)
        if combo is None:
            self._phase = "finish"
            return AgentTurn(tool_calls=(ToolCall("done", {}),))
        calls = [
            ToolCall(
                "set_slot",
                {"row": slot.position[0], "col": slot.position[1], "item_id": item_id},
            )
            for slot, item_id in zip(self._slots, combo)
        ]
        calls.append(ToolCall(self._check_global_tool, {}))
        return AgentTurn(tool_calls=tuple(calls))


class RandomValidAgent:
    """Fills every hidden slot uniformly from its locally valid candidates.

    Retry-free by design: a failed attribute read widens the pick to all
    candidates of that slot, and a failed set_slot leaves the slot empty.
    """

    def __init__(self, instance: Instance, rng: random.Random):
        self._instance = instance
        self._rng = rng
        attrs_tool = domain_tool_names(instance.domain)[2]
        self._attrs_tool = attrs_tool
        self._read_order: tuple[tuple[Position, str], ...] = ()
        self._phase = "read"

    def next_turn(self, results: list[ToolResult]) -> AgentTurn:
        if self._phase == "read":
            calls, self._read_order = _read_calls(self._instance, self._attrs_tool)
            self._phase = "fill"
            return AgentTurn(tool_calls=calls)
        if self._phase == "fill":
            self._phase = "finish"
            return AgentTurn(tool_calls=self._fill_calls(results))
        return AgentTurn(message="episode complete")

    def _fill_calls(self, results: list[ToolResult]) -> tuple[ToolCall, ...]:
        values: dict[Position, dict[str, dict[str, Any]]] = {}
        failed: set[Position] = set()
        for (pos, field), result in zip(self._read_order, results):
            if result.ok:
                values.setdefault(pos, {})[field] = result.payload["values"]
            else:
                failed.add(pos)
        calls: list[ToolCall] = []
        for slot in self._instance.hidden:
            pos = slot.position
            if pos in failed:
                choices = list(slot.candidates)
            else:
                choices = _locally_valid(slot, values[pos]) or list(slot.candidates)
            pick = self._rng.choice(choices)
            calls.append(
                ToolCall("set_slot", {"row": pos[0], "col": pos[1], "item_id": pick})
            )
        calls.append(ToolCall("done", {}))
        return tuple(calls)
