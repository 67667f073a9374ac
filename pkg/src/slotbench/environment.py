"""In-process episode runtime: tool dispatch over a task instance.

No server and no subprocess: an episode is a mutable state object plus a
dispatch function. Every dispatch (including error results and injected
failures) counts exactly one step; the step limit itself is enforced by
the harness. All errors are returned in-band as failed ToolResults so an
agent can always keep going.

Budgets: each hidden slot carries a query budget consumed by attribute
queries that touch its candidates, and the episode carries one budget
for global-constraint checks. Injected failures (probability
`fail_rate` per call, drawn from the episode seed) consume a step but
never a budget and never execute the tool.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field as dataclass_field
from typing import Any, Callable

from .constraints import (
    Comparator,
    GridAssignment,
    SlotConstraint,
    eval_global_full,
    eval_global_open_prefix,
    eval_slot,
)
from .errors import SlotbenchError
from .instance import Instance, AnswerKey, Position

INJECTED_FAILURE_TEXT = "tool call failed: service unavailable"
BUDGET_EXHAUSTED_TEXT = "budget exhausted"
EPISODE_OVER_TEXT = "episode is over: done() was already called"

COMMON_TOOL_NAMES = (
    "set_slot",
    "get_current_grid_state",
    "get_slot_id",
    "get_hidden_slot_query_budget",
    "get_global_check_budget",
    "done",
)

_OPERATORS = {c.value: c for c in Comparator}


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: dict[str, Any]
    call_id: str = ""


@dataclass(frozen=True)
class ToolResult:
    ok: bool
    payload: Any

    def to_doc(self) -> dict[str, Any]:
        return {"ok": self.ok, "payload": self.payload}


def _error(text: str) -> ToolResult:
    return ToolResult(ok=False, payload=text)


@dataclass
class EpisodeState:
    instance: Instance
    fail_rate: float
    seed: int
    assignment: dict[Position, str] = dataclass_field(default_factory=dict)
    query_budgets: dict[Position, int] = dataclass_field(default_factory=dict)
    global_checks_left: int = 0
    steps: int = 0
    done: bool = False
    transcript: list[tuple[ToolCall, ToolResult]] = dataclass_field(
        default_factory=list
    )

    # caches filled by new_episode
    _rng: random.Random = dataclass_field(default_factory=random.Random, repr=False)
    _hidden_by_pos: dict[Position, Any] = dataclass_field(
        default_factory=dict, repr=False
    )
    _slots_of_candidate: dict[str, tuple[Position, ...]] = dataclass_field(
        default_factory=dict, repr=False
    )
    _candidate_sets: dict[Position, frozenset[str]] = dataclass_field(
        default_factory=dict, repr=False
    )
    _tools: dict[str, Callable[["EpisodeState", dict[str, Any]], ToolResult]] = (
        dataclass_field(default_factory=dict, repr=False)
    )


def domain_tool_names(domain: str) -> tuple[str, ...]:
    return (
        f"query_{domain}_candidate_from_attribute",
        f"get_{domain}_item_info",
        f"get_{domain}_item_attributes",
        f"check_{domain}_slot_constraints",
        f"check_{domain}_global_constraints",
    )


def new_episode(
    instance: Instance, fail_rate: float = 0.0, seed: int = 0
) -> EpisodeState:
    """Fresh episode over an instance; same (instance, fail_rate, seed)
    always replays identically."""
    state = EpisodeState(instance=instance, fail_rate=fail_rate, seed=seed)
    state._rng = random.Random(seed)
    state.global_checks_left = instance.global_check_budget
    slots_of_candidate: dict[str, list[Position]] = {}
    for slot in instance.hidden:
        pos = slot.position
        state._hidden_by_pos[pos] = slot
        state.query_budgets[pos] = slot.query_budget
        state._candidate_sets[pos] = frozenset(slot.candidates)
        for item_id in slot.candidates:
            slots_of_candidate.setdefault(item_id, []).append(pos)
    state._slots_of_candidate = {
        item_id: tuple(positions)
        for item_id, positions in slots_of_candidate.items()
    }
    domain = instance.domain
    query, info, attrs, check_slot, check_global = domain_tool_names(domain)
    state._tools = {
        "set_slot": _tool_set_slot,
        "get_current_grid_state": _tool_grid_state,
        "get_slot_id": _tool_get_slot_id,
        "get_hidden_slot_query_budget": _tool_query_budget,
        "get_global_check_budget": _tool_global_budget,
        "done": _tool_done,
        query: _tool_query_candidates,
        info: _tool_item_info,
        attrs: _tool_item_attributes,
        check_slot: _tool_check_slot,
        check_global: _tool_check_global,
    }
    return state


def dispatch(state: EpisodeState, call: ToolCall) -> ToolResult:
    """Execute one tool call; always returns in-band, always costs a step."""
    state.steps += 1
    if state.done:
        result = _error(EPISODE_OVER_TEXT)
    elif state.fail_rate > 0.0 and state._rng.random() < state.fail_rate:
        result = _error(INJECTED_FAILURE_TEXT)
    else:
        handler = state._tools.get(call.name)
        if handler is None:
            result = _error(f"unknown tool: {call.name}")
        else:
            try:
                result = handler(state, call.arguments)
            except SlotbenchError as exc:
                result = _error(str(exc))
            except (TypeError, ValueError, KeyError) as exc:
                result = _error(f"bad arguments: {exc}")
    state.transcript.append((call, result))
    return result


# ---------------------------------------------------------------------------
# Tool handlers
# ---------------------------------------------------------------------------


def _int_arg(args: dict[str, Any], name: str) -> int:
    value = args.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"argument {name!r} must be an integer")
    return value


def _position_arg(state: EpisodeState, args: dict[str, Any]) -> Position:
    row = _int_arg(args, "row")
    col = _int_arg(args, "col")
    inst = state.instance
    if not (0 <= row < inst.rows and 0 <= col < inst.cols):
        raise ValueError(
            f"position ({row}, {col}) outside the {inst.rows}x{inst.cols} grid"
        )
    return (row, col)


def _tool_set_slot(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    pos = _position_arg(state, args)
    if pos in state.instance.prefilled:
        return _error(f"slot {pos} is pre-filled and cannot be changed")
    if pos not in state._hidden_by_pos:
        return _error(f"slot {pos} is not a hidden slot")
    item_id = args.get("item_id")
    if item_id is None:
        state.assignment.pop(pos, None)
        return ToolResult(ok=True, payload={"row": pos[0], "col": pos[1], "item_id": None})
    if not isinstance(item_id, str):
        return _error("argument 'item_id' must be a string or null")
    if item_id not in state._candidate_sets[pos]:
        return _error(f"item {item_id} is not a candidate for slot {pos}")
    state.assignment[pos] = item_id
    return ToolResult(ok=True, payload={"row": pos[0], "col": pos[1], "item_id": item_id})


def _tool_grid_state(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    inst = state.instance
    grid: list[list[str | None]] = []
    for row in range(inst.rows):
        grid_row: list[str | None] = []
        for col in range(inst.cols):
            pos = (row, col)
            grid_row.append(
                inst.prefilled.get(pos) or state.assignment.get(pos)
            )
        grid.append(grid_row)
    return ToolResult(ok=True, payload={"grid": grid})


def _tool_get_slot_id(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    pos = _position_arg(state, args)
    item_id = state.instance.prefilled.get(pos) or state.assignment.get(pos)
    return ToolResult(ok=True, payload={"item_id": item_id})


def _tool_query_budget(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    pos = _position_arg(state, args)
    if pos not in state.query_budgets:
        return _error(f"slot {pos} is not a hidden slot")
    return ToolResult(ok=True, payload=state.query_budgets[pos])


def _tool_global_budget(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    return ToolResult(ok=True, payload=state.global_checks_left)


def _tool_done(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    state.done = True
    return ToolResult(ok=True, payload=True)


def _tool_query_candidates(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    pos = _position_arg(state, args)
    slot = state._hidden_by_pos.get(pos)
    if slot is None:
        return _error(f"slot {pos} is not a hidden slot")
    operator = args.get("operator")
    if operator not in _OPERATORS:
        return _error(
            f"unknown operator {operator!r}; use one of {', '.join(_OPERATORS)}"
        )
    field_name = args.get("field")
    if not isinstance(field_name, str):
        return _error("argument 'field' must be a string")
    value = args.get("value")
    if isinstance(value, list):
        value = frozenset(str(v) for v in value)
    probe = SlotConstraint(field_name, _OPERATORS[operator], value)
    if state.query_budgets[pos] <= 0:
        return _error(BUDGET_EXHAUSTED_TEXT)
    items = state.instance.items
    matches = [
        item_id for item_id in slot.candidates if eval_slot(items[item_id], (probe,))
    ]
    state.query_budgets[pos] -= 1
    return ToolResult(ok=True, payload={"candidates": matches})


def _tool_item_info(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    item_id = args.get("item_id")
    if not isinstance(item_id, str):
        return _error("argument 'item_id' must be a string")
    if item_id not in set(state.instance.prefilled.values()):
        return _error(
            f"access denied: {item_id} is not placed in any pre-filled cell"
        )
    item = state.instance.items[item_id]
    return ToolResult(
        ok=True,
        payload={"id": item.id, "name": item.name, "attributes": dict(item.attributes)},
    )


def _tool_item_attributes(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    ids = args.get("ids")
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        return _error("argument 'ids' must be a list of item id strings")
    field_name = args.get("field")
    if not isinstance(field_name, str):
        return _error("argument 'field' must be a string")
    items = state.instance.items
    for item_id in ids:
        if item_id not in items:
            return _error(f"unknown item id: {item_id}")
        if field_name not in items[item_id].attributes:
            return _error(f"unknown field: {field_name!r}")
    # one budget point per distinct hidden slot whose candidates are touched
    affected: set[Position] = set()
    for item_id in ids:
        affected.update(state._slots_of_candidate.get(item_id, ()))
    for pos in affected:
        if state.query_budgets[pos] <= 0:
            return _error(BUDGET_EXHAUSTED_TEXT)
    for pos in affected:
        state.query_budgets[pos] -= 1
    values = {item_id: items[item_id].attributes[field_name] for item_id in ids}
    return ToolResult(ok=True, payload={"values": values})


def _tool_check_slot(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    pos = _position_arg(state, args)
    slot = state._hidden_by_pos.get(pos)
    if slot is None:
        # pre-filled cells carry no slot constraints
        if pos in state.instance.prefilled:
            return ToolResult(ok=True, payload=True)
        return _error(f"slot {pos} is not a hidden slot")
    item_id = state.assignment.get(pos)
    if item_id is None:
        return ToolResult(ok=True, payload=False)
    satisfied = eval_slot(state.instance.items[item_id], slot.constraints)
    return ToolResult(ok=True, payload=satisfied)


def _tool_check_global(state: EpisodeState, args: dict[str, Any]) -> ToolResult:
    if state.global_checks_left <= 0:
        return _error(BUDGET_EXHAUSTED_TEXT)
    state.global_checks_left -= 1
    inst = state.instance
    cells = dict(inst.prefilled)
    cells.update(state.assignment)
    grid = GridAssignment(inst.rows, inst.cols, cells)
    if grid.is_full:
        satisfied = eval_global_full(grid, inst.items, inst.global_constraints)
    else:
        satisfied = eval_global_open_prefix(
            grid, inst.items, inst.global_constraints
        )
    return ToolResult(ok=True, payload=satisfied)


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------


def score_episode(state: EpisodeState, key: AnswerKey) -> int:
    """Binary reward: 1 iff every hidden slot holds its truth item."""
    for slot in state.instance.hidden:
        if state.assignment.get(slot.position) != key.truth.get(slot.position):
            return 0
    return 1


def partial_credit(state: EpisodeState, key: AnswerKey) -> float:
    """Diagnostic only: fraction of hidden slots holding their truth item."""
    hidden = state.instance.hidden
    if not hidden:
        return 1.0
    correct = sum(
        1
        for slot in hidden
        if state.assignment.get(slot.position) == key.truth.get(slot.position)
    )
    return correct / len(hidden)


# ---------------------------------------------------------------------------
# Tool catalog and transcripts
# ---------------------------------------------------------------------------


def _decl(name: str, description: str, parameters: dict[str, Any]) -> dict[str, Any]:
    return {
        "type": "function",
        "function": {
            "name": name,
            "description": description,
            "parameters": {
                "type": "object",
                "properties": parameters,
                "required": [
                    p for p, spec in parameters.items() if not spec.get("_optional")
                ],
            },
        },
    }


def _strip_optional(decls: list[dict[str, Any]]) -> list[dict[str, Any]]:
    for decl in decls:
        for spec in decl["function"]["parameters"]["properties"].values():
            spec.pop("_optional", None)
    return decls


_ROW = {"type": "integer", "description": "Row index, 0-based."}
_COL = {"type": "integer", "description": "Column index, 0-based."}


def tool_catalog(instance: Instance) -> list[dict[str, Any]]:
    """Function declarations for every tool of this instance's domain."""
    domain = instance.domain
    query, info, attrs, check_slot, check_global = domain_tool_names(domain)
    decls = [
        _decl(
            "set_slot",
            "Place a candidate item into a hidden slot, or clear the slot by "
            "passing item_id = null. Pre-filled cells cannot be changed.",
            {
                "row": dict(_ROW),
                "col": dict(_COL),
                "item_id": {
                    "type": ["string", "null"],
                    "description": "Candidate item id for this slot, or null to clear.",
                    "_optional": True,
                },
            },
        ),
        _decl(
            "get_current_grid_state",
            "Return the whole grid as rows of item ids; unfilled hidden slots "
            "are null.",
            {},
        ),
        _decl(
            "get_slot_id",
            "Return the item id currently at one position (null if unfilled).",
            {"row": dict(_ROW), "col": dict(_COL)},
        ),
        _decl(
            "get_hidden_slot_query_budget",
            "Return how many attribute queries remain for one hidden slot.",
            {"row": dict(_ROW), "col": dict(_COL)},
        ),
        _decl(
            "get_global_check_budget",
            "Return how many global-constraint checks remain for the episode.",
            {},
        ),
        _decl(
            "done",
            "End the episode and submit the grid as it currently stands.",
            {},
        ),
        _decl(
            query,
            "List the candidate ids of one hidden slot whose field compares "
            "against the given value. Consumes one query from that slot's "
            "budget.",
            {
                "row": dict(_ROW),
                "col": dict(_COL),
                "field": {"type": "string", "description": "Attribute field name."},
                "operator": {
                    "type": "string",
                    "enum": ["<=", ">=", "==", "!=", "in"],
                    "description": "Comparison operator.",
                },
                "value": {
                    "type": ["integer", "string", "array"],
                    "description": "Comparison value; a list of strings for 'in'.",
                },
            },
        ),
        _decl(
            info,
            "Full record (name and all attributes) of an item currently "
            "placed in a pre-filled cell. Ids that only appear in candidate "
            "lists are not accessible here.",
            {"item_id": {"type": "string", "description": "Item id to look up."}},
        ),
        _decl(
            attrs,
            "Batch-read one attribute field for a list of item ids. Consumes "
            "one query from the budget of each hidden slot whose candidate "
            "list contains any of the ids.",
            {
                "ids": {
                    "type": "array",
                    "items": {"type": "string"},
                    "description": "Item ids to read.",
                },
                "field": {"type": "string", "description": "Attribute field name."},
            },
        ),
        _decl(
            check_slot,
            "Check whether the item currently placed at one position "
            "satisfies that slot's local constraints (false if unfilled).",
            {"row": dict(_ROW), "col": dict(_COL)},
        ),
        _decl(
            check_global,
            "Check the global constraints against the current grid; partial "
            "grids are checked on upper bounds only. Consumes one global "
            "check from the episode budget.",
            {},
        ),
    ]
    return _strip_optional(decls)


def transcript_doc(
    state: EpisodeState,
    instance_path: str,
    reward: int,
    failure_reason: str,
) -> dict[str, Any]:
    """JSON-ready transcript of every call in dispatch order."""
    return {
        "instance_path": instance_path,
        "seed": state.seed,
        "p": state.fail_rate,
        "calls": [
            {
                "step": index + 1,
                "name": call.name,
                "arguments": call.arguments,
                "ok": result.ok,
                "payload": result.payload,
            }
            for index, (call, result) in enumerate(state.transcript)
        ],
        "reward": reward,
        "steps": state.steps,
        "failure_reason": failure_reason,
    }


def write_transcript(doc: dict[str, Any], path: str) -> None:
    with open(path, "w") as handle:
        json.dump(doc, handle, sort_keys=True, indent=2)
        handle.write("\n")
