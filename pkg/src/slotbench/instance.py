"""Task instance types and their on-disk JSON forms.

An instance splits into a public task file (everything an agent may see:
grid shape, pre-filled cells, hidden-slot constraints and candidate ids,
budgets, and the item records those ids resolve to) and an answer-key
file (the truth assignment plus the decoy/filter role of every
non-truth candidate). Both files are written with sorted keys and
2-space indentation so regeneration under the same seed is
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .constraints import GlobalConstraint, SlotConstraint, constraint_to_text, text_to_constraint
from .domains import DOMAINS, Item, schema
from .errors import ConfigError, ConstraintParseError, InstanceFormatError

KEY_SUFFIX = ".key.json"

DEFAULT_ROWS = 5
DEFAULT_COLS = 7
DEFAULT_CANDIDATES = 25
DEFAULT_RELAX = (30, 50, 70)
DEFAULT_MAX_RETRIES = 200
DEFAULT_POOL_SIZE = 1200
DEFAULT_QUERY_BUDGET = 40
DEFAULT_GLOBAL_CHECK_BUDGET = 60

Position = tuple[int, int]


@dataclass(frozen=True)
class GenConfig:
    """Everything generate() needs; generation is a pure function of this."""

    domain: str
    hidden_count: int
    decoy_budget: int
    rows: int = DEFAULT_ROWS
    cols: int = DEFAULT_COLS
    candidates_per_slot: int = DEFAULT_CANDIDATES
    relax_thresholds: tuple[int, int, int] = DEFAULT_RELAX
    max_retries: int = DEFAULT_MAX_RETRIES
    seed: int = 0
    pool_size: int = DEFAULT_POOL_SIZE
    pool_seed: int | None = None
    query_budget: int = DEFAULT_QUERY_BUDGET
    global_check_budget: int = DEFAULT_GLOBAL_CHECK_BUDGET

    def validate(self) -> None:
        if self.domain not in DOMAINS:
            raise ConfigError(f"unknown domain: {self.domain!r}")
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("grid must have at least one row and column")
        cells = self.rows * self.cols
        if not 1 <= self.hidden_count <= cells:
            raise ConfigError(
                f"hidden_count must be in [1, {cells}], got {self.hidden_count}"
            )
        if self.decoy_budget < 0:
            raise ConfigError("decoy_budget must be >= 0")
        if self.candidates_per_slot < 2:
            raise ConfigError("candidates_per_slot must be >= 2")
        t1, t2, t3 = self.relax_thresholds
        if not (0 < t1 < t2 < t3 <= self.max_retries):
            raise ConfigError(
                "relax_thresholds must satisfy 0 < t1 < t2 < t3 <= max_retries"
            )
        if self.pool_size < cells + self.candidates_per_slot:
            raise ConfigError(
                "pool_size must be >= grid cells + candidates_per_slot "
                f"({cells + self.candidates_per_slot}), got {self.pool_size}"
            )
        if self.query_budget < 0 or self.global_check_budget < 0:
            raise ConfigError("budgets must be >= 0")

    @property
    def effective_pool_seed(self) -> int:
        return self.seed if self.pool_seed is None else self.pool_seed


@dataclass(frozen=True)
class HiddenSlot:
    row: int
    col: int
    constraints: tuple[SlotConstraint, ...]
    candidates: tuple[str, ...]
    query_budget: int = DEFAULT_QUERY_BUDGET

    @property
    def position(self) -> Position:
        return (self.row, self.col)


@dataclass
class Instance:
    """Public view of one task: safe to hand to any agent."""

    domain: str
    rows: int
    cols: int
    h: int
    b: int
    k: int
    seed: int
    prefilled: dict[Position, str]
    hidden: tuple[HiddenSlot, ...]
    global_constraints: tuple[GlobalConstraint, ...]
    items: dict[str, Item]
    global_check_budget: int = DEFAULT_GLOBAL_CHECK_BUDGET

    def hidden_at(self, row: int, col: int) -> HiddenSlot | None:
        for slot in self.hidden:
            if slot.row == row and slot.col == col:
                return slot
        return None

    @property
    def hidden_positions(self) -> set[Position]:
        return {slot.position for slot in self.hidden}


@dataclass
class AnswerKey:
    """Private labels: truth assignment and candidate roles per slot."""

    truth: dict[Position, str]
    decoys: dict[Position, list[str]]
    filters: dict[Position, list[str]]
    allocations: dict[Position, int]


@dataclass
class ValidationReport:
    truth_ok: bool
    partition_ok: bool
    decoy_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.truth_ok and self.partition_ok and self.decoy_ok


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _pos_key(pos: Position) -> str:
    return f"{pos[0]},{pos[1]}"


def _parse_pos_key(text: str, where: str) -> Position:
    parts = text.split(",")
    if len(parts) != 2:
        raise InstanceFormatError(f"{where}: bad position key {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise InstanceFormatError(f"{where}: bad position key {text!r}") from None


def instance_to_doc(instance: Instance) -> dict:
    return {
        "domain": instance.domain,
        "rows": instance.rows,
        "cols": instance.cols,
        "h": instance.h,
        "b": instance.b,
        "k": instance.k,
        "seed": instance.seed,
        "global_check_budget": instance.global_check_budget,
        "global_constraints": [
            constraint_to_text(g) for g in instance.global_constraints
        ],
        "prefilled": [
            {"row": pos[0], "col": pos[1], "item_id": item_id}
            for pos, item_id in sorted(instance.prefilled.items())
        ],
        "hidden_slots": [
            {
                "row": slot.row,
                "col": slot.col,
                "constraints": [constraint_to_text(c) for c in slot.constraints],
                "candidates": list(slot.candidates),
                "query_budget": slot.query_budget,
            }
            for slot in instance.hidden
        ],
        "items": {
            item_id: {"name": item.name, "attributes": item.attributes}
            for item_id, item in sorted(instance.items.items())
        },
    }


def key_to_doc(key: AnswerKey) -> dict:
    return {
        "truth": [
            {"row": pos[0], "col": pos[1], "item_id": item_id}
            for pos, item_id in sorted(key.truth.items())
        ],
        "decoys": {_pos_key(pos): ids for pos, ids in sorted(key.decoys.items())},
        "filters": {_pos_key(pos): ids for pos, ids in sorted(key.filters.items())},
        "allocations": {
            _pos_key(pos): count for pos, count in sorted(key.allocations.items())
        },
    }


def _dump(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def key_path_for(path: str | Path) -> Path:
    path = Path(path)
    stem = path.name[: -len(".json")] if path.name.endswith(".json") else path.name
    return path.with_name(stem + KEY_SUFFIX)


def write_instance(instance: Instance, key: AnswerKey, path: str | Path) -> tuple[Path, Path]:
    """Write the public file at `path` and the key alongside; returns both paths."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _dump(instance_to_doc(instance), path)
    key_path = key_path_for(path)
    _dump(key_to_doc(key), key_path)
    return path, key_path


def _require(doc: dict, field_name: str, where: str):
    if field_name not in doc:
        raise InstanceFormatError(f"{where}: missing field {field_name!r}")
    return doc[field_name]


def instance_from_doc(doc: dict, where: str = "instance") -> Instance:
    domain = _require(doc, "domain", where)
    if domain not in DOMAINS:
        raise InstanceFormatError(f"{where}.domain: unknown domain {domain!r}")
    sch = schema(domain)
    items: dict[str, Item] = {}
    for item_id, record in _require(doc, "items", where).items():
        attributes = _require(record, "attributes", f"{where}.items[{item_id}]")
        for fname in sch.field_names:
            if fname not in attributes:
                raise InstanceFormatError(
                    f"{where}.items[{item_id}].attributes: missing field {fname!r}"
                )
        items[item_id] = Item(
            id=item_id,
            name=_require(record, "name", f"{where}.items[{item_id}]"),
            attributes=dict(attributes),
        )
    prefilled: dict[Position, str] = {}
    for entry in _require(doc, "prefilled", where):
        pos = (entry["row"], entry["col"])
        prefilled[pos] = entry["item_id"]
    hidden = []
    for idx, entry in enumerate(_require(doc, "hidden_slots", where)):
        slot_where = f"{where}.hidden_slots[{idx}]"
        constraints = tuple(
            _parse_slot_constraint(text, slot_where)
            for text in _require(entry, "constraints", slot_where)
        )
        hidden.append(
            HiddenSlot(
                row=_require(entry, "row", slot_where),
                col=_require(entry, "col", slot_where),
                constraints=constraints,
                candidates=tuple(_require(entry, "candidates", slot_where)),
                query_budget=_require(entry, "query_budget", slot_where),
            )
        )
    global_constraints = tuple(
        _parse_global_constraint(text, f"{where}.global_constraints")
        for text in _require(doc, "global_constraints", where)
    )
    return Instance(
        domain=domain,
        rows=_require(doc, "rows", where),
        cols=_require(doc, "cols", where),
        h=_require(doc, "h", where),
        b=_require(doc, "b", where),
        k=_require(doc, "k", where),
        seed=_require(doc, "seed", where),
        prefilled=prefilled,
        hidden=tuple(hidden),
        global_constraints=global_constraints,
        items=items,
        global_check_budget=_require(doc, "global_check_budget", where),
    )


def _parse_slot_constraint(text: str, where: str) -> SlotConstraint:
    try:
        parsed = text_to_constraint(text)
    except ConstraintParseError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None
    if not isinstance(parsed, SlotConstraint):
        raise InstanceFormatError(f"{where}: {text!r} is not a slot constraint")
    return parsed


def _parse_global_constraint(text: str, where: str) -> GlobalConstraint:
    try:
        parsed = text_to_constraint(text)
    except ConstraintParseError as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None
    if not isinstance(parsed, GlobalConstraint):
        raise InstanceFormatError(f"{where}: {text!r} is not a global constraint")
    return parsed


def key_from_doc(doc: dict, where: str = "key") -> AnswerKey:
    truth: dict[Position, str] = {}
    for entry in _require(doc, "truth", where):
        truth[(entry["row"], entry["col"])] = entry["item_id"]
    decoys = {
        _parse_pos_key(k, f"{where}.decoys"): list(v)
        for k, v in _require(doc, "decoys", where).items()
    }
    filters = {
        _parse_pos_key(k, f"{where}.filters"): list(v)
        for k, v in _require(doc, "filters", where).items()
    }
    allocations = {
        _parse_pos_key(k, f"{where}.allocations"): v
        for k, v in _require(doc, "allocations", where).items()
    }
    return AnswerKey(truth=truth, decoys=decoys, filters=filters, allocations=allocations)


def read_public(path: str | Path) -> Instance:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_doc(doc, where=str(path))


def read_instance(path: str | Path) -> tuple[Instance, AnswerKey]:
    """Load the public file and its answer key from `path` + the key suffix."""
    instance = read_public(path)
    key_path = key_path_for(path)
    try:
        doc = json.loads(key_path.read_text())
    except FileNotFoundError:
        raise InstanceFormatError(f"missing answer key: {key_path}") from None
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{key_path}: not valid JSON ({exc})") from None
    return instance, key_from_doc(doc, where=str(key_path))
