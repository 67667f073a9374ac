"""Constraint types, evaluators, and the text grammar.

Two layers of constraints govern a grid task:

* slot constraints restrict which items may occupy one hidden slot
  (conjunction of field comparisons);
* global constraints bound aggregates over the whole grid: sum upper
  bounds, sum lower bounds, and per-category count caps.

Global kinds split by direction. Upper-bound kinds (SUM_UPPER,
CATEGORY_COUNT_UPPER) can only move further past their bound as more
cells fill in, so a partial grid that already violates one cannot be
repaired by any completion. The lower-bound kind (SUM_LOWER) may still
be satisfied by future fills. Open-prefix evaluation therefore enforces
only the upper-bound kinds while any cell is unfilled, and all kinds on
a full grid.

Constraint text grammar (rendered and parsed losslessly):

    total <field> <= <int>                      SUM_UPPER
    total <field> >= <int>                      SUM_LOWER
    at most <int> items with <field> = <word>   CATEGORY_COUNT_UPPER
    <field> <op> <value>                        slot constraint

with <op> one of <=, >=, ==, !=, in; the in form takes a bracketed
comma-separated list. Values that look like integers parse as integers,
so categorical vocabulary must not be purely numeric.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Union

from .errors import (
    ConstraintParseError,
    ConstraintSchemaError,
    IncompleteAssignmentError,
    UnknownItemError,
)

if TYPE_CHECKING:
    from .domains import Item


class Comparator(Enum):
    LE = "<="
    GE = ">="
    EQ = "=="
    NE = "!="
    IN = "in"


class GlobalKind(Enum):
    SUM_UPPER = "sum_upper"
    SUM_LOWER = "sum_lower"
    CATEGORY_COUNT_UPPER = "category_count_upper"

    @property
    def is_upper_bound(self) -> bool:
        return self is not GlobalKind.SUM_LOWER


SlotValue = Union[int, str, frozenset]


def _is_int(value: object) -> bool:
    # bool is a subclass of int and must not pass as a numeric value
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass(frozen=True)
class SlotConstraint:
    """One field comparison an item must satisfy to occupy a slot."""

    field: str
    comparator: Comparator
    value: SlotValue

    def __post_init__(self) -> None:
        if self.comparator is Comparator.IN:
            if not isinstance(self.value, frozenset):
                raise ConstraintSchemaError(
                    f"in-constraint on {self.field!r} requires a frozenset value"
                )
        elif self.comparator in (Comparator.LE, Comparator.GE):
            if not _is_int(self.value):
                raise ConstraintSchemaError(
                    f"{self.comparator.value} constraint on {self.field!r} "
                    "requires an integer value"
                )


@dataclass(frozen=True)
class GlobalConstraint:
    """Aggregate bound over every cell of the grid."""

    kind: GlobalKind
    field: str
    bound: int
    category: str | None = None

    def __post_init__(self) -> None:
        if not _is_int(self.bound):
            raise ConstraintSchemaError(
                f"bound on {self.field!r} must be an integer"
            )
        if self.kind is GlobalKind.CATEGORY_COUNT_UPPER:
            if self.category is None:
                raise ConstraintSchemaError(
                    f"category count on {self.field!r} requires a category"
                )
            if self.bound < 0:
                raise ConstraintSchemaError(
                    f"category count bound on {self.field!r} must be >= 0"
                )
        elif self.category is not None:
            raise ConstraintSchemaError(
                f"sum constraint on {self.field!r} takes no category"
            )


@dataclass
class GridAssignment:
    """Mapping from grid positions to item ids; absent key = unfilled."""

    rows: int
    cols: int
    cells: dict[tuple[int, int], str]

    def __post_init__(self) -> None:
        for row, col in self.cells:
            if not (0 <= row < self.rows and 0 <= col < self.cols):
                raise ConstraintSchemaError(
                    f"cell ({row}, {col}) outside a {self.rows}x{self.cols} grid"
                )

    @property
    def is_full(self) -> bool:
        return len(self.cells) == self.rows * self.cols


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def attrs_satisfy(attrs: Mapping[str, int | str], c: SlotConstraint) -> bool:
    """Evaluate one slot constraint against a bare attribute mapping."""
    if c.field not in attrs:
        raise ConstraintSchemaError(f"unknown field: {c.field!r}")
    actual = attrs[c.field]
    comp = c.comparator
    if comp is Comparator.LE or comp is Comparator.GE:
        if not _is_int(actual):
            raise ConstraintSchemaError(
                f"field {c.field!r} is not numeric; cannot apply {comp.value}"
            )
        return actual <= c.value if comp is Comparator.LE else actual >= c.value
    if comp is Comparator.EQ:
        return actual == c.value
    if comp is Comparator.NE:
        return actual != c.value
    return actual in c.value


def eval_slot(item: "Item", constraints: Iterable[SlotConstraint]) -> bool:
    """True iff the item satisfies every constraint (vacuous truth on none)."""
    for c in constraints:
        if not attrs_satisfy(item.attributes, c):
            return False
    return True


def _global_holds(
    attrs_list: list[Mapping[str, int | str]], g: GlobalConstraint
) -> bool:
    if g.kind is GlobalKind.CATEGORY_COUNT_UPPER:
        count = 0
        for attrs in attrs_list:
            if g.field not in attrs:
                raise ConstraintSchemaError(f"unknown field: {g.field!r}")
            if attrs[g.field] == g.category:
                count += 1
        return count <= g.bound
    total = 0
    for attrs in attrs_list:
        if g.field not in attrs:
            raise ConstraintSchemaError(f"unknown field: {g.field!r}")
        value = attrs[g.field]
        if not _is_int(value):
            raise ConstraintSchemaError(f"field {g.field!r} is not numeric")
        total += value
    if g.kind is GlobalKind.SUM_UPPER:
        return total <= g.bound
    return total >= g.bound


def _resolve(
    assignment: GridAssignment, items: Mapping[str, "Item"]
) -> list[Mapping[str, int | str]]:
    attrs_list = []
    for item_id in assignment.cells.values():
        item = items.get(item_id)
        if item is None:
            raise UnknownItemError(f"unknown item id: {item_id!r}")
        attrs_list.append(item.attributes)
    return attrs_list


def eval_global_full(
    assignment: GridAssignment,
    items: Mapping[str, "Item"],
    constraints: Iterable[GlobalConstraint],
) -> bool:
    """Evaluate every global constraint on a fully filled grid."""
    if not assignment.is_full:
        filled = set(assignment.cells)
        missing = next(
            (r, c)
            for r in range(assignment.rows)
            for c in range(assignment.cols)
            if (r, c) not in filled
        )
        raise IncompleteAssignmentError(f"cell {missing} is unfilled")
    attrs_list = _resolve(assignment, items)
    return all(_global_holds(attrs_list, g) for g in constraints)


def eval_global_open_prefix(
    assignment: GridAssignment,
    items: Mapping[str, "Item"],
    constraints: Iterable[GlobalConstraint],
) -> bool:
    """Evaluate a possibly partial grid.

    While any cell is unfilled only upper-bound kinds are enforced (absent
    cells contribute nothing, and filling them can never undo an
    upper-bound violation). On a full grid this agrees with
    eval_global_full exactly.
    """
    partial = not assignment.is_full
    attrs_list = _resolve(assignment, items)
    for g in constraints:
        if partial and not g.kind.is_upper_bound:
            continue
        if not _global_holds(attrs_list, g):
            return False
    return True


# ---------------------------------------------------------------------------
# Text grammar
# ---------------------------------------------------------------------------

_INT_RE = re.compile(r"-?\d+")
_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_SLOT_OPS = ("<=", ">=", "==", "!=", "in")


def constraint_to_text(c: SlotConstraint | GlobalConstraint) -> str:
    """Render a constraint in the text grammar (inverse of text_to_constraint)."""
    if isinstance(c, GlobalConstraint):
        if c.kind is GlobalKind.SUM_UPPER:
            return f"total {c.field} <= {c.bound}"
        if c.kind is GlobalKind.SUM_LOWER:
            return f"total {c.field} >= {c.bound}"
        return f"at most {c.bound} items with {c.field} = {c.category}"
    if c.comparator is Comparator.IN:
        inner = ", ".join(sorted(c.value))
        return f"{c.field} in [{inner}]"
    return f"{c.field} {c.comparator.value} {c.value}"


class _Cursor:
    """Single-pass reader over constraint text with position reporting."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ConstraintParseError:
        return ConstraintParseError(message, self.pos)

    def skip_spaces(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def literal(self, token: str) -> bool:
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str) -> None:
        if not self.literal(token):
            raise self.error(f"expected {token!r}")

    def word(self, what: str) -> str:
        m = _WORD_RE.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected {what}")
        self.pos = m.end()
        return m.group()

    def integer(self, what: str) -> int:
        m = _INT_RE.match(self.text, self.pos)
        if not m:
            raise self.error(f"expected integer {what}")
        self.pos = m.end()
        return int(m.group())

    def end(self) -> None:
        self.skip_spaces()
        if self.pos != len(self.text):
            raise self.error("unexpected trailing text")


def _parse_value(cur: _Cursor) -> int | str:
    m = _INT_RE.match(cur.text, cur.pos)
    if m and m.end() == len(cur.text):
        cur.pos = m.end()
        return int(m.group())
    return cur.word("value")


def text_to_constraint(text: str) -> SlotConstraint | GlobalConstraint:
    """Parse one constraint; raises ConstraintParseError with a position."""
    cur = _Cursor(text.strip())
    if cur.literal("total "):
        field = cur.word("field name")
        cur.skip_spaces()
        if cur.literal("<="):
            kind = GlobalKind.SUM_UPPER
        elif cur.literal(">="):
            kind = GlobalKind.SUM_LOWER
        else:
            raise cur.error("expected '<=' or '>='")
        cur.skip_spaces()
        bound = cur.integer("bound")
        cur.end()
        return GlobalConstraint(kind=kind, field=field, bound=bound)
    if cur.literal("at most "):
        bound = cur.integer("count")
        cur.expect(" items with ")
        field = cur.word("field name")
        cur.skip_spaces()
        cur.expect("=")
        cur.skip_spaces()
        category = cur.word("category")
        cur.end()
        return GlobalConstraint(
            kind=GlobalKind.CATEGORY_COUNT_UPPER,
            field=field,
            bound=bound,
            category=category,
        )
    field = cur.word("field name")
    cur.skip_spaces()
    for op in _SLOT_OPS:
        if cur.literal(op):
            break
    else:
        raise cur.error("expected comparator (<=, >=, ==, !=, in)")
    comparator = Comparator(op)
    cur.skip_spaces()
    if comparator is Comparator.IN:
        cur.expect("[")
        values = [cur.word("list value")]
        cur.skip_spaces()
        while cur.literal(","):
            cur.skip_spaces()
            values.append(cur.word("list value"))
            cur.skip_spaces()
        cur.expect("]")
        cur.end()
        return SlotConstraint(field, comparator, frozenset(values))
    if comparator in (Comparator.LE, Comparator.GE):
        value: int | str = cur.integer("value")
    else:
        value = _parse_value(cur)
    cur.end()
    return SlotConstraint(field, comparator, value)
