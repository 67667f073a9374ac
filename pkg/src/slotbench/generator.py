"""Instance generation: truth grid, constraints, decoys, filters, validation.

The construction guarantees a unique solution. Candidates at each hidden
slot partition into the truth item, decoys (satisfy the slot constraints
but provably break the global constraints), and filters (violate the slot
constraints outright). A decoy is accepted only if placing it at its slot
breaks some global constraint under *every* combination of truth/decoy
choices at previously processed decoy slots, with all remaining slots at
truth. Any full assignment other than the all-truth one therefore either
contains a filter (local violation) or contains a latest decoy whose
acceptance condition it reproduces (global violation).

Decoys are sampled by targeting a sum upper bound: the needed field value
is computed in closed form from the bound, the fixed cells, and the
minimum contribution of prior decoy slots. A soft preference keeps decoys
undetectable in open-prefix states (partial grids seen mid-episode),
relaxed in three levels as sampling attempts accumulate and skipped
entirely for the last decoy slot, where no future truth contribution is
left to hide behind.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass

from .constraints import (
    Comparator,
    GlobalConstraint,
    GlobalKind,
    GridAssignment,
    SlotConstraint,
    eval_global_full,
    eval_slot,
)
from .domains import DomainSchema, Item, sample_pool, schema
from .errors import ConfigError, GenerationError
from .instance import (
    AnswerKey,
    GenConfig,
    HiddenSlot,
    Instance,
    Position,
    ValidationReport,
)
from .seeding import stable_seed

logger = logging.getLogger(__name__)

# Above this many prior combinations decoy_hard_check trusts only the
# (exact, sufficient) per-constraint fast path; within it, enumeration
# makes the check exact in both directions.
ENUMERATION_CAP = 1 << 17

_RESAMPLE_LIMIT = 10
_CONSTRAINT_FORM_RETRIES = 20


@dataclass(frozen=True)
class PriorSlot:
    """A finished decoy slot: what a history may place there."""

    position: Position
    truth: Item
    decoys: tuple[Item, ...]

    @property
    def options(self) -> tuple[Item, ...]:
        return (self.truth,) + self.decoys


def _contrib(g: GlobalConstraint, item: Item) -> int:
    if g.kind is GlobalKind.CATEGORY_COUNT_UPPER:
        return 1 if item.attributes[g.field] == g.category else 0
    value = item.attributes[g.field]
    assert isinstance(value, int)
    return value


def _contrib_sum(g: GlobalConstraint, items: list[Item]) -> int:
    return sum(_contrib(g, item) for item in items)


def _violates(g: GlobalConstraint, total: int) -> bool:
    if g.kind is GlobalKind.SUM_LOWER:
        return total < g.bound
    return total > g.bound


# ---------------------------------------------------------------------------
# Decoy checks
# ---------------------------------------------------------------------------


def decoy_hard_check(
    candidate: Item,
    priors: list[PriorSlot],
    fixed_items: list[Item],
    constraints: tuple[GlobalConstraint, ...],
    enumeration_cap: int = ENUMERATION_CAP,
) -> bool:
    """True iff every prior truth/decoy combination leaves the grid invalid.

    The grid under test is: fixed_items (pre-filled cells plus truth at
    every hidden slot outside the priors and the candidate's own slot),
    one option per prior slot, and the candidate. A single constraint
    violated under its extremal combination is violated under all of
    them, which settles the common case in O(len(priors)); otherwise the
    combination space is enumerated exactly up to enumeration_cap.
    """
    bases = []
    for g in constraints:
        base = _contrib_sum(g, fixed_items) + _contrib(g, candidate)
        bases.append(base)
        if g.kind.is_upper_bound:
            extremal = base + sum(
                min(_contrib(g, o) for o in p.options) for p in priors
            )
        else:
            extremal = base + sum(
                max(_contrib(g, o) for o in p.options) for p in priors
            )
        if _violates(g, extremal):
            return True
    combos = 1
    for p in priors:
        combos *= len(p.options)
    if combos > enumeration_cap:
        return False
    for combo in itertools.product(*(p.options for p in priors)):
        for g, base in zip(constraints, bases):
            if _violates(g, base + _contrib_sum(g, list(combo))):
                break
        else:
            return False  # this combination satisfies every constraint
    return True


def open_prefix_check(
    candidate: Item,
    priors: list[PriorSlot],
    prefilled_items: list[Item],
    constraints: tuple[GlobalConstraint, ...],
    level: int,
) -> bool:
    """Soft preference: candidate stays plausible in partial grids.

    The partial grid holds the pre-filled cells, one item per prior decoy
    slot, and the candidate; all other cells are unfilled, so only
    upper-bound constraints apply. History sets by level (each nested in
    the previous, so a level-1 pass implies level-2 and level-3 passes):

    1. every combination of truth/decoy at prior slots;
    2. a leading run of priors at truth, the rest at any decoy;
    3. all priors at truth.

    Upper-bound sums are monotone in each slot's contribution, so each
    level reduces to a per-constraint extremal sum.
    """
    if level not in (1, 2, 3):
        raise ConfigError(f"relaxation level must be 1, 2, or 3, got {level}")
    for p in priors:
        if not p.decoys:
            raise ConfigError(f"prior slot {p.position} has no decoys")
    for g in constraints:
        if not g.kind.is_upper_bound:
            continue
        base = _contrib_sum(g, prefilled_items) + _contrib(g, candidate)
        if level == 1:
            worst = sum(max(_contrib(g, o) for o in p.options) for p in priors)
        elif level == 3:
            worst = sum(_contrib(g, p.truth) for p in priors)
        else:
            truths = [_contrib(g, p.truth) for p in priors]
            decoy_max = [max(_contrib(g, d) for d in p.decoys) for p in priors]
            m = len(priors)
            suffix = [0] * (m + 1)
            for i in reversed(range(m)):
                suffix[i] = suffix[i + 1] + decoy_max[i]
            worst = suffix[0]
            prefix = 0
            for j in range(1, m + 1):
                prefix += truths[j - 1]
                worst = max(worst, prefix + suffix[j])
        if _violates(g, base + worst):
            return False
    return True


# ---------------------------------------------------------------------------
# Sub-operations
# ---------------------------------------------------------------------------


def sample_truth_grid(
    pool: list[Item], rows: int, cols: int, rng: random.Random
) -> dict[Position, Item]:
    """Distinct items for every cell, drawn uniformly from the pool."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    if len(pool) < len(cells):
        raise ConfigError(
            f"pool of {len(pool)} cannot fill a {rows}x{cols} grid"
        )
    return dict(zip(cells, rng.sample(pool, len(cells))))


def select_hidden_slots(
    rows: int, cols: int, count: int, rng: random.Random
) -> list[Position]:
    """Uniform hidden-slot positions, returned in row-major order."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    if not 1 <= count <= len(cells):
        raise ConfigError(f"hidden count must be in [1, {len(cells)}]")
    return sorted(rng.sample(cells, count))


def select_decoy_slots(
    hidden: list[Position], budget: int, k: int, rng: random.Random
) -> tuple[list[Position], dict[Position, int]]:
    """Choose decoy-carrying slots and split the budget across them.

    Every allocation lies in [1, k-1]; the number of carrying slots is
    uniform between the fewest that capacity allows and min(len(hidden),
    budget).
    """
    if budget == 0:
        return [], {}
    cap = k - 1
    if budget > len(hidden) * cap:
        raise ConfigError(
            f"decoy budget {budget} exceeds capacity {len(hidden) * cap} "
            f"({len(hidden)} slots x {cap})"
        )
    min_slots = max(1, -(-budget // cap))
    max_slots = min(len(hidden), budget)
    n = rng.randint(min_slots, max_slots)
    slots = rng.sample(hidden, n)
    parts = []
    remaining = budget
    for i in range(n):
        left = n - i - 1
        lo = max(1, remaining - left * cap)
        hi = min(cap, remaining - left)
        parts.append(rng.randint(lo, hi))
        remaining -= parts[-1]
    allocations = dict(zip(slots, parts))
    return slots, allocations


def synthesize_slot_constraints(
    truth_item: Item,
    sch: DomainSchema,
    rng: random.Random,
    fields: tuple[str, str] | None = None,
) -> tuple[SlotConstraint, SlotConstraint]:
    """Two truth-satisfying constraints on distinct fields."""
    if fields is None:
        picked = tuple(rng.sample(list(sch.field_names), 2))
    else:
        picked = fields
    return (
        _synthesize_one_constraint(truth_item, sch, picked[0], rng),
        _synthesize_one_constraint(truth_item, sch, picked[1], rng),
    )


def _synthesize_one_constraint(
    truth_item: Item, sch: DomainSchema, field_name: str, rng: random.Random
) -> SlotConstraint:
    value = truth_item.attributes[field_name]
    numeric_names = {nf.name for nf in sch.numeric_fields}
    if field_name in numeric_names:
        nf = sch.numeric(field_name)
        assert isinstance(value, int)
        headroom = nf.hi - value
        floorroom = value - nf.lo
        go_upper = rng.random() < 0.5
        if go_upper and headroom == 0 and floorroom > 0:
            go_upper = False
        elif not go_upper and floorroom == 0 and headroom > 0:
            go_upper = True
        share = rng.uniform(0.15, 0.9)
        if go_upper:
            return SlotConstraint(
                field_name, Comparator.LE, value + int(share * headroom)
            )
        return SlotConstraint(
            field_name, Comparator.GE, value - int(share * floorroom)
        )
    cf = sch.categorical(field_name)
    assert isinstance(value, str)
    others = [c for c in cf.categories if c != value]
    roll = rng.random()
    if roll < 0.4 or not others:
        return SlotConstraint(field_name, Comparator.EQ, value)
    if roll < 0.85:
        extra = rng.sample(others, rng.randint(1, min(3, len(others))))
        return SlotConstraint(field_name, Comparator.IN, frozenset([value] + extra))
    return SlotConstraint(field_name, Comparator.NE, rng.choice(others))


def synthesize_global_constraints(
    truth_items: list[Item], sch: DomainSchema, rng: random.Random
) -> tuple[GlobalConstraint, ...]:
    """One of each kind (two sum upper bounds), all satisfied by the truth.

    Upper-bound slack is kept within both 5% of the truth sum and a
    fraction of the field's per-item range, so one well-chosen item can
    still push the total past the bound.
    """
    constraints = []
    for field_name in (sch.cost_field, sch.aux_cost_field):
        nf = sch.numeric(field_name)
        total = sum(_int_attr(item, field_name) for item in truth_items)
        cap = min(total // 20, max(1, int(0.15 * (nf.hi - nf.lo))))
        slack = rng.randint(0, max(0, cap))
        constraints.append(
            GlobalConstraint(GlobalKind.SUM_UPPER, field_name, total + slack)
        )
    benefit_total = sum(_int_attr(item, sch.benefit_field) for item in truth_items)
    lower_slack = rng.randint(0, max(0, benefit_total // 20))
    constraints.append(
        GlobalConstraint(
            GlobalKind.SUM_LOWER, sch.benefit_field, benefit_total - lower_slack
        )
    )
    cf = sch.categorical(sch.category_field)
    present = sorted({str(item.attributes[cf.name]) for item in truth_items})
    category = rng.choice(present)
    count = sum(1 for item in truth_items if item.attributes[cf.name] == category)
    bound = min(count + rng.randint(0, 2), len(truth_items))
    constraints.append(
        GlobalConstraint(
            GlobalKind.CATEGORY_COUNT_UPPER, cf.name, bound, category=category
        )
    )
    return tuple(constraints)


def _int_attr(item: Item, field_name: str) -> int:
    value = item.attributes[field_name]
    assert isinstance(value, int)
    return value


def collect_filter_candidates(
    pool: list[Item],
    slot_constraints: tuple[SlotConstraint, ...],
    need: int,
    rng: random.Random,
    exclude: set[str],
) -> list[Item]:
    """`need` distinct items that violate the slot constraints."""
    violating = [
        item
        for item in pool
        if item.id not in exclude and not eval_slot(item, slot_constraints)
    ]
    if len(violating) < need:
        raise GenerationError(
            f"only {len(violating)} items violate the slot constraints, need {need}"
        )
    return rng.sample(violating, need)


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def generate(config: GenConfig) -> tuple[Instance, AnswerKey]:
    """Generate and validate one instance; pure function of the config."""
    config.validate()
    last_error: GenerationError | None = None
    for attempt in range(_RESAMPLE_LIMIT):
        sub_seed = (
            config.seed
            if attempt == 0
            else stable_seed("resample", config.seed, attempt)
        )
        try:
            instance, key = _generate_once(config, sub_seed)
        except GenerationError as exc:
            logger.debug("resampling %s (attempt %d): %s", config.domain, attempt, exc)
            last_error = exc
            continue
        report = validate(instance, key)
        if not report.passed:
            raise GenerationError(
                "generated instance failed validation: "
                + "; ".join(report.failures)
            )
        return instance, key
    raise GenerationError(
        f"generation failed after {_RESAMPLE_LIMIT} resamples: {last_error}",
        slot=last_error.slot if last_error else None,
    )


def _usable_slot_constraints(
    truth_item: Item,
    sch: DomainSchema,
    rng: random.Random,
    fields: tuple[str, str],
    pool: list[Item],
    k: int,
) -> tuple[SlotConstraint, SlotConstraint]:
    """Synthesize constraints under which filters and decoys both exist.

    Requires at least k pool items on each side (satisfying / violating).
    Values are resampled first; fields are swapped out only as a last
    resort so the per-instance field rotation keeps its attribute span.
    """
    chosen = fields
    for attempt in range(_CONSTRAINT_FORM_RETRIES):
        if attempt >= 12:
            chosen = tuple(rng.sample(list(sch.field_names), 2))
        constraints = synthesize_slot_constraints(truth_item, sch, rng, chosen)
        satisfying = 0
        violating = 0
        for item in pool:
            if eval_slot(item, constraints):
                satisfying += 1
            else:
                violating += 1
            if satisfying >= k and violating >= k:
                return constraints
    raise GenerationError(
        f"no usable slot-constraint pair found for fields {fields}"
    )


def _generate_once(config: GenConfig, seed: int) -> tuple[Instance, AnswerKey]:
    rng = random.Random(seed)
    sch = schema(config.domain)
    pool = sample_pool(
        config.domain, config.pool_size, random.Random(config.effective_pool_seed)
    )
    k = config.candidates_per_slot
    truth_grid = sample_truth_grid(pool, config.rows, config.cols, rng)
    hidden_positions = select_hidden_slots(
        config.rows, config.cols, config.hidden_count, rng
    )
    hidden_set = set(hidden_positions)

    # Per-instance field rotation spreads constrained attributes across
    # slots (>= 4 distinct fields once there are >= 2 slots).
    rotation = list(sch.field_names)
    rng.shuffle(rotation)
    n_fields = len(rotation)
    slot_constraints: dict[Position, tuple[SlotConstraint, SlotConstraint]] = {}
    for i, pos in enumerate(hidden_positions):
        pair = (rotation[(2 * i) % n_fields], rotation[(2 * i + 1) % n_fields])
        slot_constraints[pos] = _usable_slot_constraints(
            truth_grid[pos], sch, rng, pair, pool, k
        )

    truth_items = [truth_grid[pos] for pos in sorted(truth_grid)]
    global_constraints = synthesize_global_constraints(truth_items, sch, rng)

    # Total budget capped by per-slot capacity; the requested value is
    # still echoed in the instance for reporting coordinates.
    effective_budget = min(config.decoy_budget, config.hidden_count * (k - 1))
    decoy_slots, allocations = select_decoy_slots(
        hidden_positions, effective_budget, k, rng
    )
    order = sorted(decoy_slots, key=lambda pos: (-allocations[pos], pos))
    order += sorted(pos for pos in hidden_positions if pos not in allocations)

    prefilled_items = [
        truth_grid[pos] for pos in sorted(truth_grid) if pos not in hidden_set
    ]
    priors: list[PriorSlot] = []
    decoys: dict[Position, list[Item]] = {}
    filters: dict[Position, list[Item]] = {}
    candidates: dict[Position, list[str]] = {}

    for idx, pos in enumerate(order):
        truth_item = truth_grid[pos]
        constraints = slot_constraints[pos]
        allocation = allocations.get(pos, 0)
        accepted: list[Item] = []
        if allocation:
            is_last_decoy_slot = idx == len(decoy_slots) - 1
            prior_positions = {p.position for p in priors}
            future_truths = [
                truth_grid[p]
                for p in hidden_positions
                if p != pos and p not in prior_positions
            ]
            fixed_items = prefilled_items + future_truths
            accepted = _sample_slot_decoys(
                allocation=allocation,
                truth_item=truth_item,
                constraints=constraints,
                pool=pool,
                priors=priors,
                fixed_items=fixed_items,
                prefilled_items=prefilled_items,
                global_constraints=global_constraints,
                config=config,
                rng=rng,
                is_last_decoy_slot=is_last_decoy_slot,
                position=pos,
            )
            priors.append(PriorSlot(pos, truth_item, tuple(accepted)))
        decoys[pos] = accepted
        need = k - 1 - len(accepted)
        exclude = {truth_item.id}
        try:
            filter_items = collect_filter_candidates(
                pool, constraints, need, rng, exclude
            )
        except GenerationError as exc:
            raise GenerationError(f"slot {pos}: {exc}", slot=pos) from None
        filters[pos] = filter_items
        ids = (
            [truth_item.id]
            + [d.id for d in accepted]
            + [f.id for f in filter_items]
        )
        rng.shuffle(ids)
        candidates[pos] = ids

    referenced = {item.id: item for item in prefilled_items}
    for pos in hidden_positions:
        for item_id in candidates[pos]:
            referenced.setdefault(item_id, _pool_item(pool, item_id))

    hidden_slots = tuple(
        HiddenSlot(
            row=pos[0],
            col=pos[1],
            constraints=slot_constraints[pos],
            candidates=tuple(candidates[pos]),
            query_budget=config.query_budget,
        )
        for pos in hidden_positions
    )
    instance = Instance(
        domain=config.domain,
        rows=config.rows,
        cols=config.cols,
        h=config.hidden_count,
        b=config.decoy_budget,
        k=k,
        seed=config.seed,
        prefilled={
            pos: truth_grid[pos].id
            for pos in sorted(truth_grid)
            if pos not in hidden_set
        },
        hidden=hidden_slots,
        global_constraints=global_constraints,
        items=dict(sorted(referenced.items())),
        global_check_budget=config.global_check_budget,
    )
    key = AnswerKey(
        truth={pos: truth_grid[pos].id for pos in hidden_positions},
        decoys={pos: [d.id for d in decoys[pos]] for pos in hidden_positions},
        filters={pos: [f.id for f in filters[pos]] for pos in hidden_positions},
        allocations=dict(allocations),
    )
    return instance, key


def _pool_item(pool: list[Item], item_id: str) -> Item:
    for item in pool:
        if item.id == item_id:
            return item
    raise GenerationError(f"item {item_id} missing from pool")


def _sample_slot_decoys(
    allocation: int,
    truth_item: Item,
    constraints: tuple[SlotConstraint, SlotConstraint],
    pool: list[Item],
    priors: list[PriorSlot],
    fixed_items: list[Item],
    prefilled_items: list[Item],
    global_constraints: tuple[GlobalConstraint, ...],
    config: GenConfig,
    rng: random.Random,
    is_last_decoy_slot: bool,
    position: Position,
) -> list[Item]:
    locally_valid = [
        item
        for item in pool
        if item.id != truth_item.id and eval_slot(item, constraints)
    ]
    sum_uppers = [
        g for g in global_constraints if g.kind is GlobalKind.SUM_UPPER
    ]
    # Threshold per sum upper bound: candidate field values above it break
    # the bound under every prior combination (minimum prior contribution).
    targeted: dict[int, list[Item]] = {}
    for gi, g in enumerate(sum_uppers):
        floor = _contrib_sum(g, fixed_items) + sum(
            min(_contrib(g, o) for o in p.options) for p in priors
        )
        threshold = g.bound - floor
        targeted[gi] = [
            item
            for item in locally_valid
            if _contrib(g, item) > threshold
        ]
    t1, t2, t3 = config.relax_thresholds
    used = {truth_item.id}
    accepted: list[Item] = []
    for j in range(allocation):
        found: Item | None = None
        for attempt in range(1, config.max_retries + 1):
            candidate: Item | None = None
            for gi in rng.sample(range(len(sum_uppers)), len(sum_uppers)):
                available = [it for it in targeted[gi] if it.id not in used]
                if available:
                    candidate = rng.choice(available)
                    break
            if candidate is None:
                available = [it for it in locally_valid if it.id not in used]
                if not available:
                    break
                candidate = rng.choice(available)
            if not decoy_hard_check(
                candidate, priors, fixed_items, global_constraints
            ):
                continue
            if not is_last_decoy_slot:
                if attempt <= t1:
                    level = 1
                elif attempt <= t2:
                    level = 2
                elif attempt <= t3:
                    level = 3
                else:
                    level = 0
                if level and not open_prefix_check(
                    candidate, priors, prefilled_items, global_constraints, level
                ):
                    continue
            found = candidate
            break
        if found is None:
            raise GenerationError(
                f"slot {position}: no acceptable decoy "
                f"({j}/{allocation} placed, {config.max_retries} attempts)",
                slot=position,
            )
        accepted.append(found)
        used.add(found.id)
    return accepted


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(instance: Instance, key: AnswerKey) -> ValidationReport:
    """Re-derive the three structural guarantees from scratch.

    (1) the truth assignment satisfies every slot and global constraint;
    (2) each hidden slot has exactly k candidates partitioned into
        truth/decoys/filters per the key, decoys satisfying and filters
        violating the slot constraints;
    (3) every decoy passes the hard check against the prior slots implied
        by the key's allocations.
    """
    failures: list[str] = []
    truth_ok = _check_truth(instance, key, failures)
    partition_ok = _check_partition(instance, key, failures)
    decoy_ok = _check_decoys(instance, key, failures) if partition_ok else False
    return ValidationReport(
        truth_ok=truth_ok,
        partition_ok=partition_ok,
        decoy_ok=decoy_ok,
        failures=failures,
    )


def _check_truth(instance: Instance, key: AnswerKey, failures: list[str]) -> bool:
    ok = True
    cells = dict(instance.prefilled)
    for slot in instance.hidden:
        truth_id = key.truth.get(slot.position)
        if truth_id is None:
            failures.append(f"slot {slot.position}: no truth entry in key")
            ok = False
            continue
        item = instance.items.get(truth_id)
        if item is None:
            failures.append(f"slot {slot.position}: truth {truth_id} unresolvable")
            ok = False
            continue
        if not eval_slot(item, slot.constraints):
            failures.append(
                f"slot {slot.position}: truth {truth_id} violates slot constraints"
            )
            ok = False
        cells[slot.position] = truth_id
    if len(cells) != instance.rows * instance.cols:
        failures.append("truth assignment does not fill the grid")
        return False
    grid = GridAssignment(instance.rows, instance.cols, cells)
    if not eval_global_full(grid, instance.items, instance.global_constraints):
        failures.append("truth assignment violates global constraints")
        ok = False
    return ok


def _check_partition(
    instance: Instance, key: AnswerKey, failures: list[str]
) -> bool:
    ok = True
    for slot in instance.hidden:
        pos = slot.position
        truth_id = key.truth.get(pos)
        decoy_ids = key.decoys.get(pos, [])
        filter_ids = key.filters.get(pos, [])
        if len(slot.candidates) != instance.k:
            failures.append(
                f"slot {pos}: {len(slot.candidates)} candidates, expected {instance.k}"
            )
            ok = False
        labeled = [truth_id] + list(decoy_ids) + list(filter_ids)
        if len(set(labeled)) != len(labeled):
            failures.append(f"slot {pos}: truth/decoy/filter labels overlap")
            ok = False
        if set(labeled) != set(slot.candidates) or len(labeled) != len(
            slot.candidates
        ):
            failures.append(f"slot {pos}: labels do not partition the candidates")
            ok = False
            continue
        if len(decoy_ids) != key.allocations.get(pos, 0):
            failures.append(f"slot {pos}: decoy count differs from allocation")
            ok = False
        for item_id in decoy_ids:
            item = instance.items.get(item_id)
            if item is None or not eval_slot(item, slot.constraints):
                failures.append(
                    f"slot {pos}: decoy {item_id} fails the slot constraints"
                )
                ok = False
        for item_id in filter_ids:
            item = instance.items.get(item_id)
            if item is None or eval_slot(item, slot.constraints):
                failures.append(
                    f"slot {pos}: filter {item_id} satisfies the slot constraints"
                )
                ok = False
    return ok


def _check_decoys(instance: Instance, key: AnswerKey, failures: list[str]) -> bool:
    ok = True
    hidden_positions = [slot.position for slot in instance.hidden]
    decoy_order = sorted(
        (pos for pos, count in key.allocations.items() if count > 0),
        key=lambda pos: (-key.allocations[pos], pos),
    )
    prefilled_items = [instance.items[i] for i in instance.prefilled.values()]
    priors: list[PriorSlot] = []
    for pos in decoy_order:
        prior_positions = {p.position for p in priors}
        future_truths = [
            instance.items[key.truth[p]]
            for p in hidden_positions
            if p != pos and p not in prior_positions
        ]
        fixed_items = prefilled_items + future_truths
        truth_item = instance.items[key.truth[pos]]
        decoy_items = tuple(instance.items[i] for i in key.decoys.get(pos, []))
        for decoy in decoy_items:
            if not decoy_hard_check(
                decoy, priors, fixed_items, instance.global_constraints
            ):
                failures.append(
                    f"slot {pos}: decoy {decoy.id} fails the hard check"
                )
                ok = False
        priors.append(PriorSlot(pos, truth_item, decoy_items))
    return ok
