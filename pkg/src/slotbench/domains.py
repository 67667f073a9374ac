"""Item domains: schemas, vocabularies, and pool sampling.

Six planning domains share one structural template: at least three
integer-valued fields and two categorical fields per item, with one
field marked as the primary cost (material for sum upper bounds), one
as the aggregate benefit (material for sum lower bounds), and one
secondary numeric field that can carry an additional upper bound.
Category vocabulary is single-word by construction so the constraint
text grammar round-trips, and none of the vocabulary collides with the
internal candidate-role labels that must never appear in tool output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import ConfigError

DOMAINS = ("course", "shopping", "travel", "workforce", "meal", "pc_build")


@dataclass(frozen=True)
class NumericField:
    name: str
    lo: int
    hi: int


@dataclass(frozen=True)
class CategoricalField:
    name: str
    categories: tuple[str, ...]


@dataclass(frozen=True)
class Item:
    id: str
    name: str
    # excluded from the generated hash: dicts are unhashable, and id alone
    # identifies an item within a pool
    attributes: dict[str, int | str] = field(hash=False)


@dataclass(frozen=True)
class DomainSchema:
    domain: str
    id_prefix: str
    numeric_fields: tuple[NumericField, ...]
    categorical_fields: tuple[CategoricalField, ...]
    cost_field: str        # primary SUM_UPPER material
    aux_cost_field: str    # secondary SUM_UPPER material
    benefit_field: str     # SUM_LOWER material
    category_field: str    # CATEGORY_COUNT_UPPER material
    name_field: str        # categorical field used in display names

    @property
    def field_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.numeric_fields) + tuple(
            f.name for f in self.categorical_fields
        )

    def numeric(self, name: str) -> NumericField:
        for f in self.numeric_fields:
            if f.name == name:
                return f
        raise ConfigError(f"{self.domain} has no numeric field {name!r}")

    def categorical(self, name: str) -> CategoricalField:
        for f in self.categorical_fields:
            if f.name == name:
                return f
        raise ConfigError(f"{self.domain} has no categorical field {name!r}")


_SCHEMAS: dict[str, DomainSchema] = {}


def _register(schema: DomainSchema) -> None:
    _SCHEMAS[schema.domain] = schema


_register(
    DomainSchema(
        domain="course",
        id_prefix="C",
        numeric_fields=(
            NumericField("credits", 1, 6),
            NumericField("price", 50, 999),
            NumericField("difficulty", 1, 5),
            NumericField("workload", 2, 20),
        ),
        categorical_fields=(
            CategoricalField(
                "teacher",
                ("Alvarez", "Bennett", "Chen", "Dubois",
                 "Eriksen", "Fontaine", "Grimaldi", "Hayashi"),
            ),
            CategoricalField(
                "category",
                ("Analysis", "Algebra", "Geometry", "Statistics",
                 "Logic", "Mechanics", "Rhetoric", "Botany"),
            ),
        ),
        cost_field="price",
        aux_cost_field="workload",
        benefit_field="credits",
        category_field="category",
        name_field="category",
    )
)

_register(
    DomainSchema(
        domain="shopping",
        id_prefix="S",
        numeric_fields=(
            NumericField("price", 5, 500),
            NumericField("rating", 1, 10),
            NumericField("weight", 1, 50),
        ),
        categorical_fields=(
            CategoricalField(
                "brand",
                ("Acme", "Borealis", "Cresta", "Dorian",
                 "Everline", "Fairbanks", "Gale", "Harbor"),
            ),
            CategoricalField(
                "category",
                ("Pantry", "Produce", "Dairy", "Bakery",
                 "Frozen", "Beverage", "Snacks", "Household"),
            ),
        ),
        cost_field="price",
        aux_cost_field="weight",
        benefit_field="rating",
        category_field="category",
        name_field="category",
    )
)

_register(
    DomainSchema(
        domain="travel",
        id_prefix="T",
        numeric_fields=(
            NumericField("cost", 20, 800),
            NumericField("duration", 1, 12),
            NumericField("rating", 1, 10),
        ),
        categorical_fields=(
            CategoricalField(
                "region",
                ("Andes", "Baltics", "Cyclades", "Dolomites",
                 "Fjordland", "Kyushu", "Patagonia", "Sahara"),
            ),
            CategoricalField(
                "activity",
                ("Museum", "Trek", "Cruise", "Market",
                 "Temple", "Gallery", "Vineyard", "Safari"),
            ),
        ),
        cost_field="cost",
        aux_cost_field="duration",
        benefit_field="rating",
        category_field="activity",
        name_field="activity",
    )
)

_register(
    DomainSchema(
        domain="workforce",
        id_prefix="W",
        numeric_fields=(
            NumericField("wage", 15, 80),
            NumericField("skill", 1, 10),
            NumericField("hours", 2, 12),
        ),
        categorical_fields=(
            CategoricalField(
                "role",
                ("Welder", "Electrician", "Machinist", "Rigger",
                 "Surveyor", "Painter", "Plumber", "Carpenter"),
            ),
            CategoricalField(
                "shift",
                ("Dawn", "Morning", "Midday", "Afternoon",
                 "Dusk", "Evening", "Night", "Relief"),
            ),
        ),
        cost_field="wage",
        aux_cost_field="hours",
        benefit_field="skill",
        category_field="role",
        name_field="role",
    )
)

_register(
    DomainSchema(
        domain="meal",
        id_prefix="M",
        numeric_fields=(
            NumericField("calories", 100, 900),
            NumericField("protein", 5, 60),
            NumericField("prep_time", 5, 90),
        ),
        categorical_fields=(
            CategoricalField(
                "cuisine",
                ("Levantine", "Sichuan", "Oaxacan", "Provencal",
                 "Punjabi", "Tuscan", "Andalusian", "Hokkaido"),
            ),
            CategoricalField(
                "meal_type",
                ("Breakfast", "Brunch", "Lunch", "Dinner",
                 "Supper", "Snack", "Dessert", "Side"),
            ),
        ),
        cost_field="calories",
        aux_cost_field="prep_time",
        benefit_field="protein",
        category_field="cuisine",
        name_field="cuisine",
    )
)

_register(
    DomainSchema(
        domain="pc_build",
        id_prefix="P",
        numeric_fields=(
            NumericField("price", 20, 1500),
            NumericField("performance", 1, 100),
            NumericField("wattage", 5, 500),
        ),
        categorical_fields=(
            CategoricalField(
                "brand",
                ("Aperture", "Bitforge", "Corelink", "Datavolt",
                 "Embercore", "Fluxline", "Gridworks", "Helios"),
            ),
            CategoricalField(
                "component",
                ("Case", "Cooler", "Motherboard", "Memory",
                 "Storage", "Monitor", "Keyboard", "Chassis"),
            ),
        ),
        cost_field="price",
        aux_cost_field="wattage",
        benefit_field="performance",
        category_field="component",
        name_field="component",
    )
)


def list_domains() -> list[str]:
    """All supported domains in stable order."""
    return list(DOMAINS)


def schema(domain: str) -> DomainSchema:
    try:
        return _SCHEMAS[domain]
    except KeyError:
        raise ConfigError(f"unknown domain: {domain!r}") from None


def sample_pool(domain: str, size: int, rng: random.Random) -> list[Item]:
    """Draw a pool of `size` items with unique ids and uniform attributes."""
    if size < 1:
        raise ConfigError(f"pool size must be >= 1, got {size}")
    sch = schema(domain)
    id_space = range(1, 2 * size + 1)
    numbers = rng.sample(id_space, size)
    pool = []
    for number in numbers:
        attributes: dict[str, int | str] = {}
        for nf in sch.numeric_fields:
            attributes[nf.name] = rng.randint(nf.lo, nf.hi)
        for cf in sch.categorical_fields:
            attributes[cf.name] = rng.choice(cf.categories)
        name = f"{attributes[sch.name_field]} {rng.randint(100, 999)}"
        pool.append(
            Item(id=f"{sch.id_prefix}{number}", name=name, attributes=attributes)
        )
    return pool
