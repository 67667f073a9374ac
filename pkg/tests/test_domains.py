"""Domain schemas and pool sampling."""

import random
import re

import pytest

from slotbench.domains import DOMAINS, list_domains, sample_pool, schema
from slotbench.errors import ConfigError

FORBIDDEN_WORDS = ("truth", "decoy", "filter")


def test_domain_list_is_fixed():
    assert DOMAINS == ("course", "shopping", "travel", "workforce", "meal", "pc_build")
    assert list_domains() == list(DOMAINS)


def test_unknown_domain_rejected():
    with pytest.raises(ConfigError):
        schema("banking")


def test_course_schema_fields():
    sch = schema("course")
    assert set(sch.field_names) == {
        "credits", "price", "difficulty", "workload", "teacher", "category",
    }
    assert sch.cost_field == "price"
    assert sch.benefit_field == "credits"


@pytest.mark.parametrize("domain", DOMAINS)
def test_schema_shape(domain):
    sch = schema(domain)
    assert len(sch.numeric_fields) >= 3
    assert len(sch.categorical_fields) >= 2
    assert sch.cost_field != sch.aux_cost_field
    numeric_names = {f.name for f in sch.numeric_fields}
    assert {sch.cost_field, sch.aux_cost_field, sch.benefit_field} <= numeric_names
    assert sch.category_field in {f.name for f in sch.categorical_fields}
    for f in sch.numeric_fields:
        assert f.lo < f.hi


@pytest.mark.parametrize("domain", DOMAINS)
def test_pool_items_match_schema(domain):
    sch = schema(domain)
    pool = sample_pool(domain, 300, random.Random(3))
    assert len(pool) == 300
    assert len({item.id for item in pool}) == 300
    id_pattern = re.compile(rf"^{sch.id_prefix}\d+$")
    for item in pool:
        assert id_pattern.match(item.id)
        assert set(item.attributes) == set(sch.field_names)
        for f in sch.numeric_fields:
            assert f.lo <= item.attributes[f.name] <= f.hi
        for f in sch.categorical_fields:
            assert item.attributes[f.name] in f.categories


def test_pool_sampling_is_deterministic():
    a = sample_pool("travel", 50, random.Random(12))
    b = sample_pool("travel", 50, random.Random(12))
    assert a == b
    c = sample_pool("travel", 50, random.Random(13))
    assert a != c


@pytest.mark.parametrize("domain", DOMAINS)
def test_vocabulary_avoids_role_labels(domain):
    """Item ids, names, fields, and categories feed tool results verbatim,
    so none may contain the internal candidate-role words."""
    sch = schema(domain)
    texts = list(sch.field_names) + [domain]
    for f in sch.categorical_fields:
        texts.extend(f.categories)
    for item in sample_pool(domain, 100, random.Random(5)):
        texts.extend([item.id, item.name])
        texts.extend(str(v) for v in item.attributes.values())
    blob = " ".join(texts).lower()
    for word in FORBIDDEN_WORDS:
        assert word not in blob
