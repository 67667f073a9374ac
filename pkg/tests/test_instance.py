"""Instance and answer-key serialization, config validation, file round-trips."""

import json

import pytest

from slotbench.errors import ConfigError, InstanceFormatError
from slotbench.instance import (
    GenConfig,
    instance_from_doc,
    instance_to_doc,
    key_from_doc,
    key_path_for,
    key_to_doc,
    read_instance,
    read_public,
    write_instance,
)

from conftest import generate_pair


class TestGenConfig:
    def test_defaults_are_valid(self):
        GenConfig(domain="course", hidden_count=5, decoy_budget=0, seed=1).validate()

    def test_unknown_domain(self):
        with pytest.raises(ConfigError):
            GenConfig(domain="nope", hidden_count=1, decoy_budget=0, seed=1).validate()

    def test_hidden_count_bounds(self):
        with pytest.raises(ConfigError):
            GenConfig(domain="course", hidden_count=0, decoy_budget=0, seed=1).validate()
        with pytest.raises(ConfigError):
            GenConfig(domain="course", hidden_count=36, decoy_budget=0, seed=1).validate()

    def test_negative_budget(self):
        with pytest.raises(ConfigError):
            GenConfig(domain="course", hidden_count=1, decoy_budget=-1, seed=1).validate()

    def test_relax_thresholds_must_increase(self):
        with pytest.raises(ConfigError):
            GenConfig(
                domain="course",
                hidden_count=1,
                decoy_budget=0,
                seed=1,
                relax_thresholds=(50, 30, 70),
            ).validate()

    def test_pool_must_cover_grid_and_candidates(self):
        with pytest.raises(ConfigError):
            GenConfig(
                domain="course", hidden_count=1, decoy_budget=0, seed=1, pool_size=40
            ).validate()

    def test_pool_seed_defaults_to_seed(self):
        config = GenConfig(domain="course", hidden_count=1, decoy_budget=0, seed=9)
        assert config.effective_pool_seed == 9
        shared = GenConfig(
            domain="course", hidden_count=1, decoy_budget=0, seed=9, pool_seed=77
        )
        assert shared.effective_pool_seed == 77


class TestDocRoundTrip:
    def test_instance_doc_round_trip(self, course_b15):
        instance, _ = course_b15
        doc = instance_to_doc(instance)
        again = instance_to_doc(instance_from_doc(doc))
        assert doc == again

    def test_key_doc_round_trip(self, course_b15):
        _, key = course_b15
        doc = key_to_doc(key)
        assert key_to_doc(key_from_doc(doc)) == doc

    def test_public_doc_has_no_answer_fields(self, course_b15):
        instance, _ = course_b15
        text = json.dumps(instance_to_doc(instance)).lower()
        for word in ("truth", "decoy", "filter", "allocation"):
            assert word not in text

    def test_doc_lists_constraints_in_text_grammar(self, course_b15):
        instance, _ = course_b15
        doc = instance_to_doc(instance)
        assert all(isinstance(t, str) for t in doc["global_constraints"])
        slot = doc["hidden_slots"][0]
        assert all(isinstance(t, str) for t in slot["constraints"])
        assert len(slot["candidates"]) == instance.k


class TestFiles:
    def test_write_and_read_back(self, tmp_path, course_b4):
        instance, key = course_b4
        path = tmp_path / "inst.json"
        written, key_written = write_instance(instance, key, path)
        assert written == path
        assert key_written == key_path_for(path)
        got_instance, got_key = read_instance(path)
        assert instance_to_doc(got_instance) == instance_to_doc(instance)
        assert key_to_doc(got_key) == key_to_doc(key)

    def test_read_public_ignores_key(self, tmp_path, course_b4):
        instance, key = course_b4
        path = tmp_path / "inst.json"
        write_instance(instance, key, path)
        key_path_for(path).unlink()
        got = read_public(path)
        assert got.h == instance.h

    def test_missing_key_file_is_an_error(self, tmp_path, course_b4):
        instance, key = course_b4
        path = tmp_path / "inst.json"
        write_instance(instance, key, path)
        key_path_for(path).unlink()
        with pytest.raises(InstanceFormatError, match="missing answer key"):
            read_instance(path)

    def test_writes_are_deterministic(self, tmp_path):
        for run in ("a", "b"):
            instance, key = generate_pair("meal", 3, 4, 21)
            write_instance(instance, key, tmp_path / f"{run}.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
        assert (
            key_path_for(tmp_path / "a.json").read_bytes()
            == key_path_for(tmp_path / "b.json").read_bytes()
        )


class TestFormatErrors:
    def test_missing_field_named(self, course_b4):
        instance, _ = course_b4
        doc = instance_to_doc(instance)
        del doc["rows"]
        with pytest.raises(InstanceFormatError, match="rows"):
            instance_from_doc(doc)

    def test_global_constraint_where_slot_expected(self, course_b4):
        instance, _ = course_b4
        doc = instance_to_doc(instance)
        doc["hidden_slots"][0]["constraints"][0] = "total price <= 10"
        with pytest.raises(InstanceFormatError):
            instance_from_doc(doc)

    def test_slot_constraint_where_global_expected(self, course_b4):
        instance, _ = course_b4
        doc = instance_to_doc(instance)
        doc["global_constraints"][0] = "price <= 10"
        with pytest.raises(InstanceFormatError):
            instance_from_doc(doc)

    def test_unparseable_constraint_reports_location(self, course_b4):
        instance, _ = course_b4
        doc = instance_to_doc(instance)
        doc["global_constraints"][0] = "total price < 10"
        with pytest.raises(InstanceFormatError, match="global_constraints"):
            instance_from_doc(doc)

    def test_key_requires_allocations(self, course_b4):
        _, key = course_b4
        doc = key_to_doc(key)
        del doc["allocations"]
        with pytest.raises(InstanceFormatError, match="allocations"):
            key_from_doc(doc)
