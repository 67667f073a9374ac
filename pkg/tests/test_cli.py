"""End-to-end CLI behavior: subcommands, filters, exit codes."""

import json
import shutil

import pytest

from slotbench.cli import main
from slotbench.harness import read_records
from slotbench.reporting import BY_DOMAIN_CSV, HEATMAP_CSV, SUMMARY_CSV


class TestGenerate:
    def test_manifest_shape(self, mini_suite):
        manifest = json.loads((mini_suite / "manifest.json").read_text())
        assert manifest["seed"] == 11
        assert (manifest["rows"], manifest["cols"], manifest["k"]) == (5, 7, 25)
        assert len(manifest["instances"]) == 8
        assert "failures" not in manifest
        assert manifest["instances"][0] == "course/h01_b00.json"
        for rel in manifest["instances"]:
            assert (mini_suite / rel).exists()
            assert (mini_suite / (rel[: -len(".json")] + ".key.json")).exists()

    def test_generation_failure_is_reported(self, tmp_path, capsys):
        rc = main(
            [
                "generate",
                "--out",
                str(tmp_path),
                "--domain",
                "meal",
                "--h",
                "1",
                "--b",
                "0",
                "--rows",
                "2",
                "--cols",
                "2",
                "--pool-size",
                "30",
                "--seed",
                "8",
            ]
        )
        assert rc == 1
        assert "FAILED meal h=1 b=0" in capsys.readouterr().err
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["instances"] == []
        assert manifest["failures"][0]["domain"] == "meal"


class TestValidate:
    def test_clean_suite_passes(self, mini_suite, capsys):
        assert main(["validate", str(mini_suite)]) == 0
        assert "validated 8 instances, 0 failures" in capsys.readouterr().out

    def test_corrupted_instance_is_named(self, mini_suite, tmp_path, capsys):
        suite = tmp_path / "suite"
        shutil.copytree(mini_suite, suite)
        victim = suite / "course" / "h03_b04.json"
        doc = json.loads(victim.read_text())
        field = doc["global_constraints"][0].split()[1]
        doc["global_constraints"][0] = f"total {field} <= 99999999"
        victim.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        assert main(["validate", str(suite)]) == 1
        out = capsys.readouterr().out
        assert f"FAIL {victim}" in out
        assert "validated 8 instances, 1 failures" in out

    def test_manifest_file_as_argument(self, mini_suite, capsys):
        assert main(["validate", str(mini_suite / "manifest.json")]) == 0
        assert "0 failures" in capsys.readouterr().out

    def test_directory_without_manifest_uses_discovery(self, mini_suite, tmp_path, capsys):
        loose = tmp_path / "loose"
        (loose / "course").mkdir(parents=True)
        for name in ("h01_b00.json", "h01_b00.key.json"):
            shutil.copy(mini_suite / "course" / name, loose / "course" / name)
        assert main(["validate", str(loose)]) == 0
        assert "validated 1 instances" in capsys.readouterr().out

    def test_missing_suite_is_a_config_error(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "nope")]) == 2
        assert "no suite found" in capsys.readouterr().err


class TestRun:
    def test_oracle_wins_the_mini_suite(self, mini_suite, tmp_path, capsys):
        out = tmp_path / "records.jsonl"
        rc = main(["run", str(mini_suite), "--agent", "oracle", "--out", str(out)])
        assert rc == 0
        assert "mean reward 1.000" in capsys.readouterr().out
        records = read_records(out)
        assert len(records) == 8
        assert all(r.reward == 1 for r in records)

    def test_random_runs_are_reproducible(self, mini_suite, tmp_path):
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            rc = main(
                [
                    "run",
                    str(mini_suite),
                    "--agent",
                    "random",
                    "--seed",
                    "3",
                    "--out",
                    str(out),
                ]
            )
            assert rc == 0
            outs.append(
                [
                    (r.instance_path, r.episode_seed, r.reward, r.steps)
                    for r in read_records(out)
                ]
            )
        assert outs[0] == outs[1]

    def test_filters_restrict_the_run(self, mini_suite, tmp_path):
        out = tmp_path / "records.jsonl"
        rc = main(
            [
                "run",
                str(mini_suite),
                "--agent",
                "oracle",
                "--domain",
                "course",
                "--h",
                "1",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        records = read_records(out)
        assert len(records) == 2  # two b values survive the filter
        assert all(r.domain == "course" and r.h == 1 for r in records)

    def test_unmatched_filter_is_a_config_error(self, mini_suite, tmp_path, capsys):
        rc = main(
            [
                "run",
                str(mini_suite),
                "--agent",
                "oracle",
                "--h",
                "9",
                "--out",
                str(tmp_path / "r.jsonl"),
            ]
        )
        assert rc == 2
        assert "no instances match" in capsys.readouterr().err

    def test_episodes_per_instance_groups_repeats(self, mini_suite, tmp_path):
        out = tmp_path / "records.jsonl"
        rc = main(
            [
                "run",
                str(mini_suite),
                "--agent",
                "random",
                "--domain",
                "meal",
                "--h",
                "1",
                "--b",
                "0",
                "--episodes-per-instance",
                "3",
                "--out",
                str(out),
            ]
        )
        assert rc == 0
        records = read_records(out)
        assert len(records) == 3
        assert len({r.instance_path for r in records}) == 1
        assert len({r.episode_seed for r in records}) == 3

    def test_endpoint_needs_url_and_model(self, mini_suite, tmp_path, capsys):
        rc = main(
            [
                "run",
                str(mini_suite),
                "--agent",
                "endpoint",
                "--out",
                str(tmp_path / "r.jsonl"),
            ]
        )
        assert rc == 2
        assert "--endpoint-url" in capsys.readouterr().err

    def test_transcripts_created_when_requested(self, mini_suite, tmp_path):
        out_dir = tmp_path / "transcripts"
        rc = main(
            [
                "run",
                str(mini_suite),
                "--agent",
                "oracle",
                "--domain",
                "meal",
                "--out",
                str(tmp_path / "r.jsonl"),
                "--transcript-dir",
                str(out_dir),
            ]
        )
        assert rc == 0
        assert len(list(out_dir.glob("ep*.json"))) == 4


class TestReport:
    @pytest.fixture()
    def records_file(self, mini_suite, tmp_path):
        out = tmp_path / "records.jsonl"
        assert main(["run", str(mini_suite), "--agent", "oracle", "--out", str(out)]) == 0
        return out

    def test_writes_three_tables(self, records_file, tmp_path, capsys):
        report_dir = tmp_path / "report"
        rc = main(["report", str(records_file), "--out", str(report_dir)])
        assert rc == 0
        for name in (BY_DOMAIN_CSV, HEATMAP_CSV, SUMMARY_CSV):
            assert (report_dir / name).exists()
        heatmap = (report_dir / HEATMAP_CSV).read_text().splitlines()
        assert heatmap[0] == "h,0,4"
        assert heatmap[1] == "1,100.0,100.0"
        assert heatmap[2] == "3,100.0,100.0"

    def test_multiple_records_files_concatenate(self, records_file, tmp_path):
        report_dir = tmp_path / "report2"
        rc = main(
            ["report", str(records_file), str(records_file), "--out", str(report_dir)]
        )
        assert rc == 0
        summary = (report_dir / SUMMARY_CSV).read_text().splitlines()[1]
        assert summary.startswith("16,100.0")

    def test_empty_records_file_fails(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(["report", str(empty)]) == 1
        assert "no records" in capsys.readouterr().err

    def test_missing_records_file_is_config_error(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "ghost.jsonl")]) == 2
        assert "cannot read records file" in capsys.readouterr().err


class TestArgumentErrors:
    def test_unknown_subcommand_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["mystery"])
        assert excinfo.value.code == 2

    def test_missing_required_argument_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["validate"])
        assert excinfo.value.code == 2

    def test_bad_domain_choice_exits_two(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["generate", "--domain", "astrology"])
        assert excinfo.value.code == 2
