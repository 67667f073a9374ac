"""Shared fixtures: canned generated instances and a small CLI-made suite."""

import pytest

import slotbench as sb
from slotbench.cli import main as cli_main
from slotbench.instance import GenConfig


def generate_pair(domain, h, b, seed, **kwargs):
    return sb.generate(
        GenConfig(domain=domain, hidden_count=h, decoy_budget=b, seed=seed, **kwargs)
    )


@pytest.fixture(scope="session")
def course_b0():
    return generate_pair("course", 5, 0, 7)


@pytest.fixture(scope="session")
def course_b4():
    return generate_pair("course", 5, 4, 7)


@pytest.fixture(scope="session")
def course_b15():
    return generate_pair("course", 5, 15, 7)


@pytest.fixture(scope="session")
def mini_suite(tmp_path_factory):
    """Two-domain, 2x2 (h,b) suite written by the CLI, with manifest."""
    out = tmp_path_factory.mktemp("mini_suite")
    rc = cli_main(
        [
            "generate",
            "--out",
            str(out),
            "--domain",
            "course",
            "--domain",
            "meal",
            "--h",
            "1",
            "--h",
            "3",
            "--b",
            "0",
            "--b",
            "4",
            "--seed",
            "11",
        ]
    )
    assert rc == 0
    return out
