"""Command-line surface: generate, validate, run, report.

Exit codes: 0 success, 1 validation or generation failure, 2
configuration error (argparse argument errors also exit 2).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import generator
from .client import ChatCompletionsClient, EndpointAgent, EndpointConfig
from .domains import DOMAINS
from .environment import tool_catalog
from .errors import ConfigError, EndpointError, SlotbenchError
from .harness import (
    RunLimits,
    read_records,
    run_suite,
    scripted_agent_factory,
    system_prompt,
    write_records,
)
from .instance import (
    KEY_SUFFIX,
    DEFAULT_CANDIDATES,
    DEFAULT_COLS,
    DEFAULT_GLOBAL_CHECK_BUDGET,
    DEFAULT_POOL_SIZE,
    DEFAULT_QUERY_BUDGET,
    DEFAULT_ROWS,
    GenConfig,
    read_instance,
    write_instance,
)
from .reporting import aggregate, write_report_files
from .seeding import stable_seed

DEFAULT_H_VALUES = (1, 5, 7, 11, 15, 21)
DEFAULT_B_VALUES = (0, 2, 4, 8, 10, 15, 19, 21, 25)
MANIFEST_NAME = "manifest.json"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slotbench",
        description="Generate, validate, run, and report grid-completion task suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate an instance suite")
    gen.add_argument("--out", default="suite", help="output directory")
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument(
        "--domain",
        action="append",
        choices=DOMAINS,
        help="domain to include (repeatable; default: all)",
    )
    gen.add_argument(
        "--h", action="append", type=int, help="hidden-slot count (repeatable)"
    )
    gen.add_argument(
        "--b", action="append", type=int, help="decoy budget (repeatable)"
    )
    gen.add_argument("--k", type=int, default=DEFAULT_CANDIDATES)
    gen.add_argument("--rows", type=int, default=DEFAULT_ROWS)
    gen.add_argument("--cols", type=int, default=DEFAULT_COLS)
    gen.add_argument("--pool-size", type=int, default=DEFAULT_POOL_SIZE)
    gen.add_argument("--query-budget", type=int, default=DEFAULT_QUERY_BUDGET)
    gen.add_argument(
        "--global-check-budget", type=int, default=DEFAULT_GLOBAL_CHECK_BUDGET
    )

    val = sub.add_parser("validate", help="validate every instance in a directory")
    val.add_argument("suite", help="suite directory or manifest file")

    run = sub.add_parser("run", help="run an agent over a suite")
    run.add_argument("suite", help="suite directory or manifest file")
    run.add_argument(
        "--agent",
        default="oracle",
        choices=("oracle", "random", "endpoint"),
        help="scripted agent or a chat-completions endpoint",
    )
    run.add_argument("--out", default="records.jsonl", help="records output file")
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--fail-rate", type=float, default=0.0)
    run.add_argument("--max-steps", type=int, default=600)
    run.add_argument("--max-output-tokens", type=int, default=16384)
    run.add_argument("--max-token-overflows", type=int, default=3)
    run.add_argument("--parallelism", type=int, default=64)
    run.add_argument(
        "--episodes-per-instance",
        type=int,
        default=1,
        help="repeat each instance this many times with distinct seeds",
    )
    run.add_argument("--transcript-dir", default="", help="write one JSON per episode")
    run.add_argument("--domain", action="append", choices=DOMAINS)
    run.add_argument("--h", action="append", type=int)
    run.add_argument("--b", action="append", type=int)
    run.add_argument("--endpoint-url", default="")
    run.add_argument("--model", default="")
    run.add_argument("--api-key-env", default="")
    run.add_argument("--temperature", type=float, default=0.0)

    rep = sub.add_parser("report", help="aggregate records into CSV tables")
    rep.add_argument("records", nargs="+", help="records files (JSON lines)")
    rep.add_argument("--out", default="report", help="output directory")
    return parser


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def _cmd_generate(args: argparse.Namespace) -> int:
    domains = tuple(dict.fromkeys(args.domain)) if args.domain else DOMAINS
    h_values = tuple(dict.fromkeys(args.h)) if args.h else DEFAULT_H_VALUES
    b_values = tuple(dict.fromkeys(args.b)) if args.b else DEFAULT_B_VALUES
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    written: list[str] = []
    failures: list[dict] = []
    for domain in domains:
        pool_seed = stable_seed(args.seed, domain, "pool")
        (out / domain).mkdir(exist_ok=True)
        for h in h_values:
            for b in b_values:
                config = GenConfig(
                    domain=domain,
                    hidden_count=h,
                    decoy_budget=b,
                    rows=args.rows,
                    cols=args.cols,
                    candidates_per_slot=args.k,
                    seed=stable_seed(args.seed, domain, h, b),
                    pool_size=args.pool_size,
                    pool_seed=pool_seed,
                    query_budget=args.query_budget,
                    global_check_budget=args.global_check_budget,
                )
                relpath = f"{domain}/h{h:02d}_b{b:02d}.json"
                try:
                    instance, key = generator.generate(config)
                except SlotbenchError as exc:
                    failures.append(
                        {"domain": domain, "h": h, "b": b, "error": str(exc)}
                    )
                    continue
                write_instance(instance, key, out / relpath)
                written.append(relpath)
        print(f"{domain}: {len([p for p in written if p.startswith(domain + '/')])} instances")
    manifest = {
        "seed": args.seed,
        "rows": args.rows,
        "cols": args.cols,
        "k": args.k,
        "instances": written,
    }
    if failures:
        manifest["failures"] = failures
    with open(out / MANIFEST_NAME, "w") as handle:
        json.dump(manifest, handle, sort_keys=True, indent=2)
        handle.write("\n")
    elapsed = time.perf_counter() - start
    print(f"wrote {len(written)} instances to {out} in {elapsed:.1f}s")
    if failures:
        for failure in failures:
            print(
                f"FAILED {failure['domain']} h={failure['h']} b={failure['b']}: "
                f"{failure['error']}",
                file=sys.stderr,
            )
        return 1
    return 0


# ---------------------------------------------------------------------------
# suite discovery shared by validate/run
# ---------------------------------------------------------------------------


def _suite_paths(suite: str) -> list[str]:
    root = Path(suite)
    if root.is_file():
        with open(root) as handle:
            manifest = json.load(handle)
        base = root.parent
        return [str(base / rel) for rel in manifest["instances"]]
    if root.is_dir():
        manifest = root / MANIFEST_NAME
        if manifest.exists():
            return _suite_paths(str(manifest))
        paths = [
            str(path)
            for path in sorted(root.rglob("*.json"))
            if not path.name.endswith(KEY_SUFFIX) and path.name != MANIFEST_NAME
        ]
        if paths:
            return paths
    raise ConfigError(f"no suite found at {suite}")


def _cmd_validate(args: argparse.Namespace) -> int:
    paths = _suite_paths(args.suite)
    bad = 0
    for path in paths:
        try:
            instance, key = read_instance(path)
            report = generator.validate(instance, key)
        except SlotbenchError as exc:
            print(f"FAIL {path}: {exc}")
            bad += 1
            continue
        if not report.passed:
            for failure in report.failures:
                print(f"FAIL {path}: {failure}")
            bad += 1
    print(f"validated {len(paths)} instances, {bad} failures")
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def _filter_paths(
    paths: list[str],
    domains: tuple[str, ...] | None,
    h_values: tuple[int, ...] | None,
    b_values: tuple[int, ...] | None,
) -> list[str]:
    if not (domains or h_values or b_values):
        return paths
    kept = []
    for path in paths:
        doc = json.loads(Path(path).read_text())
        if domains and doc["domain"] not in domains:
            continue
        if h_values and doc["h"] not in h_values:
            continue
        if b_values and doc["b"] not in b_values:
            continue
        kept.append(path)
    return kept


def _endpoint_factory(args: argparse.Namespace):
    if not args.endpoint_url or not args.model:
        raise ConfigError("--agent endpoint requires --endpoint-url and --model")
    config = EndpointConfig(
        url=args.endpoint_url,
        model=args.model,
        api_key_env=args.api_key_env,
        temperature=args.temperature,
        max_output_tokens=args.max_output_tokens,
    )
    client = ChatCompletionsClient(config)

    def factory(instance, seed):
        return EndpointAgent(client, system_prompt(instance), tool_catalog(instance))

    return factory


def _cmd_run(args: argparse.Namespace) -> int:
    paths = _suite_paths(args.suite)
    paths = _filter_paths(
        paths,
        tuple(args.domain) if args.domain else None,
        tuple(args.h) if args.h else None,
        tuple(args.b) if args.b else None,
    )
    if not paths:
        raise ConfigError("no instances match the given filters")
    if args.episodes_per_instance < 1:
        raise ConfigError("--episodes-per-instance must be positive")
    paths = [path for path in paths for _ in range(args.episodes_per_instance)]
    limits = RunLimits(
        max_steps=args.max_steps,
        max_output_tokens=args.max_output_tokens,
        max_token_overflows=args.max_token_overflows,
        parallelism=args.parallelism,
    )
    if args.agent == "endpoint":
        factory = _endpoint_factory(args)
    else:
        factory = scripted_agent_factory(args.agent)
    records = run_suite(
        paths,
        factory,
        limits,
        suite_seed=args.seed,
        fail_rate=args.fail_rate,
        transcript_dir=args.transcript_dir,
    )
    write_records(records, args.out)
    mean_reward = sum(r.reward for r in records) / len(records)
    print(
        f"ran {len(records)} episodes, mean reward {mean_reward:.3f}, "
        f"records in {args.out}"
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    records = []
    for path in args.records:
        try:
            records.extend(read_records(path))
        except OSError as exc:
            raise ConfigError(f"cannot read records file {path}: {exc}") from None
    if not records:
        print("no records found in input files", file=sys.stderr)
        return 1
    report = aggregate(records)
    written = write_report_files(report, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": _cmd_generate,
        "validate": _cmd_validate,
        "run": _cmd_run,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, EndpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SlotbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
