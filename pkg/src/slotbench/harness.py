"""Episode and suite runners: limits, records, prompts, parallel execution.

run_episode alternates agent turns with tool dispatch until the agent
calls done, sends a final message, hits the step limit, overruns the
output-token cap too often, or the endpoint gives out. run_suite fans
episodes over a thread pool; per-episode seeds are derived from the
suite seed, the instance path, the instance file's content hash, and
the episode's position, so results are independent of scheduling and
parallelism, and an edited instance changes only its own seed stream.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Callable

from .agents import Agent, OracleAgent, RandomValidAgent
from .constraints import constraint_to_text
from .environment import (
    dispatch,
    new_episode,
    partial_credit,
    score_episode,
    transcript_doc,
    write_transcript,
)
from .errors import ConfigError, EndpointError
from .instance import AnswerKey, Instance, read_instance
from .seeding import stable_seed

FAILURE_NONE = "none"
FAILURE_STEP_LIMIT = "step_limit"
FAILURE_TOKEN_OVERFLOW = "token_overflow"
FAILURE_ENDPOINT = "endpoint_error"

AgentFactory = Callable[[Instance, int], Agent]


@dataclass(frozen=True)
class RunLimits:
    max_steps: int = 600
    max_output_tokens: int = 16384
    max_token_overflows: int = 3
    parallelism: int = 64

    def __post_init__(self) -> None:
        for name in ("max_steps", "max_output_tokens", "max_token_overflows", "parallelism"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")


@dataclass(frozen=True)
class EvalRecord:
    instance_path: str
    domain: str
    h: int
    b: int
    seed: int
    episode_seed: int
    reward: int
    partial_credit: float
    steps: int
    completion_tokens: int
    wall_time: float
    agent_time: float
    env_time: float
    failure_reason: str
    prompt_hash: str
    transcript_path: str

    def to_doc(self) -> dict:
        return asdict(self)


def record_from_doc(doc: dict) -> EvalRecord:
    return EvalRecord(**doc)


def system_prompt(instance: Instance) -> str:
    """Fixed per-instance task description; hashed into every record."""
    lines = [
        f"You are completing a {instance.domain} planning grid with "
        f"{instance.rows} rows and {instance.cols} columns.",
        f"{len(instance.prefilled)} cells are already filled and fixed. The "
        f"remaining {instance.h} hidden slots must each receive one item "
        "chosen from that slot's candidate list, which you can explore with "
        "the query and attribute tools.",
        "",
        "Hidden slots and their local constraints:",
    ]
    for slot in instance.hidden:
        texts = "; ".join(constraint_to_text(c) for c in slot.constraints)
        lines.append(f"- slot ({slot.row}, {slot.col}): {texts}")
    lines.append("")
    lines.append("Global constraints over the completed grid:")
    for g in instance.global_constraints:
        lines.append(f"- {constraint_to_text(g)}")
    lines.append("")
    lines.append(
        "Every hidden slot must satisfy its local constraints and the "
        "completed grid must satisfy every global constraint; exactly one "
        "choice of candidates achieves this. Attribute queries consume "
        "per-slot budgets and global checks consume an episode budget, so "
        "spend them carefully. Fill every hidden slot, then call done."
    )
    return "\n".join(lines) + "\n"


def prompt_sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def run_episode(
    instance: Instance,
    key: AnswerKey,
    agent: Agent,
    limits: RunLimits,
    fail_rate: float = 0.0,
    seed: int = 0,
    instance_path: str = "",
    prompt_hash: str = "",
    transcript_path: str = "",
) -> EvalRecord:
    state = new_episode(instance, fail_rate=fail_rate, seed=seed)
    failure = FAILURE_NONE
    overflows = 0
    total_tokens = 0
    results: list = []
    agent_time = 0.0
    env_time = 0.0
    start = time.perf_counter()
    try:
        while True:
            turn_start = time.perf_counter()
            turn = agent.next_turn(results)
            agent_time += time.perf_counter() - turn_start
            total_tokens += turn.completion_tokens
            if turn.truncated:
                overflows += 1
                if overflows > limits.max_token_overflows:
                    failure = FAILURE_TOKEN_OVERFLOW
                    break
            if not turn.tool_calls:
                if turn.truncated:
                    # cut-off response with no usable calls: let it retry
                    results = []
                    continue
                break
            results = []
            env_start = time.perf_counter()
            stop = False
            for call in turn.tool_calls:
                if state.steps >= limits.max_steps:
                    failure = FAILURE_STEP_LIMIT
                    stop = True
                    break
                results.append(dispatch(state, call))
                if state.done:
                    stop = True
                    break
            env_time += time.perf_counter() - env_start
            if stop:
                break
    except EndpointError:
        failure = FAILURE_ENDPOINT
    wall_time = time.perf_counter() - start
    reward = 0 if failure == FAILURE_TOKEN_OVERFLOW else score_episode(state, key)
    record = EvalRecord(
        instance_path=instance_path,
        domain=instance.domain,
        h=instance.h,
        b=instance.b,
        seed=instance.seed,
        episode_seed=seed,
        reward=reward,
        partial_credit=partial_credit(state, key),
        steps=state.steps,
        completion_tokens=total_tokens,
        wall_time=wall_time,
        agent_time=agent_time,
        env_time=env_time,
        failure_reason=failure,
        prompt_hash=prompt_hash,
        transcript_path=transcript_path,
    )
    if transcript_path:
        write_transcript(
            transcript_doc(state, instance_path, reward, failure), transcript_path
        )
    return record


@dataclass(frozen=True)
class _Loaded:
    instance: Instance
    key: AnswerKey
    content_sha: str
    prompt_hash: str


def _load(path: str) -> _Loaded:
    raw = Path(path).read_bytes()
    instance, key = read_instance(path)
    return _Loaded(
        instance=instance,
        key=key,
        content_sha=hashlib.sha256(raw).hexdigest(),
        prompt_hash=prompt_sha(system_prompt(instance)),
    )


def run_suite(
    paths: list[str],
    agent_factory: AgentFactory,
    limits: RunLimits | None = None,
    suite_seed: int = 42,
    fail_rate: float = 0.0,
    transcript_dir: str = "",
) -> list[EvalRecord]:
    """Run one episode per path entry (paths may repeat); order preserved."""
    limits = limits or RunLimits()
    if transcript_dir:
        Path(transcript_dir).mkdir(parents=True, exist_ok=True)
    # loading happens up front so malformed files abort before any episode
    cache = {path: _load(path) for path in dict.fromkeys(paths)}

    def run_one(index: int, path: str) -> EvalRecord:
        loaded = cache[path]
        episode_seed = stable_seed(suite_seed, path, loaded.content_sha, index)
        transcript_path = (
            str(Path(transcript_dir) / f"ep{index:05d}.json") if transcript_dir else ""
        )
        try:
            agent = agent_factory(loaded.instance, episode_seed)
            return run_episode(
                loaded.instance,
                loaded.key,
                agent,
                limits,
                fail_rate=fail_rate,
                seed=episode_seed,
                instance_path=path,
                prompt_hash=loaded.prompt_hash,
                transcript_path=transcript_path,
            )
        except Exception:
            # an episode must never take down the suite
            return EvalRecord(
                instance_path=path,
                domain=loaded.instance.domain,
                h=loaded.instance.h,
                b=loaded.instance.b,
                seed=loaded.instance.seed,
                episode_seed=episode_seed,
                reward=0,
                partial_credit=0.0,
                steps=0,
                completion_tokens=0,
                wall_time=0.0,
                agent_time=0.0,
                env_time=0.0,
                failure_reason=FAILURE_ENDPOINT,
                prompt_hash=loaded.prompt_hash,
                transcript_path="",
            )

    if limits.parallelism == 1:
        return [run_one(i, path) for i, path in enumerate(paths)]
    records: list[EvalRecord | None] = [None] * len(paths)
    with ThreadPoolExecutor(max_workers=limits.parallelism) as pool:
        futures = {
            pool.submit(run_one, i, path): i for i, path in enumerate(paths)
        }
        for future in as_completed(futures):
            records[futures[future]] = future.result()
    return records  # type: ignore[return-value]


def scripted_agent_factory(name: str) -> AgentFactory:
    """Factory for the built-in agents; endpoint agents are built in cli."""
    if name == "oracle":
        return lambda instance, seed: OracleAgent(instance)
    if name == "random":
        return lambda instance, seed: RandomValidAgent(
            instance, random.Random(stable_seed("agent", seed))
        )
    raise ConfigError(f"unknown scripted agent: {name!r}")


def write_records(records: list[EvalRecord], path: str | Path) -> None:
    with open(path, "w") as handle:
        for record in records:
            handle.write(json.dumps(record.to_doc(), sort_keys=True))
            handle.write("\n")


def read_records(path: str | Path) -> list[EvalRecord]:
    records = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(record_from_doc(json.loads(line)))
    return records
