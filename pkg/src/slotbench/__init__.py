"""slotbench: grid-completion agent tasks with controllable horizon and difficulty.

Procedurally generates constraint-satisfaction grid tasks with a
guaranteed unique solution, serves them through an in-process tool
environment, drives scripted or endpoint agents through episodes, and
aggregates rewards into horizon-by-difficulty tables.
"""

from .agents import Agent, AgentTurn, OracleAgent, RandomValidAgent
from .constraints import (
    Comparator,
    GlobalConstraint,
    GlobalKind,
    GridAssignment,
    SlotConstraint,
    constraint_to_text,
    eval_global_full,
    eval_global_open_prefix,
    eval_slot,
    text_to_constraint,
)
from .domains import DOMAINS, DomainSchema, Item, list_domains, sample_pool, schema
from .environment import (
    EpisodeState,
    ToolCall,
    ToolResult,
    dispatch,
    new_episode,
    partial_credit,
    score_episode,
    tool_catalog,
)
from .errors import (
    ConfigError,
    ConstraintParseError,
    ConstraintSchemaError,
    EndpointError,
    GenerationError,
    IncompleteAssignmentError,
    InstanceFormatError,
    SlotbenchError,
    UnknownItemError,
)
from .generator import generate, validate
from .harness import (
    EvalRecord,
    RunLimits,
    read_records,
    run_episode,
    run_suite,
    scripted_agent_factory,
    system_prompt,
    write_records,
)
from .instance import (
    AnswerKey,
    GenConfig,
    HiddenSlot,
    Instance,
    ValidationReport,
    read_instance,
    read_public,
    write_instance,
)
from .reporting import AggregateReport, aggregate, write_report_files

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AgentTurn",
    "AggregateReport",
    "AnswerKey",
    "Comparator",
    "ConfigError",
    "ConstraintParseError",
    "ConstraintSchemaError",
    "DOMAINS",
    "DomainSchema",
    "EndpointError",
    "EpisodeState",
    "EvalRecord",
    "GenConfig",
    "GenerationError",
    "GlobalConstraint",
    "GlobalKind",
    "GridAssignment",
    "HiddenSlot",
    "IncompleteAssignmentError",
    "Instance",
    "InstanceFormatError",
    "Item",
    "OracleAgent",
    "RandomValidAgent",
    "RunLimits",
    "SlotConstraint",
    "SlotbenchError",
    "ToolCall",
    "ToolResult",
    "UnknownItemError",
    "ValidationReport",
    "aggregate",
    "constraint_to_text",
    "dispatch",
    "eval_global_full",
    "eval_global_open_prefix",
    "eval_slot",
    "generate",
    "list_domains",
    "new_episode",
    "partial_credit",
    "read_instance",
    "read_public",
    "read_records",
    "run_episode",
    "run_suite",
    "sample_pool",
    "schema",
    "score_episode",
    "scripted_agent_factory",
    "system_prompt",
    "text_to_constraint",
    "tool_catalog",
    "validate",
    "write_instance",
    "write_records",
    "write_report_files",
]
