"""Deterministic block-world simulation of a tutored autotelic learner."""

from blocktutor.goal_graph import GoalGraph, UnknownGoalError, build_goal_graph
from blocktutor.harness import (
    ExperimentConfig,
    MetricsRecord,
    TrainingSession,
    derive_seed,
    eval_expression,
    eval_sequence,
    eval_transition,
    load_snapshot,
    run_training,
    save_snapshot,
    summarize,
    sweep_beta,
    write_run_outputs,
)
from blocktutor.language import (
    GroundingTable,
    Inventory,
    build_inventory,
    ground_expression,
    induce,
    parse_expression,
)
from blocktutor.learner import CompetenceModel, LearnerState
from blocktutor.semantics import (
    Configuration,
    Scene,
    enumerate_valid_configs,
    extract_config,
    is_valid,
    legal_moves,
    predicate_count,
    realize_config,
)
from blocktutor.tutor import TutorModel

__all__ = [
    "CompetenceModel",
    "Configuration",
    "ExperimentConfig",
    "GoalGraph",
    "GroundingTable",
    "Inventory",
    "LearnerState",
    "MetricsRecord",
    "Scene",
    "TrainingSession",
    "TutorModel",
    "UnknownGoalError",
    "build_goal_graph",
    "build_inventory",
    "derive_seed",
    "enumerate_valid_configs",
    "eval_expression",
    "eval_sequence",
    "eval_transition",
    "extract_config",
    "ground_expression",
    "induce",
    "is_valid",
    "legal_moves",
    "load_snapshot",
    "parse_expression",
    "predicate_count",
    "realize_config",
    "run_training",
    "save_snapshot",
    "summarize",
    "sweep_beta",
    "write_run_outputs",
]

__version__ = "0.1.0"
