"""Decide whether an agent directly, obliquely, means-end or ulteriorly
intends a result, using exact inference over small discrete causal models."""

from .inference import (
    ContextEnumeration,
    CauseWitness,
    InferenceError,
    ModelTooLarge,
    UndefinedConditional,
    but_for_cause,
    cond_prob,
    enumerate_contexts,
    necessary_for,
    prob,
)
from .intent import (
    AgentModel,
    ClauseResult,
    Definition,
    IntentConfig,
    IntentError,
    KnowledgeMode,
    Verdict,
    check_capacity,
    direct_intent_commission,
    direct_intent_perspective,
    explain,
    knowledge_holds,
    means_end_intent,
    moral_responsibility,
    oblique_intent,
    ulterior_intent,
)
from .model import (
    ActionVariable,
    CausalModel,
    EndogenousVariable,
    Event,
    ExogenousVariable,
    Intervention,
    ModelError,
    PolicyRule,
    evaluate,
    intervened_model,
    validate_model,
)
from .scenario import Query, Scenario, ScenarioError, build_scenario, load, loads

__version__ = "0.1.0"

__all__ = [
    "ActionVariable",
    "AgentModel",
    "build_scenario",
    "but_for_cause",
    "CausalModel",
    "CauseWitness",
    "check_capacity",
    "ClauseResult",
    "cond_prob",
    "ContextEnumeration",
    "Definition",
    "direct_intent_commission",
    "direct_intent_perspective",
    "EndogenousVariable",
    "enumerate_contexts",
    "evaluate",
    "Event",
    "ExogenousVariable",
    "explain",
    "InferenceError",
    "IntentConfig",
    "IntentError",
    "intervened_model",
    "Intervention",
    "knowledge_holds",
    "KnowledgeMode",
    "load",
    "loads",
    "means_end_intent",
    "ModelError",
    "ModelTooLarge",
    "moral_responsibility",
    "necessary_for",
    "oblique_intent",
    "PolicyRule",
    "prob",
    "Query",
    "Scenario",
    "ScenarioError",
    "ulterior_intent",
    "UndefinedConditional",
    "validate_model",
    "Verdict",
]
