"""Intent predicates over an agent's subjective causal model.

Every predicate returns a :class:`Verdict` whose ``holds`` flag is the
definition's boolean formula applied to its clause results, and each clause
carries the probabilities, witnesses and alternatives that decided it.

Only the agent's subjective model is consulted by the intent predicates;
the objective model and the realized world matter for moral responsibility
alone.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Mapping, Sequence

from .inference import (
    ContextEnumeration,
    UndefinedConditional,
    but_for_cause,
    cond_prob,
    condition_contexts,
    enumerate_contexts,
    necessary_for,
    prob,
    single_literal_events,
)
from .model import (
    CausalModel,
    Event,
    Intervention,
    ModelError,
    PolicyRule,
    _check_settings,
    _evaluate,
    validate_model,
)

if TYPE_CHECKING:
    from .scenario import Scenario


class IntentError(ValueError):
    """A predicate's precondition does not hold for the given scenario."""


class ConfigError(ValueError):
    pass


class KnowledgeMode(str, enum.Enum):
    DECLARED_ONLY = "declared_only"
    DECLARED_OR_INFERRED = "declared_or_inferred"


class Definition(str, enum.Enum):
    DIRECT_COMMISSION = "DirectCommission"
    DIRECT_PERSPECTIVE = "DirectPerspective"
    MEANS_END = "MeansEnd"
    OBLIQUE = "Oblique"
    ULTERIOR = "Ulterior"
    MORAL_RESPONSIBILITY = "MoralResponsibility"


CLAUSE_IDS: dict[Definition, tuple[str, ...]] = {
    Definition.DIRECT_COMMISSION: ("DIc1", "DIc2", "DIc3", "DIc4a", "DIc4b"),
    Definition.DIRECT_PERSPECTIVE: ("DIp1", "DIp2", "DIp3", "DIp4a", "DIp4b"),
    Definition.MEANS_END: ("ME1", "ME2", "ME3", "ME4"),
    Definition.OBLIQUE: ("OI1", "OIc", "OI2a", "OI2b", "OIav"),
    Definition.ULTERIOR: ("UI1", "UI2"),
    Definition.MORAL_RESPONSIBILITY: ("MR1", "MR2", "MR3"),
}


def combine(definition: Definition, clauses: Mapping[str, bool]) -> bool:
    """The definition's boolean formula over clause outcomes."""
    c = clauses
    if definition is Definition.DIRECT_COMMISSION:
        return c["DIc1"] and c["DIc2"] and c["DIc3"] and (c["DIc4a"] or c["DIc4b"])
    if definition is Definition.DIRECT_PERSPECTIVE:
        return c["DIp1"] and c["DIp2"] and c["DIp3"] and (c["DIp4a"] or c["DIp4b"])
    if definition is Definition.MEANS_END:
        return c["ME1"] and c["ME2"] and c["ME3"] and c["ME4"]
    if definition is Definition.OBLIQUE:
        # OIav is only present when avoided results are excluded
        return c["OI1"] and c["OIc"] and (c["OI2a"] or c["OI2b"]) and c.get("OIav", True)
    if definition is Definition.ULTERIOR:
        return c["UI1"] and c["UI2"]
    return c["MR1"] and c["MR2"] and c["MR3"]


@dataclass(frozen=True)
class IntentConfig:
    tau: float = 0.99
    epsilon: float = 0.0
    tolerance: float = 1e-9
    reference_actions: tuple[Intervention, ...] | None = None
    exclude_avoided_results: bool = False
    knowledge_mode: KnowledgeMode = KnowledgeMode.DECLARED_OR_INFERRED

    def __post_init__(self) -> None:
        if self.reference_actions is not None:
            object.__setattr__(self, "reference_actions", tuple(self.reference_actions))
        object.__setattr__(self, "knowledge_mode", KnowledgeMode(self.knowledge_mode))
        problems = config_problems(self)
        if problems:
            raise ConfigError("; ".join(problems))

    def as_dict(self) -> dict[str, Any]:
        return {
            "tau": self.tau,
            "epsilon": self.epsilon,
            "tolerance": self.tolerance,
            "reference_actions": None
            if self.reference_actions is None
            else [str(r) for r in self.reference_actions],
            "exclude_avoided_results": self.exclude_avoided_results,
            "knowledge_mode": self.knowledge_mode.value,
        }


def config_problems(cfg: IntentConfig) -> list[str]:
    out = []
    if not (0.0 < cfg.tau <= 1.0):
        out.append(f"tau must lie in (0, 1], got {cfg.tau}")
    if not (0.0 <= cfg.epsilon < 1.0):
        out.append(f"epsilon must lie in [0, 1), got {cfg.epsilon}")
    if not cfg.tau > cfg.epsilon:
        out.append("tau must exceed epsilon")
    if not cfg.tolerance > 0.0:
        out.append("tolerance must be positive")
    return out


@dataclass(frozen=True)
class AgentModel:
    subjective_model: CausalModel
    observables: tuple[str, ...] = ()
    aims: tuple[Event, ...] = ()
    policy: tuple[PolicyRule, ...] = ()
    committed: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "observables", tuple(sorted(set(self.observables))))
        object.__setattr__(self, "aims", tuple(self.aims))
        object.__setattr__(self, "policy", tuple(self.policy))

    @property
    def bound_model(self) -> CausalModel:
        """The subjective model with future actions bound to the policy."""
        if not self.policy:
            return self.subjective_model
        return self.subjective_model.with_policy(self.policy)


@dataclass(frozen=True)
class ClauseResult:
    clause_id: str
    holds: bool
    evidence: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Verdict:
    definition: Definition
    holds: bool
    clauses: tuple[ClauseResult, ...]
    trace: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.clauses:
            raise ValueError("a verdict needs at least one clause")
        allowed = CLAUSE_IDS[self.definition]
        for c in self.clauses:
            if c.clause_id not in allowed:
                raise ValueError(f"clause {c.clause_id} does not belong to {self.definition.value}")
        if combine(self.definition, self.clause_map()) != self.holds:
            raise ValueError("verdict flag disagrees with its clauses")

    def clause_map(self) -> dict[str, bool]:
        return {c.clause_id: c.holds for c in self.clauses}

    def clause(self, clause_id: str) -> ClauseResult:
        for c in self.clauses:
            if c.clause_id == clause_id:
                return c
        raise KeyError(clause_id)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form with a fixed key order and 12-significant-digit floats."""
        trace = dict(self.trace)
        config = trace.pop("config", None)
        return _clean(
            {
                "definition": self.definition.value,
                "holds": self.holds,
                "clauses": [
                    {"id": c.clause_id, "holds": c.holds, "evidence": dict(c.evidence)} for c in self.clauses
                ],
                "trace": trace,
                "config": config,
            }
        )


def _clean(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, Mapping):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return str(obj)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


# --------------------------------------------------------------------------
# knowledge


def _full_assignments(model: CausalModel) -> list[Intervention]:
    names = model.unbound_actions
    return [Intervention(zip(names, combo)) for combo in itertools.product(*(model.domain(n) for n in names))]


def _determined_mass(model, contexts, do, observables, var) -> float:
    """Probability mass on which ``var`` is not a function of the observables."""
    groups: dict[tuple, dict[str, float]] = {}
    settings = do.as_dict()
    for ctx, p in contexts.entries:
        if p <= 0.0:
            continue
        w = _evaluate(model, dict(ctx), settings)
        key = tuple(w[o] for o in observables)
        bucket = groups.setdefault(key, {})
        bucket[w[var]] = bucket.get(w[var], 0.0) + p
    return math.fsum(math.fsum(b.values()) - max(b.values()) for b in groups.values())


def _knowledge(
    model: CausalModel,
    observables: Sequence[str],
    result: Event,
    mode: KnowledgeMode,
    tolerance: float,
    interventions: Sequence[Intervention],
    contexts: ContextEnumeration,
) -> tuple[bool, dict[str, Any]]:
    obs = [o for o in observables if o in model.variables]
    declared = [v for v in result.variables if v in obs]
    inferred, unknown = [], []
    for var in result.variables:
        if var in obs:
            continue
        if mode is KnowledgeMode.DECLARED_OR_INFERRED and interventions and all(
            _determined_mass(model, contexts, do, obs, var) <= tolerance for do in interventions
        ):
            inferred.append(var)
        else:
            unknown.append(var)
    evidence = {"mode": mode.value, "observed": declared, "inferred": inferred, "unknown": unknown}
    return not unknown, evidence


def knowledge_holds(
    agent: AgentModel,
    result: Event,
    config: IntentConfig | None = None,
    interventions: Sequence[Intervention] | None = None,
    contexts: ContextEnumeration | None = None,
) -> bool:
    """Whether the agent can observe, or infer from observables, every result variable.

    ``interventions`` defaults to every full assignment of the model's
    unbound actions.
    """
    config = config or IntentConfig()
    model = agent.bound_model
    for name in result.variables:
        model.domain(name)
    if interventions is None:
        interventions = _full_assignments(model)
    contexts = enumerate_contexts(model) if contexts is None else contexts
    ok, _ = _knowledge(
        model, agent.observables, result, config.knowledge_mode, config.tolerance, interventions, contexts
    )
    return ok


# --------------------------------------------------------------------------
# the evaluator shared by every predicate


class _Judge:
    """Caches probabilities for one agent model, config, baseline and context set."""

    def __init__(
        self,
        agent: AgentModel,
        config: IntentConfig,
        baseline: Intervention,
        contexts: ContextEnumeration | None = None,
    ):
        self.agent = agent
        self.model = agent.bound_model
        self.config = config
        self.baseline = baseline
        self.contexts = enumerate_contexts(self.model) if contexts is None else contexts
        self._probs: dict[tuple, float] = {}
        self._direct: dict[tuple, Verdict] = {}

    def check_event(self, event: Event) -> None:
        for name, value in event.literals:
            if value not in self.model.domain(name):
                raise ModelError(f"value {value} not in domain of {name}")

    def complete(self, action: Intervention) -> Intervention:
        _check_settings(self.model, action)
        return self.baseline.merged(action)

    def alternatives(self, action: Intervention) -> list[Intervention]:
        full = self.complete(action)
        if self.config.reference_actions is None:
            names = action.variables
            combos = itertools.product(*(self.model.domain(n) for n in names))
            candidates = [full.merged(Intervention(zip(names, c))) for c in combos]
        else:
            candidates = [full.merged(ref) for ref in self.config.reference_actions]
        out: list[Intervention] = []
        for alt in candidates:
            _check_settings(self.model, alt)
            if alt != full and alt not in out:
                out.append(alt)
        return out

    def p(self, do: Intervention, event: Event) -> float:
        key = (do, event)
        if key not in self._probs:
            self._probs[key] = prob(self.model, do, event, self.contexts)
        return self._probs[key]

    def but_for(self, full: Intervention, alts: list[Intervention], event: Event) -> dict[str, Any]:
        if not alts:
            return {"holds": False, "witness": None}
        holds, witness = but_for_cause(self.model, full, alts, event, self.contexts)
        return {
            "holds": holds,
            "witness": None
            if witness is None
            else {
                "context": dict(witness.context),
                "actual": str(witness.actual_action),
                "counterfactual": str(witness.counterfactual_action),
            },
        }

    def candidates(self, exclude: Event) -> list[Event]:
        out: list[Event] = []
        for ev in (*self.agent.aims, *single_literal_events(self.model)):
            if ev != exclude and ev not in out:
                out.append(ev)
        return out

    # ---- direct intent

    def direct(self, result: Event, action: Intervention, prefix: str = "DIc") -> Verdict:
        key = (result, action, prefix)
        if key in self._direct:
            return self._direct[key]
        self.check_event(result)
        cfg = self.config
        full = self.complete(action)
        alts = self.alternatives(action)

        c1 = ClauseResult(f"{prefix}1", bool(alts), {"alternatives": [str(a) for a in alts]})

        known, kevidence = _knowledge(
            self.model,
            self.agent.observables,
            result,
            cfg.knowledge_mode,
            cfg.tolerance,
            [full, *alts],
            self.contexts,
        )
        c2 = ClauseResult(f"{prefix}2", known, kevidence)

        p_act = self.p(full, result)
        cause = self.but_for(full, alts, result)
        c3 = ClauseResult(
            f"{prefix}3",
            cause["holds"] and p_act > cfg.epsilon,
            {"but_for": cause["holds"], "witness": cause["witness"], "probability": p_act, "epsilon": cfg.epsilon},
        )

        c4a = ClauseResult(f"{prefix}4a", result in self.agent.aims, {"aims": [str(a) for a in self.agent.aims]})

        alt_probs = [(alt, self.p(alt, result)) for alt in alts]
        less_likely = [str(alt) for alt, q in alt_probs if q < p_act - cfg.tolerance]
        c4b = ClauseResult(
            f"{prefix}4b",
            bool(less_likely),
            {
                "probability": p_act,
                "alternatives": [{"action": str(alt), "probability": q} for alt, q in alt_probs],
                "less_likely": less_likely,
            },
        )
        holds = c1.holds and c2.holds and c3.holds and (c4a.holds or c4b.holds)
        definition = Definition.DIRECT_COMMISSION if prefix == "DIc" else Definition.DIRECT_PERSPECTIVE
        verdict = Verdict(definition, holds, (c1, c2, c3, c4a, c4b), self.trace(result, action))
        self._direct[key] = verdict
        return verdict

    def minimizes(self, full: Intervention, alts: list[Intervention], result: Event) -> bool:
        p_act = self.p(full, result)
        return all(p_act <= self.p(alt, result) + self.config.tolerance for alt in alts)

    # ---- oblique intent

    def oblique(self, result: Event, action: Intervention, via: Event | None = None) -> Verdict:
        self.check_event(result)
        cfg = self.config
        full = self.complete(action)
        alts = self.alternatives(action)
        p_act = self.p(full, result)
        threshold = cfg.tau - cfg.tolerance
        side_effect_of_action = p_act >= threshold

        pool = [via] if via is not None else self.candidates(exclude=result)
        chosen: tuple[Event, Verdict, float | None] | None = None
        fallback: tuple[Event, Verdict, float | None] | None = None
        for y in pool:
            di = self.direct(y, action)
            if not di.holds:
                continue
            try:
                p_given = cond_prob(self.model, full, result, y, cfg.tolerance, self.contexts)
            except UndefinedConditional:
                p_given = None
            if fallback is None:
                fallback = (y, di, p_given)
            if side_effect_of_action or (p_given is not None and p_given >= threshold):
                chosen = (y, di, p_given)
                break
        if chosen is None:
            chosen = fallback

        if chosen is None:
            c1 = ClauseResult("OI1", False, {"intended": None, "searched": len(pool)})
            c2b = ClauseResult("OI2b", False, {"given": None, "conditional": None, "tau": cfg.tau})
        else:
            y, di, p_given = chosen
            c1 = ClauseResult(
                "OI1",
                True,
                {"intended": str(y), "direct": {c.clause_id: c.holds for c in di.clauses}},
            )
            c2b = ClauseResult(
                "OI2b",
                p_given is not None and p_given >= threshold,
                {"given": str(y), "conditional": p_given, "tau": cfg.tau},
            )
        cause = self.but_for(full, alts, result)
        cc = ClauseResult("OIc", cause["holds"], cause)
        c2a = ClauseResult("OI2a", side_effect_of_action, {"probability": p_act, "tau": cfg.tau})
        clauses = [c1, cc, c2a, c2b]
        if cfg.exclude_avoided_results:
            avoided = self.minimizes(full, alts, result)
            clauses.append(
                ClauseResult(
                    "OIav",
                    not avoided,
                    {
                        "probability": p_act,
                        "alternatives": [{"action": str(a), "probability": self.p(a, result)} for a in alts],
                        "minimizes": avoided,
                    },
                )
            )
        holds = c1.holds and cc.holds and (c2a.holds or c2b.holds) and all(c.holds for c in clauses[4:])
        trace = self.trace(result, action)
        trace["intended"] = c1.evidence["intended"]
        return Verdict(Definition.OBLIQUE, holds, tuple(clauses), trace)

    def trace(self, result: Event, action: Intervention) -> dict[str, Any]:
        return {
            "result": str(result),
            "action": str(action),
            "completed_action": str(self.complete(action)),
            "config": self.config.as_dict(),
        }


# --------------------------------------------------------------------------
# public predicates


def _baseline(scenario: Scenario) -> Intervention:
    base = scenario.performed
    return base.merged(scenario.plan) if scenario.plan is not None else base


def _resolve(scenario: Scenario, action, config) -> tuple[Intervention, IntentConfig]:
    return (scenario.performed if action is None else action), (scenario.config if config is None else config)


def direct_intent_commission(
    scenario: Scenario,
    result: Event,
    action: Intervention | None = None,
    config: IntentConfig | None = None,
) -> Verdict:
    """Direct intent judged at the point of commission, on the current subjective model."""
    action, config = _resolve(scenario, action, config)
    return _Judge(scenario.agent, config, _baseline(scenario)).direct(result, action)


def direct_intent_perspective(
    scenario: Scenario,
    result: Event,
    action: Intervention | None = None,
    config: IntentConfig | None = None,
) -> Verdict:
    """Direct intent judged after the fact against the commission-time snapshot.

    The realized world is never consulted.
    """
    if scenario.commission_snapshot is None:
        raise IntentError("scenario has no commission-time snapshot")
    action, config = _resolve(scenario, action, config)
    judge = _Judge(scenario.commission_snapshot, config, _baseline(scenario))
    return judge.direct(result, action, prefix="DIp")


def oblique_intent(
    scenario: Scenario,
    result: Event,
    action: Intervention | None = None,
    config: IntentConfig | None = None,
    via: Event | None = None,
) -> Verdict:
    """Oblique intent; ``via`` pins the directly intended result instead of searching."""
    action, config = _resolve(scenario, action, config)
    return _Judge(scenario.agent, config, _baseline(scenario)).oblique(result, action, via)


def means_end_intent(
    scenario: Scenario,
    result: Event,
    action: Intervention | None = None,
    config: IntentConfig | None = None,
) -> Verdict:
    action, config = _resolve(scenario, action, config)
    plan = scenario.plan if scenario.plan is not None else scenario.performed
    if not action.issubset(plan):
        raise IntentError(f"action {action} is not a sub-assignment of the plan {plan}")
    judge = _Judge(scenario.agent, config, _baseline(scenario).merged(plan))
    judge.check_event(result)

    full = judge.complete(action)
    alts = judge.alternatives(action)
    cause = judge.but_for(full, alts, result)
    c2 = ClauseResult("ME2", cause["holds"], cause)
    c3 = ClauseResult("ME3", True, {"action": str(action), "plan": str(plan)})

    full_plan = judge.complete(plan)
    chosen = fallback = None
    for y in judge.candidates(exclude=result):
        if not judge.direct(y, plan).holds:
            continue
        needed = necessary_for(judge.model, full_plan, result, y, judge.contexts)
        if fallback is None:
            fallback = (y, needed)
        if needed:
            chosen = (y, True)
            break
    chosen = chosen or fallback
    if chosen is None:
        c1 = ClauseResult("ME1", False, {"intended": None})
        c4 = ClauseResult("ME4", False, {"intended": None, "necessary": None})
    else:
        y, needed = chosen
        c1 = ClauseResult("ME1", True, {"intended": str(y), "plan": str(plan)})
        c4 = ClauseResult("ME4", needed, {"intended": str(y), "necessary": needed})
    clauses = (c1, c2, c3, c4)
    trace = judge.trace(result, action)
    trace["plan"] = str(plan)
    trace["intended"] = c1.evidence["intended"]
    return Verdict(Definition.MEANS_END, all(c.holds for c in clauses), clauses, trace)


def _policy_conditions(policy: Iterable[PolicyRule]) -> list[Event]:
    out: list[Event] = []
    for rule in policy:
        if rule.condition not in out:
            out.append(rule.condition)
    return out


def ulterior_intent(
    scenario: Scenario,
    result: Event,
    config: IntentConfig | None = None,
) -> Verdict:
    """Commitment now to a conditional future action that would then be intentional.

    Each policy condition that is foreseeable under the performed actions is
    examined in the model conditioned on that condition; there, the action the
    policy prescribes must carry direct or oblique intent for the result.
    """
    config = scenario.config if config is None else config
    agent = scenario.agent
    if not agent.policy:
        raise IntentError("agent has no policy")
    base = _Judge(agent, config, scenario.performed)
    base.check_event(result)
    for rule in agent.policy:
        base.check_event(rule.condition)
    t1 = Intervention({k: v for k, v in scenario.performed.settings if k not in base.model.bound_actions})

    branches = []
    witness = None
    for cond in _policy_conditions(agent.policy):
        p_cond = base.p(base.complete(t1), cond)
        prescribed: dict[str, set[str]] = {}
        for rule in agent.policy:
            if rule.condition == cond:
                for k, v in rule.action.settings:
                    prescribed.setdefault(k, set()).add(v)
        deterministic = all(len(vs) == 1 for vs in prescribed.values())
        branch: dict[str, Any] = {
            "condition": str(cond),
            "probability": p_cond,
            "foreseeable": p_cond > config.epsilon,
            "deterministic": deterministic,
            "action": None,
            "direct": None,
            "oblique": None,
        }
        branches.append(branch)
        if not branch["foreseeable"] or not deterministic:
            continue
        action = Intervention({k: next(iter(vs)) for k, vs in prescribed.items()})
        branch["action"] = str(action)
        try:
            contexts = condition_contexts(base.model, base.complete(t1), cond, config.tolerance, base.contexts)
        except UndefinedConditional:
            branch["foreseeable"] = False
            continue
        sub = _Judge(agent, config, t1, contexts)
        branch["direct"] = sub.direct(result, action).holds
        if not branch["direct"]:
            branch["oblique"] = sub.oblique(result, action).holds
        if witness is None and (branch["direct"] or branch["oblique"]):
            witness = branch

    c1 = ClauseResult(
        "UI1",
        witness is not None,
        {"witness": None if witness is None else witness["condition"], "branches": branches},
    )
    c2 = ClauseResult("UI2", agent.committed, {"committed": agent.committed})
    trace = {
        "result": str(result),
        "action": str(t1),
        "completed_action": str(base.complete(t1)),
        "config": config.as_dict(),
        "condition": c1.evidence["witness"],
    }
    return Verdict(Definition.ULTERIOR, c1.holds and c2.holds, (c1, c2), trace)


def moral_responsibility(
    scenario: Scenario,
    outcome: Event,
    action: Intervention | None = None,
    config: IntentConfig | None = None,
) -> Verdict:
    """Free agency, objective but-for causation of a realized outcome, and the
    condition that the chosen action does not minimise the outcome's
    subjective probability."""
    if scenario.realized is None:
        raise IntentError("moral responsibility needs a realized world")
    action, config = _resolve(scenario, action, config)
    judge = _Judge(scenario.agent, config, _baseline(scenario))
    judge.check_event(outcome)
    full = judge.complete(action)
    alts = judge.alternatives(action)

    c1 = ClauseResult("MR1", bool(alts), {"alternatives": [str(a) for a in alts]})

    objective = scenario.objective_model
    occurred = outcome.holds_in(scenario.realized)
    if alts:
        caused, witness = but_for_cause(objective, full, alts, outcome)
    else:
        caused, witness = False, None
    c2 = ClauseResult(
        "MR2",
        caused and occurred,
        {
            "but_for": caused,
            "witness": None if witness is None else dict(witness.context),
            "occurred": occurred,
        },
    )

    p_act = judge.p(full, outcome)
    alt_probs = [(a, judge.p(a, outcome)) for a in alts]
    not_min = any(q < p_act - config.tolerance for _, q in alt_probs)
    c3 = ClauseResult(
        "MR3",
        not_min,
        {"probability": p_act, "alternatives": [{"action": str(a), "probability": q} for a, q in alt_probs]},
    )
    trace = judge.trace(outcome, action)
    return Verdict(Definition.MORAL_RESPONSIBILITY, c1.holds and c2.holds and c3.holds, (c1, c2, c3), trace)


# --------------------------------------------------------------------------
# capacity and reporting


@dataclass(frozen=True)
class RequirementCheck:
    number: int
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CapacityReport:
    checks: tuple[RequirementCheck, ...]

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[int]:
        return [c.number for c in self.checks if not c.passed]

    def render(self) -> str:
        lines = [f"capacity: {self.passed}/{len(self.checks)}"]
        for c in self.checks:
            lines.append(f"  [{'ok' if c.passed else 'FAILED'}] {c.number:>2} {c.name}: {c.detail}")
        return "\n".join(lines)


def check_capacity(scenario: Scenario) -> CapacityReport:
    obj = scenario.objective_model
    agent = scenario.agent
    obj_problems = validate_model(obj) if obj is not None else ["missing"]
    n_vars = len(obj.variables) if obj is not None else 0
    choice = [a.name for a in obj.actions if len(a.domain) >= 2] if obj is not None else []
    exo_bad = [v for v in obj_problems if getattr(v, "kind", "") == "unnormalized"]
    agent_ok = agent is not None and not validate_model(agent.bound_model)
    has_plan = bool(agent is not None and agent.policy) or bool(scenario.performed)
    checks = (
        RequirementCheck(1, "measurable state", n_vars >= 1, f"{n_vars} variables"),
        RequirementCheck(2, "chosen actions", bool(choice), ", ".join(choice) or "no action with a choice"),
        RequirementCheck(3, "likelihood", obj is not None and not exo_bad, "exogenous distributions valid"
                         if not exo_bad else "; ".join(map(str, exo_bad))),
        RequirementCheck(4, "causality", not obj_problems, "objective model valid" if not obj_problems
                         else "; ".join(map(str, obj_problems))),
        RequirementCheck(5, "model feasibility", not obj_problems, "structural tables total and acyclic"
                         if not obj_problems else "objective model invalid"),
        RequirementCheck(6, "results", obj is not None and bool(obj.endogenous),
                         f"{len(obj.endogenous) if obj is not None else 0} endogenous variables"),
        RequirementCheck(7, "subjective model", agent_ok, "agent model valid" if agent_ok else "agent model invalid"),
        RequirementCheck(8, "objective model", obj is not None, "present" if obj is not None else "missing"),
        RequirementCheck(9, "plans", has_plan, "policy" if agent is not None and agent.policy
                         else ("single-step action" if scenario.performed else "none")),
        RequirementCheck(10, "aims", agent is not None and bool(agent.aims),
                         ", ".join(map(str, agent.aims)) if agent is not None and agent.aims else "no aims"),
    )
    return CapacityReport(checks)


def _render_value(value: Any) -> str:
    if isinstance(value, float):
        return _fmt(value)
    if isinstance(value, bool) or value is None:
        return str(value).lower() if isinstance(value, bool) else "none"
    if isinstance(value, Mapping):
        return "{" + ", ".join(f"{k}: {_render_value(v)}" for k, v in value.items()) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_render_value(v) for v in value) + "]"
    return str(value)


def explain(verdict: Verdict) -> str:
    """Deterministic plain-text report, one line per clause."""
    trace = dict(verdict.trace)
    cfg = trace.pop("config", {}) or {}
    lines = [f"{verdict.definition.value}: {'HOLDS' if verdict.holds else 'DOES NOT HOLD'}"]
    for key in ("result", "action", "completed_action", "plan", "intended", "condition"):
        if key in trace:
            lines.append(f"  {key}: {_render_value(trace[key])}")
    if cfg:
        lines.append(
            "  config: "
            + " ".join(f"{k}={_render_value(cfg[k])}" for k in ("tau", "epsilon", "tolerance") if k in cfg)
        )
    for c in verdict.clauses:
        status = "ok" if c.holds else "FAILED"
        detail = ", ".join(f"{k}={_render_value(v)}" for k, v in c.evidence.items())
        lines.append(f"  [{status}] {c.clause_id}: {detail}")
    return "\n".join(lines) + "\n"
