"""Scenarios: an objective world model, an agent, what it did, and what to ask.

Two surface forms share one validator. The ``.intent`` text format is parsed
by :mod:`intentcheck.dsl` into the plain tree described by
:func:`scenario_to_tree`; the ``.json`` form *is* that tree. Both go
through :func:`build_scenario`, which raises :class:`ScenarioError` with a
code from :data:`ERROR_CODES` and a 1-based position.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .inference import enumerate_contexts
from .intent import AgentModel, ConfigError, IntentConfig, KnowledgeMode
from .model import (
    ActionVariable,
    CausalModel,
    EndogenousVariable,
    Event,
    ExogenousVariable,
    ID_PATTERN,
    Intervention,
    PolicyRule,
    VALUE_PATTERN,
    _evaluate,
    validate_model,
)

FORMAT_VERSION = 1

ERROR_CODES = (
    "syntax",
    "unknown-variable",
    "domain-mismatch",
    "non-dag",
    "unnormalized",
    "bad-threshold",
    "inconsistent-realized",
)

QUERY_KINDS = ("direct", "perspective", "means_end", "oblique", "ulterior", "responsibility")

_VIOLATION_CODES = {
    "unnormalized": "unnormalized",
    "non-dag": "non-dag",
    "unknown-variable": "unknown-variable",
    "domain-mismatch": "domain-mismatch",
    "duplicate": "syntax",
    "bad-id": "syntax",
}

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?\Z")
_TIME_SUFFIX = re.compile(r"@(\d+)\Z")


class ScenarioError(ValueError):
    def __init__(self, code: str, message: str, line: int = 1, col: int = 1):
        assert code in ERROR_CODES, code
        super().__init__(f"{line}:{col}: {code}: {message}")
        self.code = code
        self.message = message
        self.line = line
        self.col = col

    def as_dict(self) -> dict[str, Any]:
        return {"code": self.code, "line": self.line, "column": self.col, "message": self.message}


@dataclass(frozen=True)
class Query:
    kind: str
    result: Event
    action: Intervention | None = None
    via: Event | None = None

    def __str__(self) -> str:
        text = f"{self.kind} {self.result}"
        if self.action is not None:
            text += f" by {self.action}"
        if self.via is not None:
            text += f" via {self.via}"
        return text


@dataclass(frozen=True)
class Scenario:
    objective_model: CausalModel
    agent: AgentModel
    performed: Intervention = Intervention()
    commission_snapshot: AgentModel | None = None
    plan: Intervention | None = None
    realized: Mapping[str, str] | None = None
    config: IntentConfig = field(default_factory=IntentConfig)
    queries: tuple[Query, ...] = ()


# --------------------------------------------------------------------------
# tree -> Scenario


class _Builder:
    def __init__(self, positions: Mapping[tuple, tuple[int, int]] | None):
        self.positions = positions or {}

    def fail(self, code: str, message: str, *path) -> None:
        line, col = self._pos(path)
        raise ScenarioError(code, message, line, col)

    def _pos(self, path: tuple) -> tuple[int, int]:
        # fall back to enclosing paths, then to the document start
        while path:
            if path in self.positions:
                return self.positions[path]
            path = path[:-1]
        return self.positions.get((), (1, 1))

    # ---- primitive checks

    def ident(self, name: Any, *path) -> str:
        if not isinstance(name, str) or not ID_PATTERN.match(name):
            self.fail("syntax", f"invalid identifier {name!r}", *path)
        return name

    def value(self, value: Any, *path) -> str:
        if not isinstance(value, str) or not VALUE_PATTERN.match(value):
            self.fail("syntax", f"invalid value {value!r}", *path)
        return value

    def number(self, raw: Any, *path) -> float:
        if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
            self.fail("syntax", f"expected a number, got {raw!r}", *path)
        if isinstance(raw, str):
            if not _NUMBER.match(raw):
                self.fail("syntax", f"expected a number, got {raw!r}", *path)
            raw = float(raw)
        x = float(raw)
        if not math.isfinite(x):
            self.fail("syntax", f"expected a finite number, got {raw!r}", *path)
        return float(f"{x:.12g}")

    def flag(self, raw: Any, *path) -> bool:
        if isinstance(raw, bool):
            return raw
        if raw in ("true", "false"):
            return raw == "true"
        self.fail("syntax", f"expected true or false, got {raw!r}", *path)

    def listof(self, raw: Any, *path) -> list:
        if not isinstance(raw, list):
            self.fail("syntax", f"expected a list, got {type(raw).__name__}", *path)
        return raw

    def mapping(self, raw: Any, *path) -> dict:
        if not isinstance(raw, dict):
            self.fail("syntax", f"expected a mapping, got {type(raw).__name__}", *path)
        return raw

    # ---- models

    def model(self, raw: Any, section: str) -> CausalModel:
        raw = self.mapping(raw, section)
        unknown = set(raw) - {"exo", "actions", "vars"}
        if unknown:
            self.fail("syntax", f"unknown model keys: {sorted(unknown)}", section)
        exo, actions, endo = [], [], []
        for item in self.listof(raw.get("exo", []), section):
            item = self.mapping(item, section)
            name = self.ident(item.get("id"), section)
            pairs = self.listof(item.get("distribution"), section, name)
            dist = []
            for pair in pairs:
                if not isinstance(pair, list) or len(pair) != 2:
                    self.fail("syntax", f"malformed distribution entry in {name}", section, name)
                dist.append((self.value(pair[0], section, name), self.number(pair[1], section, name)))
            exo.append(ExogenousVariable(name, tuple(dist)))
        for item in self.listof(raw.get("actions", []), section):
            item = self.mapping(item, section)
            name = self.ident(item.get("id"), section)
            domain = tuple(self.value(v, section, name) for v in self.listof(item.get("domain"), section, name))
            actions.append(ActionVariable(name, domain))
        for item in self.listof(raw.get("vars", []), section):
            item = self.mapping(item, section)
            name = self.ident(item.get("id"), section)
            domain = tuple(self.value(v, section, name) for v in self.listof(item.get("domain"), section, name))
            parents = tuple(self.ident(p, section, name) for p in self.listof(item.get("parents"), section, name))
            table: dict[tuple[str, ...], str] = {}
            for row in self.listof(item.get("table"), section, name):
                if not isinstance(row, list) or len(row) != 2 or not isinstance(row[0], list):
                    self.fail("syntax", f"malformed table row in {name}", section, name)
                key = tuple(self.value(v, section, name) for v in row[0])
                if len(key) != len(parents):
                    self.fail("domain-mismatch", f"table row arity differs from parents of {name}", section, name)
                if key in table:
                    self.fail("syntax", f"duplicate table row {key} in {name}", section, name)
                table[key] = self.value(row[1], section, name)
            endo.append(EndogenousVariable(name, domain, parents, table))
        model = CausalModel(tuple(exo), tuple(endo), tuple(actions))
        self.check_model(model, section)
        return model

    def check_model(self, model: CausalModel, section: str) -> None:
        problems = validate_model(model)
        if problems:
            v = problems[0]
            if v.kind == "duplicate":
                self.fail("syntax", f"duplicate variable id: {v.variable}", section, v.variable)
            self.fail(_VIOLATION_CODES[v.kind], v.message, section, v.variable)

    def literals(self, raw: Any, model: CausalModel, *path, actions_only: bool = False) -> dict[str, str]:
        raw = self.mapping(raw, *path)
        if not raw:
            self.fail("syntax", "expected at least one literal", *path)
        out = {}
        for name, value in raw.items():
            self.ident(name, *path)
            self.value(value, *path)
            if name not in model.variables:
                self.fail("unknown-variable", f"unknown variable {name}", *path)
            if actions_only and name not in model.action_names:
                self.fail("unknown-variable", f"{name} is not an action variable", *path)
            if value not in model.domain(name):
                self.fail("domain-mismatch", f"value {value} not in domain of {name}", *path)
            out[name] = value
        return out

    def agent(self, raw: Any, objective: CausalModel, section: str) -> AgentModel:
        raw = self.mapping(raw, section)
        unknown = set(raw) - {"model", "observables", "aims", "policy", "committed"}
        if unknown:
            self.fail("syntax", f"unknown {section} keys: {sorted(unknown)}", section)
        subjective = objective if raw.get("model") is None else self.model(raw["model"], section)
        for name, var in subjective.variables.items():
            other = objective.variables.get(name)
            if other is not None and (other.domain != var.domain and set(other.domain) != set(var.domain)):
                self.fail("domain-mismatch", f"domain of {name} differs from the objective model", section, name)
        observables = []
        for name in self.listof(raw.get("observables", []), section, "observables"):
            self.ident(name, section, "observables")
            if name not in subjective.variables:
                self.fail("unknown-variable", f"unknown observable {name}", section, "observables")
            observables.append(name)
        aims = [
            Event(self.literals(a, subjective, section, "aims"))
            for a in self.listof(raw.get("aims", []), section, "aims")
        ]
        if len(set(aims)) != len(aims):
            self.fail("syntax", "duplicate aim", section, "aims")
        policy = []
        for i, rule in enumerate(self.listof(raw.get("policy", []), section, "policy")):
            rule = self.mapping(rule, section, "policy", i)
            if set(rule) != {"if", "then"}:
                self.fail("syntax", "policy rules need 'if' and 'then'", section, "policy", i)
            cond = self.literals(rule["if"], subjective, section, "policy", i)
            act = self.literals(rule["then"], subjective, section, "policy", i, actions_only=True)
            policy.append(PolicyRule(Event(cond), Intervention(act)))
        committed = self.flag(raw.get("committed", False), section, "committed")
        agent = AgentModel(subjective, tuple(observables), tuple(aims), tuple(policy), committed)
        if policy:
            self.check_model(agent.bound_model, section)
            self.check_time_order(agent, section)
        return agent

    def check_time_order(self, agent: AgentModel, section: str) -> None:
        """``X@k`` names are time-indexed: a policy may only react to the same or earlier steps."""
        for i, rule in enumerate(agent.policy):
            for act in rule.action.variables:
                m = _TIME_SUFFIX.search(act)
                if not m:
                    continue
                for cond in rule.condition.variables:
                    c = _TIME_SUFFIX.search(cond)
                    if c and int(c.group(1)) > int(m.group(1)):
                        self.fail("syntax", f"policy for {act} depends on later variable {cond}", section, "policy", i)

    # ---- whole scenario

    def scenario(self, tree: Any) -> Scenario:
        tree = self.mapping(tree)
        known = {"format", "model", "agent", "snapshot", "performed", "plan", "realized", "config", "queries"}
        unknown = set(tree) - known
        if unknown:
            self.fail("syntax", f"unknown sections: {sorted(unknown)}")
        if tree.get("format", FORMAT_VERSION) != FORMAT_VERSION:
            self.fail("syntax", f"unsupported format {tree.get('format')!r}", "format")
        if "model" not in tree:
            self.fail("syntax", "missing model section")
        objective = self.model(tree["model"], "model")
        agent = self.agent(tree.get("agent") or {}, objective, "agent")
        snapshot = agent if tree.get("snapshot") is None else self.agent(tree["snapshot"], objective, "snapshot")

        performed = Intervention()
        if tree.get("performed"):
            performed = Intervention(
                self.literals(tree["performed"], objective, "performed", actions_only=True)
            )
            self.literals(tree["performed"], agent.subjective_model, "performed", actions_only=True)
            for name in performed.variables:
                if name in agent.bound_model.bound_actions:
                    self.fail("syntax", f"performed action {name} is bound to the policy", "performed")
        plan = None
        if tree.get("plan") is not None:
            plan = Intervention(self.literals(tree["plan"], agent.subjective_model, "plan", actions_only=True))
            if not performed.issubset(plan):
                self.fail("syntax", "performed actions must be part of the plan", "plan")

        realized = None
        if tree.get("realized") is not None:
            realized = self.literals(tree["realized"], objective, "realized")
            self.check_realized(objective, performed, realized)

        config = self.config(tree.get("config") or {}, agent.subjective_model)
        queries = tuple(
            self.query(q, agent.subjective_model, i)
            for i, q in enumerate(self.listof(tree.get("queries", []), "queries"))
        )
        return Scenario(objective, agent, performed, snapshot, plan, realized, config, queries)

    def check_realized(self, model: CausalModel, performed: Intervention, realized: dict[str, str]) -> None:
        missing = [n for n in model.variables if n not in realized]
        if missing:
            self.fail("inconsistent-realized", f"realized world misses {', '.join(missing)}", "realized")
        for name, value in performed.settings:
            if realized[name] != value:
                self.fail("inconsistent-realized", f"realized {name}={realized[name]} but performed {value}", "realized")
        do = {a: realized[a] for a in model.action_names}
        for ctx, p in enumerate_contexts(model):
            if p > 0.0 and _evaluate(model, dict(ctx), do) == realized:
                return
        self.fail("inconsistent-realized", "no positive-probability context produces the realized world", "realized")

    def config(self, raw: Any, model: CausalModel) -> IntentConfig:
        raw = self.mapping(raw, "config")
        allowed = {"tau", "epsilon", "tolerance", "reference", "exclude_avoided_results", "knowledge_mode"}
        unknown = set(raw) - allowed
        if unknown:
            self.fail("syntax", f"unknown config keys: {sorted(unknown)}", "config")
        kwargs: dict[str, Any] = {}
        for key in ("tau", "epsilon", "tolerance"):
            if key in raw:
                kwargs[key] = self.number(raw[key], "config", key)
        if raw.get("reference") is not None:
            kwargs["reference_actions"] = tuple(
                Intervention(self.literals(r, model, "config", "reference", actions_only=True))
                for r in self.listof(raw["reference"], "config", "reference")
            )
        if "exclude_avoided_results" in raw:
            kwargs["exclude_avoided_results"] = self.flag(
                raw["exclude_avoided_results"], "config", "exclude_avoided_results"
            )
        if "knowledge_mode" in raw:
            try:
                kwargs["knowledge_mode"] = KnowledgeMode(raw["knowledge_mode"])
            except ValueError:
                self.fail("syntax", f"unknown knowledge mode {raw['knowledge_mode']!r}", "config", "knowledge_mode")
        try:
            return IntentConfig(**kwargs)
        except ConfigError as exc:
            key = next((k for k in ("tau", "epsilon", "tolerance") if k in raw), None)
            self.fail("bad-threshold", str(exc), "config", *([key] if key else []))

    def query(self, raw: Any, model: CausalModel, i: int) -> Query:
        raw = self.mapping(raw, "queries", i)
        kind = raw.get("definition")
        if kind not in QUERY_KINDS:
            self.fail("syntax", f"unknown query definition {kind!r}", "queries", i)
        unknown = set(raw) - {"definition", "result", "action", "via"}
        if unknown:
            self.fail("syntax", f"unknown query keys: {sorted(unknown)}", "queries", i)
        result = Event(self.literals(raw.get("result"), model, "queries", i))
        action = via = None
        if raw.get("action") is not None:
            if kind == "ulterior":
                self.fail("syntax", "ulterior queries take their actions from the policy", "queries", i)
            action = Intervention(self.literals(raw["action"], model, "queries", i, actions_only=True))
        if raw.get("via") is not None:
            if kind != "oblique":
                self.fail("syntax", "'via' only applies to oblique queries", "queries", i)
            via = Event(self.literals(raw["via"], model, "queries", i))
        return Query(kind, result, action, via)


def build_scenario(tree: Any, positions: Mapping[tuple, tuple[int, int]] | None = None) -> Scenario:
    """Validate a scenario tree and construct the :class:`Scenario`."""
    return _Builder(positions).scenario(tree)


# --------------------------------------------------------------------------
# Scenario -> tree


def model_to_tree(model: CausalModel) -> dict[str, Any]:
    domains = {n: v.domain for n, v in model.variables.items()}

    def rows(var: EndogenousVariable):
        keys = itertools.product(*(domains[p] for p in var.parents))
        return [[list(k), var.table[k]] for k in keys]

    return {
        "exo": [{"id": u.name, "distribution": [[v, p] for v, p in u.distribution]} for u in model.exogenous],
        "actions": [{"id": a.name, "domain": list(a.domain)} for a in model.actions],
        "vars": [
            {"id": v.name, "domain": list(v.domain), "parents": list(v.parents), "table": rows(v)}
            for v in model.endogenous
        ],
    }


def agent_to_tree(agent: AgentModel, objective: CausalModel) -> dict[str, Any]:
    return {
        "model": None if agent.subjective_model == objective else model_to_tree(agent.subjective_model),
        "observables": list(agent.observables),
        "aims": [a.as_dict() for a in agent.aims],
        "policy": [{"if": r.condition.as_dict(), "then": r.action.as_dict()} for r in agent.policy],
        "committed": agent.committed,
    }


def config_to_tree(config: IntentConfig) -> dict[str, Any]:
    return {
        "tau": config.tau,
        "epsilon": config.epsilon,
        "tolerance": config.tolerance,
        "reference": None
        if config.reference_actions is None
        else [r.as_dict() for r in config.reference_actions],
        "exclude_avoided_results": config.exclude_avoided_results,
        "knowledge_mode": config.knowledge_mode.value,
    }


def world_items(model: CausalModel, world: Mapping[str, str]) -> list[tuple[str, str]]:
    return [(n, world[n]) for n in model.variables if n in world]


def scenario_to_tree(s: Scenario) -> dict[str, Any]:
    obj = s.objective_model
    snapshot = None
    if s.commission_snapshot is not None and s.commission_snapshot != s.agent:
        snapshot = agent_to_tree(s.commission_snapshot, obj)
    return {
        "format": FORMAT_VERSION,
        "model": model_to_tree(obj),
        "agent": agent_to_tree(s.agent, obj),
        "snapshot": snapshot,
        "performed": s.performed.as_dict(),
        "plan": None if s.plan is None else s.plan.as_dict(),
        "realized": None if s.realized is None else dict(world_items(obj, s.realized)),
        "config": config_to_tree(s.config),
        "queries": [
            {
                "definition": q.kind,
                "result": q.result.as_dict(),
                "action": None if q.action is None else q.action.as_dict(),
                "via": None if q.via is None else q.via.as_dict(),
            }
            for q in s.queries
        ],
    }


# --------------------------------------------------------------------------
# files


def parse_json(text: str) -> Scenario:
    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("syntax", exc.msg, exc.lineno, exc.colno) from None
    return build_scenario(tree)


def serialize_json(s: Scenario) -> str:
    return json.dumps(scenario_to_tree(s), indent=2) + "\n"


def loads(text: str, suffix: str = ".intent") -> Scenario:
    if suffix == ".json":
        return parse_json(text)
    from .dsl import parse

    return parse(text)


def load(path: str | Path) -> Scenario:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), path.suffix)


def run_query(scenario: Scenario, query: Query, config: IntentConfig | None = None):
    """Evaluate one query; ``config`` replaces the scenario's own."""
    from . import intent

    cfg = scenario.config if config is None else config
    if query.kind == "direct":
        return intent.direct_intent_commission(scenario, query.result, query.action, cfg)
    if query.kind == "perspective":
        return intent.direct_intent_perspective(scenario, query.result, query.action, cfg)
    if query.kind == "means_end":
        return intent.means_end_intent(scenario, query.result, query.action, cfg)
    if query.kind == "oblique":
        return intent.oblique_intent(scenario, query.result, query.action, cfg, via=query.via)
    if query.kind == "ulterior":
        return intent.ulterior_intent(scenario, query.result, cfg)
    if query.kind == "responsibility":
        return intent.moral_responsibility(scenario, query.result, query.action, cfg)
    raise ValueError(f"unknown query kind {query.kind!r}")
