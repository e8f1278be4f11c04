"""Finite discrete structural causal models.

A model has three kinds of variables:

* exogenous variables carry all the randomness, each with its own
  independent distribution;
* action variables are set by the agent, either by intervention or, when a
  policy is attached, by the first policy rule whose condition holds;
* endogenous variables are computed from their parents through an
  exhaustive lookup table.

Everything is immutable once built and ``evaluate`` is a pure function.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping

ID_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(@[0-9]+)?\Z")
VALUE_PATTERN = re.compile(r"[A-Za-z0-9_]+\Z")
PROB_TOLERANCE = 1e-9

World = dict[str, str]


class ModelError(ValueError):
    """Raised when a model cannot be evaluated as requested."""


def _literals(pairs: Mapping[str, str] | Iterable[tuple[str, str]]) -> tuple[tuple[str, str], ...]:
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    out: dict[str, str] = {}
    for name, value in items:
        if name in out and out[name] != value:
            raise ValueError(f"variable {name} assigned twice")
        out[name] = value
    return tuple(sorted(out.items()))


def _render(literals: tuple[tuple[str, str], ...], sep: str) -> str:
    return sep.join(f"{k}={v}" for k, v in literals)


@dataclass(frozen=True)
class Event:
    """Conjunction of ``variable=value`` literals."""

    literals: tuple[tuple[str, str], ...]

    def __init__(self, literals: Mapping[str, str] | Iterable[tuple[str, str]]):
        lits = _literals(literals)
        if not lits:
            raise ValueError("an event needs at least one literal")
        object.__setattr__(self, "literals", lits)

    @classmethod
    def parse(cls, text: str) -> Event:
        """``"A=a & B=b"`` -> Event."""
        return cls(_split_literals(text, "&"))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.literals)

    def holds_in(self, world: Mapping[str, str]) -> bool:
        return all(world.get(k) == v for k, v in self.literals)

    def as_dict(self) -> dict[str, str]:
        return dict(self.literals)

    def __str__(self) -> str:
        return _render(self.literals, " & ")


@dataclass(frozen=True)
class Intervention:
    """Assignment of values to action variables (possibly empty)."""

    settings: tuple[tuple[str, str], ...] = ()

    def __init__(self, settings: Mapping[str, str] | Iterable[tuple[str, str]] = ()):
        object.__setattr__(self, "settings", _literals(settings))

    @classmethod
    def parse(cls, text: str) -> Intervention:
        """``"A=a, B=b"`` -> Intervention."""
        return cls(_split_literals(text, ","))

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(k for k, _ in self.settings)

    def as_dict(self) -> dict[str, str]:
        return dict(self.settings)

    def merged(self, *others: Intervention) -> Intervention:
        """Later interventions win on shared variables."""
        d = self.as_dict()
        for other in others:
            d.update(other.settings)
        return Intervention(d)

    def issubset(self, other: Intervention) -> bool:
        return set(self.settings) <= set(other.settings)

    def __bool__(self) -> bool:
        return bool(self.settings)

    def __str__(self) -> str:
        return _render(self.settings, ", ") if self.settings else "(none)"


def _split_literals(text: str, sep: str) -> list[tuple[str, str]]:
    pairs = []
    for chunk in text.split(sep):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, eq, value = chunk.partition("=")
        if not eq or not name.strip() or not value.strip():
            raise ValueError(f"malformed literal {chunk!r}")
        pairs.append((name.strip(), value.strip()))
    return pairs


@dataclass(frozen=True)
class ExogenousVariable:
    name: str
    distribution: tuple[tuple[str, float], ...]

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.distribution)


@dataclass(frozen=True)
class EndogenousVariable:
    name: str
    domain: tuple[str, ...]
    parents: tuple[str, ...]
    # parent value tuple -> value; must be total over the parents' product space
    table: Mapping[tuple[str, ...], str] = field(compare=True)


@dataclass(frozen=True)
class ActionVariable:
    name: str
    domain: tuple[str, ...]


@dataclass(frozen=True)
class PolicyRule:
    """``condition -> action``: when the condition holds, the agent sets the action."""

    condition: Event
    action: Intervention

    def __str__(self) -> str:
        return f"{self.condition} -> {self.action}"


@dataclass(frozen=True)
class Violation:
    kind: str  # unnormalized | non-dag | unknown-variable | domain-mismatch | duplicate | bad-id
    variable: str
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class CausalModel:
    exogenous: tuple[ExogenousVariable, ...] = ()
    endogenous: tuple[EndogenousVariable, ...] = ()
    actions: tuple[ActionVariable, ...] = ()
    # binds action variables to a committed policy (empty for plain models)
    policy: tuple[PolicyRule, ...] = ()

    def __post_init__(self) -> None:
        for name in ("exogenous", "endogenous", "actions", "policy"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @cached_property
    def variables(self) -> dict[str, ExogenousVariable | EndogenousVariable | ActionVariable]:
        out: dict = {}
        for var in (*self.exogenous, *self.actions, *self.endogenous):
            out.setdefault(var.name, var)
        return out

    def domain(self, name: str) -> tuple[str, ...]:
        try:
            return self.variables[name].domain
        except KeyError:
            raise ModelError(f"unknown variable {name}") from None

    @property
    def action_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.actions)

    @cached_property
    def bound_actions(self) -> frozenset[str]:
        return frozenset(name for rule in self.policy for name in rule.action.variables)

    @property
    def unbound_actions(self) -> tuple[str, ...]:
        return tuple(a for a in self.action_names if a not in self.bound_actions)

    def parents(self, name: str) -> tuple[str, ...]:
        var = self.variables[name]
        if isinstance(var, EndogenousVariable):
            return var.parents
        if isinstance(var, ActionVariable) and name in self.bound_actions:
            seen: dict[str, None] = {}
            for rule in self.policy:
                if name in rule.action.variables:
                    seen.update(dict.fromkeys(rule.condition.variables))
            return tuple(seen)
        return ()

    def with_policy(self, policy: Iterable[PolicyRule]) -> CausalModel:
        return replace(self, policy=tuple(policy))

    def descendants(self, names: Iterable[str]) -> set[str]:
        """Variables reachable from ``names`` along parent edges (excluding the roots)."""
        children: dict[str, list[str]] = {n: [] for n in self.variables}
        for n in self.variables:
            for p in self.parents(n):
                children.setdefault(p, []).append(n)
        out: set[str] = set()
        stack = list(names)
        while stack:
            for child in children.get(stack.pop(), ()):
                if child not in out:
                    out.add(child)
                    stack.append(child)
        return out

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        order = _toposort({n: self.parents(n) for n in self.variables})
        if order is None:
            raise ModelError("cycle detected")
        return order

    @cached_property
    def _compiled(self) -> list[tuple]:
        steps = []
        for name in self.topological_order:
            var = self.variables[name]
            if isinstance(var, ExogenousVariable):
                steps.append((name, "exo", None))
            elif isinstance(var, ActionVariable):
                rules = tuple(
                    (rule.condition.literals, dict(rule.action.settings)[name])
                    for rule in self.policy
                    if name in rule.action.variables
                )
                steps.append((name, "action", rules or None))
            else:
                steps.append((name, "endo", (var.parents, dict(var.table))))
        return steps


def _toposort(parents: Mapping[str, Iterable[str]]) -> tuple[str, ...] | None:
    """Kahn's algorithm keeping declaration order among ready nodes; None on a cycle."""
    pending = {n: [p for p in ps if p in parents] for n, ps in parents.items()}
    done: dict[str, None] = {}
    while len(done) < len(pending):
        progressed = False
        for name, ps in pending.items():
            if name not in done and all(p in done for p in ps):
                done[name] = None
                progressed = True
        if not progressed:
            return None
    return tuple(done)


def _find_cycle(parents: Mapping[str, Iterable[str]]) -> list[str]:
    state: dict[str, int] = {}
    path: list[str] = []

    def visit(n: str) -> list[str] | None:
        state[n] = 1
        path.append(n)
        for p in parents.get(n, ()):
            if p not in parents:
                continue
            if state.get(p) == 1:
                return path[path.index(p):] + [p]
            if p not in state:
                found = visit(p)
                if found:
                    return found
        state[n] = 2
        path.pop()
        return None

    for n in parents:
        if n not in state:
            found = visit(n)
            if found:
                return found
    return []


def validate_model(model: CausalModel) -> list[Violation]:
    """Every violated invariant of ``model``; an empty list means valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for var in (*model.exogenous, *model.actions, *model.endogenous):
        if not ID_PATTERN.match(var.name):
            out.append(Violation("bad-id", var.name, f"invalid variable id: {var.name!r}"))
        if var.name in seen:
            out.append(Violation("duplicate", var.name, f"duplicate variable id: {var.name}"))
        seen.add(var.name)
        dom = var.domain
        if not dom:
            out.append(Violation("domain-mismatch", var.name, f"empty domain: {var.name}"))
        if len(set(dom)) != len(dom):
            out.append(Violation("domain-mismatch", var.name, f"duplicate domain value: {var.name}"))
        for v in dom:
            if not VALUE_PATTERN.match(v):
                out.append(Violation("domain-mismatch", var.name, f"invalid value {v!r}: {var.name}"))

    for exo in model.exogenous:
        probs = [p for _, p in exo.distribution]
        if any(not (0.0 <= p <= 1.0) for p in probs):
            out.append(Violation("unnormalized", exo.name, f"probability outside [0, 1]: {exo.name}"))
        if abs(sum(probs) - 1.0) > PROB_TOLERANCE:
            out.append(Violation("unnormalized", exo.name, f"distribution not normalized: {exo.name}"))

    names = model.variables
    for var in model.endogenous:
        missing = [p for p in var.parents if p not in names]
        for p in missing:
            out.append(Violation("unknown-variable", var.name, f"unknown parent {p} of {var.name}"))
        if len(set(var.parents)) != len(var.parents):
            out.append(Violation("duplicate", var.name, f"repeated parent of {var.name}"))
        if missing:
            continue
        space = set(itertools.product(*(names[p].domain for p in var.parents)))
        keys = set(var.table)
        if keys - space:
            out.append(Violation("domain-mismatch", var.name, f"table row outside parent domains: {var.name}"))
        if space - keys:
            out.append(Violation("domain-mismatch", var.name, f"table not total: {var.name}"))
        if any(v not in var.domain for v in var.table.values()):
            out.append(Violation("domain-mismatch", var.name, f"table output outside domain: {var.name}"))

    action_set = set(model.action_names)
    for rule in model.policy:
        for name, value in (*rule.condition.literals, *rule.action.settings):
            if name not in names:
                out.append(Violation("unknown-variable", name, f"policy references unknown variable {name}"))
            elif value not in names[name].domain:
                out.append(Violation("domain-mismatch", name, f"policy value {value} not in domain of {name}"))
        for name in rule.action.variables:
            if name in names and name not in action_set:
                out.append(Violation("unknown-variable", name, f"policy binds non-action variable {name}"))

    graph = {n: model.parents(n) for n in names}
    if _toposort(graph) is None:
        cycle = _find_cycle(graph)
        out.append(Violation("non-dag", cycle[0] if cycle else "", "cycle detected: " + " <- ".join(cycle)))
    return out


def _check_settings(model: CausalModel, intervention: Intervention) -> None:
    actions = set(model.action_names)
    for name, value in intervention.settings:
        if name not in model.variables:
            raise ModelError(f"intervention on unknown variable {name}")
        if name not in actions:
            raise ModelError(f"{name} is not an action variable")
        if value not in model.domain(name):
            raise ModelError(f"value {value} not in domain of {name}")


def evaluate(
    model: CausalModel,
    context: Mapping[str, str],
    intervention: Intervention = Intervention(),
) -> World:
    """The unique world reached from an exogenous context under an intervention."""
    _check_settings(model, intervention)
    return _evaluate(model, context, intervention.as_dict())


def _evaluate(model: CausalModel, context: Mapping[str, str], do: Mapping[str, str]) -> World:
    world: World = {}
    for name, kind, data in model._compiled:
        if kind == "exo":
            try:
                world[name] = context[name]
            except KeyError:
                raise ModelError(f"missing context entry for {name}") from None
        elif kind == "action":
            if name in do:
                world[name] = do[name]
            elif data is None:
                raise ModelError(f"unbound action variable {name}")
            else:
                for condition, value in data:
                    if all(world[k] == v for k, v in condition):
                        world[name] = value
                        break
                else:
                    raise ModelError(f"policy undefined for {name} in this context")
        else:
            parents, table = data
            world[name] = table[tuple(world[p] for p in parents)]
    return world


def intervened_model(model: CausalModel, intervention: Intervention) -> CausalModel:
    """Do-surgery: each intervened action becomes a constant single-valued action.

    The surgically fixed action keeps its id but its domain collapses to the set
    value, so evaluating with an empty intervention reproduces the original
    intervention's world.
    """
    _check_settings(model, intervention)
    fixed = intervention.as_dict()
    if not fixed:
        return model
    actions = tuple(
        ActionVariable(a.name, (fixed[a.name],)) if a.name in fixed else a for a in model.actions
    )
    # a single-valued action with a policy-free binding: its rule always fires
    rules = tuple(
        rule for rule in model.policy if not set(rule.action.variables) & set(fixed)
    ) + tuple(PolicyRule(_TRUE_CONDITION, Intervention({n: v})) for n, v in sorted(fixed.items()))
    return CausalModel(model.exogenous, model.endogenous, actions, rules)


class _AlwaysEvent(Event):
    """An event with no literals; only used internally for constant actions."""

    def __init__(self) -> None:
        object.__setattr__(self, "literals", ())

    def __str__(self) -> str:
        return "true"


_TRUE_CONDITION = _AlwaysEvent()

