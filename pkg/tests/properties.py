"""Invariant checks shared by the property tests and the acceptance suite.

Each check takes a scenario (plus a seeded rng where it needs one) and
returns a list of human-readable failures; an empty list means it passed.
"""

from __future__ import annotations

import random
from dataclasses import replace

from conftest import bomb_model
from intentcheck import (
    AgentModel,
    Event,
    IntentConfig,
    Intervention,
    Scenario,
    direct_intent_commission,
    direct_intent_perspective,
    means_end_intent,
    moral_responsibility,
    oblique_intent,
    ulterior_intent,
)
from intentcheck.intent import combine
from randmodels import perturb, random_model, random_policy, random_result, random_scenario


def intent_verdicts(s: Scenario, result: Event, config: IntentConfig | None = None) -> dict:
    out = {
        "direct": direct_intent_commission(s, result, config=config),
        "perspective": direct_intent_perspective(s, result, config=config),
        "means_end": means_end_intent(s, result, config=config),
        "oblique": oblique_intent(s, result, config=config),
    }
    if s.agent.policy:
        out["ulterior"] = ulterior_intent(s, result, config=config)
    return out


def _dicts(verdicts: dict) -> dict:
    return {k: v.to_dict() for k, v in verdicts.items()}


def _random_world(s: Scenario, rng: random.Random) -> dict[str, str]:
    model = s.objective_model
    return {n: rng.choice(model.domain(n)) for n in model.variables}


def outcome_independence(s: Scenario, result: Event, rng: random.Random) -> list[str]:
    base = _dicts(intent_verdicts(s, result))
    failures = []
    for _ in range(2):
        mutated = replace(s, realized=_random_world(s, rng))
        for kind, doc in _dicts(intent_verdicts(mutated, result)).items():
            if doc != base[kind]:
                failures.append(f"{kind} changed with the realized world")
    return failures


def subjectivity(s: Scenario, result: Event, rng: random.Random) -> list[str]:
    base = _dicts(intent_verdicts(s, result))
    failures = []
    for other in (perturb(s.objective_model, rng), random_model(rng)):
        changed = _dicts(intent_verdicts(replace(s, objective_model=other), result))
        failures += [f"{k} changed with the objective model" for k in base if changed[k] != base[k]]
    return failures


def free_agency(s: Scenario, result: Event, rng: random.Random) -> list[str]:
    cfg = replace(s.config, reference_actions=())
    verdicts = intent_verdicts(s, result, cfg)
    realized = replace(s, realized=_random_world(s, rng))
    verdicts["responsibility"] = moral_responsibility(realized, result, config=cfg)
    return [f"{k} holds without alternatives" for k, v in verdicts.items() if v.holds]


def causal_link(s: Scenario, result: Event) -> list[str]:
    model = s.agent.bound_model
    reachable = model.descendants(s.performed.variables)
    if set(result.variables) & reachable:
        return []
    verdicts = intent_verdicts(s, result)
    return [f"{k} holds for a non-descendant" for k in ("direct", "means_end", "oblique") if verdicts[k].holds]


def commitment(s: Scenario, result: Event) -> list[str]:
    if not s.agent.policy:
        return []
    uncommitted = replace(s, agent=replace(s.agent, committed=False))
    return ["ulterior holds uncommitted"] if ulterior_intent(uncommitted, result).holds else []


def tau_monotonicity(s: Scenario, result: Event) -> list[str]:
    taus = sorted({t for t in (0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0) if t > s.config.epsilon})
    flags = [oblique_intent(s, result, config=replace(s.config, tau=t)).holds for t in taus]
    return [] if all(a >= b for a, b in zip(flags, flags[1:])) else [f"oblique not monotone in tau: {flags}"]


def explicit_aim(s: Scenario, result: Event) -> list[str]:
    if not direct_intent_commission(s, result).holds:
        return []
    agent = replace(s.agent, aims=(*s.agent.aims, result))
    again = direct_intent_commission(replace(s, agent=agent, commission_snapshot=agent), result)
    return [] if again.holds else ["adding the result to aims broke direct intent"]


def reconstruction(verdicts) -> list[str]:
    return [
        f"{v.definition.value} flag disagrees with its clauses"
        for v in verdicts
        if combine(v.definition, v.clause_map()) != v.holds
    ]


def means_end_consistency(rng: random.Random) -> list[str]:
    """On the bomb model, direct intent for the payout brings means-end intent for the explosion."""
    model = bomb_model(rng.choice([0.01, 0.3, 0.5, 0.99, 1.0]))
    names = ["Explode", "Destroyed", "Death", "Payout"]
    observables = tuple(n for n in names if rng.random() < 0.7)
    aims = tuple(e for e in (Event({"Payout": "yes"}), Event({"Death": "yes"})) if rng.random() < 0.7)
    agent = AgentModel(model, observables, aims)
    plan = Intervention({"Plant": "yes"})
    s = Scenario(model, agent, plan, agent, plan)
    config = IntentConfig(tau=rng.choice([0.5, 0.99]))
    direct = direct_intent_commission(s, Event({"Payout": "yes"}), plan, config)
    means = means_end_intent(s, Event({"Explode": "yes"}), plan, config)
    if direct.holds and not means.holds:
        return [f"means-end fails though the payout is directly intended ({observables}, {aims})"]
    return []


def check_all(seed: int) -> list[str]:
    """Run every invariant on the scenario generated from ``seed``."""
    rng = random.Random(seed ^ 0x5EED)
    s = random_scenario(seed)
    result = random_result(s, rng)
    failures = []
    failures += outcome_independence(s, result, rng)
    failures += subjectivity(s, result, rng)
    failures += free_agency(s, result, rng)
    failures += causal_link(s, result)
    failures += tau_monotonicity(s, result)
    failures += explicit_aim(s, result)
    failures += reconstruction(intent_verdicts(s, result).values())
    failures += means_end_consistency(rng)
    committed = s if s.agent.policy else _with_policy(s, rng)
    if committed is not None:
        failures += commitment(committed, result)
    return [f"seed {seed}: {f}" for f in failures]


def _with_policy(s: Scenario, rng: random.Random) -> Scenario | None:
    model = s.agent.subjective_model
    if len(model.actions) < 2:
        return None
    policy = random_policy(model, rng)
    bound = {n for r in policy for n in r.action.variables}
    performed = Intervention({k: v for k, v in s.performed.settings if k not in bound})
    agent = replace(s.agent, policy=policy)
    return replace(s, agent=agent, commission_snapshot=agent, performed=performed)
