"""Exact inference by enumerating every exogenous context.

All probability queries reduce to a weighted sum over the exogenous product
space, so the results are exact up to floating point and fully reproducible.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import CausalModel, Event, Intervention, ModelError, World, _check_settings, _evaluate

DEFAULT_CONTEXT_CAP = 2**24
CAP_ENV_VAR = "INTENT_CONTEXT_CAP"


class InferenceError(Exception):
    pass


class ModelTooLarge(InferenceError):
    pass


class UndefinedConditional(InferenceError):
    pass


def context_cap() -> int:
    raw = os.environ.get(CAP_ENV_VAR)
    return int(raw) if raw else DEFAULT_CONTEXT_CAP


@dataclass(frozen=True)
class ContextEnumeration:
    """Exogenous contexts with their probabilities, in canonical order.

    Each context is a tuple of ``(name, value)`` pairs in model declaration
    order. Conditioning keeps every entry and zeroes the excluded ones, so the
    enumeration always spans the full product space.
    """

    entries: tuple[tuple[tuple[tuple[str, str], ...], float], ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def positive(self):
        return [(dict(ctx), p) for ctx, p in self.entries if p > 0.0]

    @property
    def total(self) -> float:
        return math.fsum(p for _, p in self.entries)


def enumerate_contexts(model: CausalModel, cap: int | None = None) -> ContextEnumeration:
    cap = context_cap() if cap is None else cap
    size = math.prod(len(u.distribution) for u in model.exogenous)
    if size > cap:
        raise ModelTooLarge(f"model too large for exact inference: {size} contexts exceeds cap {cap}")
    names = [u.name for u in model.exogenous]
    entries = []
    for combo in itertools.product(*(u.distribution for u in model.exogenous)):
        ctx = tuple(zip(names, (v for v, _ in combo)))
        entries.append((ctx, math.prod(p for _, p in combo)))
    return ContextEnumeration(tuple(entries))


def _contexts(model: CausalModel, contexts: ContextEnumeration | None) -> ContextEnumeration:
    return enumerate_contexts(model) if contexts is None else contexts


def _worlds(model: CausalModel, do: Intervention, contexts: ContextEnumeration) -> list[tuple[World, float]]:
    _check_settings(model, do)
    settings = do.as_dict()
    return [(_evaluate(model, dict(ctx), settings), p) for ctx, p in contexts.entries if p > 0.0]


def _check_event(model: CausalModel, event: Event) -> None:
    if not isinstance(event, Event) or not event.literals:
        raise ValueError("event must be a non-empty conjunction of literals")
    for name, value in event.literals:
        if value not in model.domain(name):
            raise ModelError(f"value {value} not in domain of {name}")


def prob(
    model: CausalModel,
    do: Intervention,
    event: Event,
    contexts: ContextEnumeration | None = None,
) -> float:
    """P(event | do(...)), summed over contexts."""
    _check_event(model, event)
    ctxs = _contexts(model, contexts)
    total = math.fsum(p for world, p in _worlds(model, do, ctxs) if event.holds_in(world))
    return min(1.0, total)


def cond_prob(
    model: CausalModel,
    do: Intervention,
    event: Event,
    given: Event,
    tolerance: float = 1e-9,
    contexts: ContextEnumeration | None = None,
) -> float:
    """P(event | do(...), given); raises UndefinedConditional when P(given) <= tolerance."""
    _check_event(model, event)
    _check_event(model, given)
    worlds = _worlds(model, do, _contexts(model, contexts))
    denom = math.fsum(p for w, p in worlds if given.holds_in(w))
    if denom <= tolerance:
        raise UndefinedConditional(f"undefined conditional: P({given}) = {denom:.3g}")
    num = math.fsum(p for w, p in worlds if given.holds_in(w) and event.holds_in(w))
    return min(1.0, num / denom)


def condition_contexts(
    model: CausalModel,
    do: Intervention,
    given: Event,
    tolerance: float = 1e-9,
    contexts: ContextEnumeration | None = None,
) -> ContextEnumeration:
    """Contexts reweighted to P(u | do(...), given); excluded contexts get weight 0."""
    _check_event(model, given)
    ctxs = _contexts(model, contexts)
    _check_settings(model, do)
    settings = do.as_dict()
    keep = [
        p if p > 0.0 and given.holds_in(_evaluate(model, dict(ctx), settings)) else 0.0
        for ctx, p in ctxs.entries
    ]
    denom = math.fsum(keep)
    if denom <= tolerance:
        raise UndefinedConditional(f"undefined conditional: P({given}) = {denom:.3g}")
    return ContextEnumeration(tuple((ctx, w / denom) for (ctx, _), w in zip(ctxs.entries, keep)))


@dataclass(frozen=True)
class CauseWitness:
    context: dict[str, str]
    actual_action: Intervention
    counterfactual_action: Intervention


def but_for_cause(
    model: CausalModel,
    action: Intervention,
    reference: Sequence[Intervention],
    event: Event,
    contexts: ContextEnumeration | None = None,
) -> tuple[bool, CauseWitness | None]:
    """Contrastive but-for test at the level of exogenous contexts.

    True when some positive-probability context yields ``event`` under
    ``action`` but not under some alternative from ``reference``.
    """
    reference = list(reference)
    if not reference:
        raise ValueError("reference action set must be non-empty")
    if action in reference:
        raise ValueError("action must not be in its own reference set")
    _check_event(model, event)
    _check_settings(model, action)
    for alt in reference:
        _check_settings(model, alt)
    ctxs = _contexts(model, contexts)
    actual = action.as_dict()
    alts = [(alt, alt.as_dict()) for alt in reference]
    for ctx, p in ctxs.entries:
        if p <= 0.0:
            continue
        context = dict(ctx)
        if not event.holds_in(_evaluate(model, context, actual)):
            continue
        for alt, settings in alts:
            if not event.holds_in(_evaluate(model, context, settings)):
                return True, CauseWitness(context, action, alt)
    return False, None


def necessary_for(
    model: CausalModel,
    plan: Intervention,
    inner: Event,
    outer: Event,
    contexts: ContextEnumeration | None = None,
) -> bool:
    """Whether ``outer`` never occurs without ``inner`` under the plan."""
    _check_event(model, inner)
    _check_event(model, outer)
    return all(
        inner.holds_in(w) for w, _ in _worlds(model, plan, _contexts(model, contexts)) if outer.holds_in(w)
    )


def single_literal_events(model: CausalModel, names: Iterable[str] | None = None) -> list[Event]:
    """Every ``X=x`` over endogenous variables, in declaration and domain order."""
    pool = [v.name for v in model.endogenous] if names is None else list(names)
    return [Event({n: v}) for n in pool for v in model.domain(n)]
