import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import YN, bomb_model
from intentcheck import (
    ActionVariable,
    CausalModel,
    EndogenousVariable,
    ExogenousVariable,
    Intervention,
    ModelError,
    evaluate,
    intervened_model,
    validate_model,
)
from randmodels import random_model

CHAIN = CausalModel(
    exogenous=(ExogenousVariable("U", (("0", 0.5), ("1", 0.5))),),
    endogenous=(EndogenousVariable("X", ("0", "1"), ("U",), {("0",): "0", ("1",): "1"}),),
)


def test_valid_chain_has_no_violations():
    assert validate_model(CHAIN) == []


def test_unnormalized_distribution_is_reported():
    model = CausalModel(exogenous=(ExogenousVariable("U", (("0", 0.5), ("1", 0.4))),))
    msgs = [str(v) for v in validate_model(model)]
    assert msgs == ["distribution not normalized: U"]


def test_cycle_is_reported():
    model = CausalModel(
        endogenous=(
            EndogenousVariable("X", YN, ("Y",), {("no",): "no", ("yes",): "yes"}),
            EndogenousVariable("Y", YN, ("X",), {("no",): "no", ("yes",): "yes"}),
        )
    )
    violations = validate_model(model)
    assert [v.kind for v in violations] == ["non-dag"]
    assert str(violations[0]).startswith("cycle detected")


@pytest.mark.parametrize(
    "model, kind",
    [
        (CausalModel(endogenous=(EndogenousVariable("X", YN, ("Z",), {("no",): "no"}),)), "unknown-variable"),
        (
            CausalModel(
                actions=(ActionVariable("A", YN),),
                endogenous=(EndogenousVariable("X", YN, ("A",), {("no",): "no"}),),
            ),
            "domain-mismatch",
        ),
        (
            CausalModel(
                actions=(ActionVariable("A", YN),),
                endogenous=(EndogenousVariable("X", YN, ("A",), {("no",): "no", ("yes",): "maybe"}),),
            ),
            "domain-mismatch",
        ),
        (CausalModel(actions=(ActionVariable("A", YN), ActionVariable("A", YN))), "duplicate"),
        (CausalModel(actions=(ActionVariable("A", ()),)), "domain-mismatch"),
        (CausalModel(actions=(ActionVariable("1A", YN),)), "bad-id"),
    ],
)
def test_each_invariant_has_a_violation(model, kind):
    assert kind in {v.kind for v in validate_model(model)}


def test_chain_identity_propagation():
    assert evaluate(CHAIN, {"U": "1"}) == {"U": "1", "X": "1"}


def test_bomb_hand_evaluation():
    # hand-evaluated: a working fuse plus planting gives explosion and death
    model = bomb_model()
    w = evaluate(model, {"Fuse": "works"}, Intervention({"Plant": "yes"}))
    assert (w["Explode"], w["Death"]) == ("yes", "yes")
    w = evaluate(model, {"Fuse": "works"}, Intervention({"Plant": "no"}))
    assert (w["Explode"], w["Death"]) == ("no", "no")


@pytest.mark.parametrize(
    "context, do, message",
    [
        ({}, {"Plant": "yes"}, "missing context"),
        ({"Fuse": "works"}, {"Bogus": "yes"}, "unknown variable"),
        ({"Fuse": "works"}, {"Death": "yes"}, "not an action"),
        ({"Fuse": "works"}, {}, "unbound action"),
        ({"Fuse": "works"}, {"Plant": "maybe"}, "not in domain"),
    ],
)
def test_evaluate_errors(context, do, message):
    with pytest.raises(ModelError, match=message):
        evaluate(bomb_model(), context, Intervention(do))


def test_surgery_makes_action_constant():
    model = bomb_model()
    cut = intervened_model(model, Intervention({"Plant": "no"}))
    assert cut.variables["Plant"].domain == ("no",)
    assert evaluate(cut, {"Fuse": "works"})["Plant"] == "no"
    # original untouched
    assert model.variables["Plant"].domain == YN


def test_empty_surgery_is_identity():
    model = bomb_model()
    assert intervened_model(model, Intervention()) == model


def test_surgery_rejects_non_actions():
    with pytest.raises(ModelError, match="not an action variable"):
        intervened_model(bomb_model(), Intervention({"Explode": "yes"}))
    with pytest.raises(ModelError):
        intervened_model(bomb_model(), Intervention({"Z": "yes"}))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_models_valid_total_and_pure(seed):
    model = random_model(random.Random(seed), max_vars=12)
    assert validate_model(model) == []
    assert set(model.topological_order) == set(model.variables)
    actions = model.action_names
    for ctx in itertools.product(*(u.domain for u in model.exogenous)):
        context = dict(zip((u.name for u in model.exogenous), ctx))
        do = Intervention({a: "1" for a in actions})
        w1 = evaluate(model, context, do)
        assert w1 == evaluate(model, context, do)
        assert set(w1) == set(model.variables)
        assert all(w1[n] in model.domain(n) for n in w1)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.data())
def test_surgery_commutes_with_evaluation(seed, data):
    model = random_model(random.Random(seed), max_vars=12)
    values = data.draw(st.lists(st.sampled_from(["0", "1"]), min_size=len(model.actions), max_size=len(model.actions)))
    do = Intervention(dict(zip(model.action_names, values)))
    cut = intervened_model(model, do)
    for ctx in itertools.product(*(u.domain for u in model.exogenous)):
        context = dict(zip((u.name for u in model.exogenous), ctx))
        assert evaluate(cut, context) == evaluate(model, context, do)
