from dataclasses import replace

import pytest

from conftest import YN, bomb_model
from intentcheck import (
    ActionVariable,
    AgentModel,
    CausalModel,
    ClauseResult,
    Definition,
    EndogenousVariable,
    Event,
    ExogenousVariable,
    IntentConfig,
    IntentError,
    Intervention,
    KnowledgeMode,
    Scenario,
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
from intentcheck.dsl import parse

DEATH = Event({"Death": "yes"})
PAYOUT = Event({"Payout": "yes"})
EXPLODE = Event({"Explode": "yes"})
PLANT = Intervention({"Plant": "yes"})


# ---- capacity


def test_capacity_full_bomb(corpus_scenario):
    report = check_capacity(corpus_scenario("unreliable_bomb"))
    assert report.passed == 10 and report.ok


def test_capacity_empty_aims(bomb_scenario):
    s = replace(bomb_scenario, agent=replace(bomb_scenario.agent, aims=()))
    assert check_capacity(s).failing() == [10]


def test_capacity_single_valued_action():
    model = CausalModel(
        actions=(ActionVariable("A", ("go",)),),
        endogenous=(EndogenousVariable("X", YN, ("A",), {("go",): "yes"}),),
    )
    agent = AgentModel(model, ("X",), (Event({"X": "yes"}),))
    s = Scenario(model, agent, Intervention({"A": "go"}), agent)
    assert check_capacity(s).failing() == [2]


# ---- knowledge


def _copy_model():
    return CausalModel(
        exogenous=(ExogenousVariable("O", (("no", 0.4), ("yes", 0.6))),),
        actions=(ActionVariable("A", YN),),
        endogenous=(
            EndogenousVariable("X", YN, ("O",), {("no",): "no", ("yes",): "yes"}),
            EndogenousVariable(
                "Y", YN, ("A", "O"),
                {("no", "no"): "no", ("no", "yes"): "yes", ("yes", "no"): "yes", ("yes", "yes"): "no"},
            ),
        ),
    )


def test_knowledge_declared(bomb_scenario):
    assert knowledge_holds(bomb_scenario.agent, DEATH, IntentConfig())


def test_knowledge_inferred_copy():
    agent = AgentModel(_copy_model(), ("O",))
    assert knowledge_holds(agent, Event({"X": "yes"}), IntentConfig())
    declared_only = IntentConfig(knowledge_mode=KnowledgeMode.DECLARED_ONLY)
    assert not knowledge_holds(agent, Event({"X": "yes"}), declared_only)


def test_knowledge_not_derivable():
    # Y depends on O and the action; with nothing observed it is unknown
    agent = AgentModel(_copy_model(), ())
    assert not knowledge_holds(agent, Event({"Y": "yes"}), IntentConfig())
    # once O is observed, Y is a function of O under each fixed action
    agent = AgentModel(_copy_model(), ("O",))
    assert knowledge_holds(agent, Event({"Y": "yes"}), IntentConfig())


# ---- direct intent


def test_jackal_direct_intent(corpus_scenario):
    s = corpus_scenario("cowardly_jackal")
    v = direct_intent_commission(s, Event({"Kill": "yes"}), Intervention({"Act": "shoot"}), s.config)
    assert v.holds
    assert v.clause("DIc3").evidence["probability"] == pytest.approx(0.01, abs=1e-9)


def test_bomb_payout_explicit_aim(bomb_scenario):
    v = direct_intent_commission(bomb_scenario, PAYOUT, PLANT, IntentConfig())
    assert v.holds and v.clause("DIc4a").holds


def test_single_action_fails_free_agency(bomb_scenario):
    v = direct_intent_commission(bomb_scenario, PAYOUT, PLANT, IntentConfig(reference_actions=()))
    assert not v.holds
    assert not v.clause("DIc1").holds


def test_implicit_aim_tie_is_not_evidence():
    # the result happens regardless of the action: no alternative is less likely
    model = CausalModel(
        exogenous=(ExogenousVariable("U", (("no", 0.5), ("yes", 0.5))),),
        actions=(ActionVariable("A", YN),),
        endogenous=(EndogenousVariable("X", YN, ("U",), {("no",): "no", ("yes",): "yes"}),),
    )
    agent = AgentModel(model, ("X",))
    s = Scenario(model, agent, Intervention({"A": "yes"}), agent)
    v = direct_intent_commission(s, Event({"X": "yes"}))
    assert not v.clause("DIc4b").holds and not v.clause("DIc3").holds and not v.holds


def test_unknown_result_variable(bomb_scenario):
    with pytest.raises(Exception):
        direct_intent_commission(bomb_scenario, Event({"Nope": "yes"}), PLANT)


# ---- perspective


def test_dud_perspective_equals_commission(corpus_scenario):
    s = corpus_scenario("dud_bomb")
    assert s.realized["Explode"] == "no"
    commission = direct_intent_commission(s, PAYOUT)
    perspective = direct_intent_perspective(s, PAYOUT)
    assert [c.holds for c in commission.clauses] == [c.holds for c in perspective.clauses]
    assert [c.evidence for c in commission.clauses] == [c.evidence for c in perspective.clauses]
    assert perspective.holds


def test_perspective_needs_snapshot(bomb_scenario):
    s = replace(bomb_scenario, commission_snapshot=None)
    with pytest.raises(IntentError, match="snapshot"):
        direct_intent_perspective(s, PAYOUT)


def test_perspective_uses_snapshot_not_current_model(bomb_scenario):
    # after the act the agent learns the bomb never works; the snapshot still governs
    later = replace(bomb_scenario.agent, subjective_model=bomb_model(0.0))
    s = replace(bomb_scenario, agent=later)
    assert not direct_intent_commission(s, PAYOUT).holds
    assert direct_intent_perspective(s, PAYOUT).holds


# ---- moral responsibility


def test_mr_exploded(corpus_scenario):
    v = moral_responsibility(corpus_scenario("unreliable_bomb"), DEATH)
    assert v.holds


def test_mr_dud(corpus_scenario):
    s = corpus_scenario("dud_bomb")
    v = moral_responsibility(s, DEATH)
    assert not v.holds and not v.clause("MR2").holds
    assert direct_intent_commission(s, PAYOUT).holds
    assert oblique_intent(s, DEATH).holds


def test_mr_requires_realized(bomb_scenario):
    with pytest.raises(IntentError, match="realized"):
        moral_responsibility(bomb_scenario, DEATH)


def test_mr3_false_when_action_minimises(corpus_scenario):
    s = corpus_scenario("unreliable_bomb")
    v = moral_responsibility(s, Event({"Death": "no"}), Intervention({"Plant": "no"}))
    # not planting uniquely minimises P(Death=no)? no: it maximises it; planting minimises it
    assert v.clause("MR3").holds
    s2 = replace(s, performed=Intervention({"Plant": "yes"}))
    v2 = moral_responsibility(s2, Event({"Death": "no"}), PLANT)
    assert not v2.clause("MR3").holds and not v2.holds


# ---- means-end


def test_smith_means_end(corpus_scenario):
    s = corpus_scenario("smith_bribery")
    v = means_end_intent(s, Event({"MayorCorrupted": "yes"}))
    assert v.holds
    assert v.trace["intended"] == "ExposeCorruption=yes"


def test_bomb_means_end(corpus_scenario):
    assert means_end_intent(corpus_scenario("unreliable_bomb"), EXPLODE).holds


def test_alt_payout_breaks_necessity(corpus_scenario):
    v = means_end_intent(corpus_scenario("bomb_alt_payout"), EXPLODE)
    assert not v.holds
    assert v.clause_map() == {"ME1": True, "ME2": True, "ME3": True, "ME4": False}


def test_means_end_action_outside_plan(corpus_scenario):
    s = corpus_scenario("smith_bribery")
    with pytest.raises(IntentError, match="sub-assignment"):
        means_end_intent(s, Event({"MayorCorrupted": "yes"}), Intervention({"Bribe": "no"}))


# ---- oblique


def test_unreliable_bomb_oblique(corpus_scenario):
    v = oblique_intent(corpus_scenario("unreliable_bomb"), DEATH)
    assert v.holds
    assert not v.clause("OI2a").holds
    assert v.clause("OI2a").evidence["probability"] == pytest.approx(0.3, abs=1e-9)
    assert v.clause("OI2b").holds


def test_oblique_via_explosion(corpus_scenario):
    v = oblique_intent(corpus_scenario("unreliable_bomb"), DEATH, via=EXPLODE)
    assert v.holds
    assert v.clause("OI2b").evidence == {"given": "Explode=yes", "conditional": 1.0, "tau": 0.99}


def test_fake_bomb_matches_unreliable(corpus_scenario):
    a = oblique_intent(corpus_scenario("unreliable_bomb"), DEATH)
    b = oblique_intent(corpus_scenario("fake_bomb"), DEATH)
    assert a.to_dict() == b.to_dict()


def test_burning_building_avoidance_flag(corpus_scenario):
    s = corpus_scenario("burning_building")
    assert s.config.exclude_avoided_results
    excluded = oblique_intent(s, DEATH)
    assert not excluded.holds and not excluded.clause("OIav").holds
    assert excluded.clause("OI2a").holds
    literal = oblique_intent(s, DEATH, config=replace(s.config, exclude_avoided_results=False))
    assert literal.holds
    assert "OIav" not in literal.clause_map()


def test_oblique_conditional_undefined_is_false(corpus_scenario):
    # conditioning on a result the agent thinks impossible under the action
    s = corpus_scenario("cowardly_jackal")
    v = oblique_intent(s, Event({"Kill": "yes"}), via=Event({"Kill": "no"}))
    assert not v.holds


# ---- ulterior


def test_hunters_ulterior(corpus_scenario):
    v = ulterior_intent(corpus_scenario("hunters"), Event({"Death@2": "yes"}))
    assert v.holds
    assert v.trace["condition"] == "Sees@2=human"
    branches = {b["condition"]: b for b in v.clause("UI1").evidence["branches"]}
    assert branches["Sees@2=human"]["probability"] == pytest.approx(0.1, abs=1e-12)
    assert branches["Sees@2=nothing"]["foreseeable"] is False
    assert branches["Sees@2=deer"]["direct"] is False


def test_hunters_uncommitted(corpus_scenario):
    s = corpus_scenario("hunters")
    s = replace(s, agent=replace(s.agent, committed=False))
    v = ulterior_intent(s, Event({"Death@2": "yes"}))
    assert not v.holds and v.clause("UI1").holds and not v.clause("UI2").holds


def test_hunters_no_humans():
    from intentcheck.corpus import entry

    doc = entry("hunters").document.replace("{deer: 0.9, human: 0.1}", "{deer: 1, human: 0}")
    v = ulterior_intent(parse(doc), Event({"Death@2": "yes"}))
    assert not v.holds
    branches = {b["condition"]: b for b in v.clause("UI1").evidence["branches"]}
    assert branches["Sees@2=human"]["foreseeable"] is False


def test_ulterior_needs_policy(bomb_scenario):
    with pytest.raises(IntentError, match="policy"):
        ulterior_intent(bomb_scenario, DEATH)


def test_nondeterministic_policy_is_not_commitment(corpus_scenario):
    from intentcheck import PolicyRule

    s = corpus_scenario("hunters")
    cond = Event({"Sees@2": "human"})
    rules = [r for r in s.agent.policy] + [PolicyRule(cond, Intervention({"Shoot@2": "no"}))]
    s = replace(s, agent=replace(s.agent, policy=tuple(rules)))
    v = ulterior_intent(s, Event({"Death@2": "yes"}))
    branches = {b["condition"]: b for b in v.clause("UI1").evidence["branches"]}
    assert branches["Sees@2=human"]["deterministic"] is False
    assert not v.holds


# ---- verdicts and reports


def test_verdict_rejects_inconsistent_flag():
    clauses = (ClauseResult("MR1", True), ClauseResult("MR2", False), ClauseResult("MR3", True))
    with pytest.raises(ValueError):
        Verdict(Definition.MORAL_RESPONSIBILITY, True, clauses)


def test_verdict_rejects_empty_and_foreign_clauses():
    with pytest.raises(ValueError):
        Verdict(Definition.MORAL_RESPONSIBILITY, False, ())
    with pytest.raises(ValueError):
        Verdict(Definition.ULTERIOR, False, (ClauseResult("DIc1", False), ClauseResult("UI2", False)))


def test_explain_oblique(corpus_scenario):
    v = oblique_intent(corpus_scenario("unreliable_bomb"), DEATH, via=EXPLODE)
    text = explain(v)
    assert "[ok] OI2b: given=Explode=yes, conditional=1, tau=0.99" in text
    assert "[FAILED] OI2a: probability=0.3" in text
    assert text == explain(oblique_intent(corpus_scenario("unreliable_bomb"), DEATH, via=EXPLODE))


def test_explain_all_true(bomb_scenario):
    v = direct_intent_commission(bomb_scenario, PAYOUT)
    assert all(c.holds for c in v.clauses)
    assert "FAILED" not in explain(v)
