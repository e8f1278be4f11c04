import pytest

from intentcheck import (
    ActionVariable,
    AgentModel,
    CausalModel,
    EndogenousVariable,
    Event,
    ExogenousVariable,
    IntentConfig,
    Intervention,
    Scenario,
)
from intentcheck.corpus import entry

YN = ("no", "yes")


def copy_table(name, parent):
    return EndogenousVariable(name, YN, (parent,), {("no",): "no", ("yes",): "yes"})


def bomb_model(p=0.3):
    """Fuse -> Explode <- Plant, Explode -> Death; the four-variable bomb."""
    return CausalModel(
        exogenous=(ExogenousVariable("Fuse", (("works", p), ("fails", 1.0 - p))),),
        actions=(ActionVariable("Plant", YN),),
        endogenous=(
            EndogenousVariable(
                "Explode",
                YN,
                ("Plant", "Fuse"),
                {
                    ("no", "works"): "no",
                    ("no", "fails"): "no",
                    ("yes", "works"): "yes",
                    ("yes", "fails"): "no",
                },
            ),
            copy_table("Death", "Explode"),
            copy_table("Payout", "Explode"),
        ),
    )


@pytest.fixture
def bomb():
    return bomb_model()


@pytest.fixture
def bomb_scenario():
    model = bomb_model()
    agent = AgentModel(model, ("Explode", "Death", "Payout"), (Event({"Payout": "yes"}),))
    plant = Intervention({"Plant": "yes"})
    return Scenario(model, agent, plant, agent, plant)


@pytest.fixture
def corpus_scenario():
    return lambda name: entry(name).scenario()


@pytest.fixture
def default_config():
    return IntentConfig()
