"""The shipped scenario corpus and its golden verdicts.

Each ``corpus/<name>.intent`` file has a ``<name>.golden.json`` companion
recording, per query, the expected verdict and every clause outcome, plus the
number of capacity requirements the scenario is expected to meet.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Any

from .dsl import parse
from .intent import check_capacity
from .scenario import Scenario, run_query

# declaration order; output of corpus runs follows it
NAMES = (
    "unreliable_bomb",
    "dud_bomb",
    "fake_bomb",
    "bomb_alt_payout",
    "cowardly_jackal",
    "smith_bribery",
    "burning_building",
    "hunters",
    "dentist",
)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    document: str
    expected: dict[str, Any]

    def scenario(self) -> Scenario:
        return parse(self.document)


def _read(filename: str) -> str:
    return resources.files("intentcheck").joinpath("corpus", filename).read_text(encoding="utf-8")


def corpus() -> list[CorpusEntry]:
    return [
        CorpusEntry(name, _read(f"{name}.intent"), json.loads(_read(f"{name}.golden.json")))
        for name in NAMES
    ]


def entry(name: str) -> CorpusEntry:
    if name not in NAMES:
        raise KeyError(name)
    return CorpusEntry(name, _read(f"{name}.intent"), json.loads(_read(f"{name}.golden.json")))


def observed(scenario: Scenario, **overrides) -> dict[str, Any]:
    """What the golden file would record for ``scenario`` under config overrides."""
    config = replace(scenario.config, **overrides) if overrides else scenario.config
    verdicts = []
    for q in scenario.queries:
        v = run_query(scenario, q, config)
        verdicts.append({"query": str(q), "holds": v.holds, "clauses": v.clause_map()})
    return {"capacity": check_capacity(scenario).passed, "verdicts": verdicts}


def diff(expected: dict[str, Any], actual: dict[str, Any]) -> list[str]:
    out = []
    if expected["capacity"] != actual["capacity"]:
        out.append(f"capacity: expected {expected['capacity']}, got {actual['capacity']}")
    exp = {v["query"]: v for v in expected["verdicts"]}
    act = {v["query"]: v for v in actual["verdicts"]}
    for query in [*exp, *(q for q in act if q not in exp)]:
        if query not in act:
            out.append(f"{query}: missing from scenario")
            continue
        if query not in exp:
            out.append(f"{query}: no golden verdict")
            continue
        e, a = exp[query], act[query]
        if e["holds"] != a["holds"]:
            out.append(f"{query}: expected holds={e['holds']}, got {a['holds']}")
        for clause in [*e["clauses"], *(c for c in a["clauses"] if c not in e["clauses"])]:
            if e["clauses"].get(clause) != a["clauses"].get(clause):
                out.append(
                    f"{query}: clause {clause} expected {e['clauses'].get(clause)}, got {a['clauses'].get(clause)}"
                )
    return out


def check_corpus(**overrides) -> list[tuple[str, list[str]]]:
    """(name, mismatches) per corpus scenario; config fields in ``overrides`` replace each file's."""
    results = []
    for e in corpus():
        results.append((e.name, diff(e.expected, observed(e.scenario(), **overrides))))
    return results
