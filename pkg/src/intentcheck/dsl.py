"""The ``.intent`` scenario text format.

A document is a sequence of sections, each opened by a ``name:`` header at the
start of a line; indentation carries no meaning. Newlines end statements
except inside braces or parentheses, so long tables may span lines::

    format: 1
    model:
      exo Fuse {works: 0.3, fails: 0.7}
      action Plant {no, yes}
      var Explode {no, yes} (Plant, Fuse) {
        (no, works) -> no, (no, fails) -> no,
        (yes, works) -> yes, (yes, fails) -> no
      }
    agent:
      observables: Explode
      aims: Explode=yes
      committed: false
      policy: Seen@2=deer -> Shoot@2=yes
    performed: Plant=yes
    config:
      tau: 0.99
    queries:
      oblique Death=yes
      direct Payout=yes by Plant=yes

Model stanzas (``exo``, ``action``, ``var``) inside ``agent:`` or
``snapshot:`` define the agent's own model; without them the agent shares the
objective model. ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any

from .scenario import Scenario, ScenarioError, build_scenario, scenario_to_tree

SECTIONS = ("format", "model", "agent", "snapshot", "performed", "plan", "realized", "config", "queries")
_INLINE = {"format", "performed", "plan", "realized"}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>\#[^\n]*)|(?P<nl>\n)"
    r"|(?P<arrow>->)"
    r"|(?P<atom>[A-Za-z0-9_.@]+(?:(?<=[0-9][eE])[-+][0-9]+)?)"
    r"|(?P<punct>[{}(),:;=&])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # atom | punct | nl | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos, depth = 1, 0, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ScenarioError("syntax", f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            if depth == 0:
                tokens.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind == "arrow":
            tokens.append(Token("punct", tok, line, col))
        elif kind in ("atom", "punct"):
            if tok in "{(":
                depth += 1
            elif tok in "})":
                depth -= 1
                if depth < 0:
                    raise ScenarioError("syntax", f"unbalanced {tok!r}", line, col)
            tokens.append(Token(kind, tok, line, col))
        pos = m.end()
    if depth:
        raise ScenarioError("syntax", "unclosed bracket at end of document", line, pos - line_start + 1)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def peek(self, text: str) -> bool:
        return not self.at_end() and self.tok.kind == "punct" and self.tok.text == text

    def fail(self, message: str) -> None:
        tok = self.tokens[min(self.i, len(self.tokens) - 1)]
        raise ScenarioError("syntax", message, tok.line, tok.col)

    def expect(self, text: str) -> Token:
        if not self.peek(text):
            self.fail(f"expected {text!r}, found {self.describe()}")
        tok = self.tok
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.peek(text):
            self.i += 1
            return True
        return False

    def atom(self, what: str = "a name") -> str:
        if self.at_end() or self.tok.kind != "atom":
            self.fail(f"expected {what}, found {self.describe()}")
        text = self.tok.text
        self.i += 1
        return text

    def done(self) -> None:
        if not self.at_end():
            self.fail(f"unexpected {self.describe()}")

    def describe(self) -> str:
        if self.at_end():
            return "end of line"
        return repr(self.tok.text)

    def seq(self, item, close: str) -> list:
        """Comma-separated items up to ``close`` (consumed); empty allowed."""
        out = []
        if self.accept(close):
            return out
        while True:
            out.append(item())
            if self.accept(close):
                return out
            self.expect(",")


def _split_lines(tokens: list[Token]) -> list[list[Token]]:
    lines, cur = [], []
    for tok in tokens:
        if tok.kind in ("nl", "eof"):
            if cur:
                lines.append(cur)
            cur = []
        else:
            cur.append(tok)
    return lines


class _Parser:
    def __init__(self) -> None:
        self.tree: dict[str, Any] = {}
        self.positions: dict[tuple, tuple[int, int]] = {}

    def mark(self, tok: Token, *path) -> None:
        self.positions.setdefault(path, (tok.line, tok.col))

    # ---- shared pieces

    def literal(self, c: _Cursor, seen: dict[str, str]) -> None:
        start = c.tok if not c.at_end() else None
        name = c.atom("a variable name")
        c.expect("=")
        value = c.atom("a value")
        if name in seen:
            raise ScenarioError("syntax", f"variable {name} appears twice", start.line, start.col)
        seen[name] = value

    def literals(self, c: _Cursor, sep: str) -> dict[str, str]:
        out: dict[str, str] = {}
        self.literal(c, out)
        while c.accept(sep):
            self.literal(c, out)
        return out

    def event_list(self, c: _Cursor) -> list[dict[str, str]]:
        out = [self.literals(c, "&")]
        while c.accept(";"):
            out.append(self.literals(c, "&"))
        return out

    def name_list(self, c: _Cursor) -> list[str]:
        out = [c.atom()]
        while c.accept(","):
            out.append(c.atom())
        return out

    def is_none(self, c: _Cursor) -> bool:
        if not c.at_end() and c.tok.kind == "atom" and c.tok.text == "none" and c.i == len(c.tokens) - 1:
            c.i += 1
            return True
        return False

    # ---- model stanzas

    def stanza(self, c: _Cursor, model: dict[str, list], section: str) -> None:
        keyword = c.atom()
        tok = c.tok if not c.at_end() else c.tokens[-1]
        name = c.atom("a variable name")
        if (section, name) in self.positions:
            raise ScenarioError("syntax", f"duplicate variable id: {name}", tok.line, tok.col)
        self.mark(tok, section, name)
        if keyword == "exo":
            c.expect("{")

            def entry():
                v = c.atom("a value")
                c.expect(":")
                return [v, c.atom("a probability")]

            model["exo"].append({"id": name, "distribution": c.seq(entry, "}")})
        elif keyword == "action":
            c.expect("{")
            model["actions"].append({"id": name, "domain": c.seq(lambda: c.atom("a value"), "}")})
        elif keyword == "var":
            c.expect("{")
            domain = c.seq(lambda: c.atom("a value"), "}")
            c.expect("(")
            parents = c.seq(lambda: c.atom("a parent name"), ")")
            c.expect("{")

            def row():
                c.expect("(")
                key = c.seq(lambda: c.atom("a value"), ")")
                c.expect("->")
                return [key, c.atom("a value")]

            table = c.seq(row, "}")
            model["vars"].append({"id": name, "domain": domain, "parents": parents, "table": table})
        else:
            c.i -= 2
            c.fail(f"unknown statement {keyword!r}")
        c.done()

    # ---- sections

    def parse(self, text: str) -> tuple[dict[str, Any], dict]:
        lines = _split_lines(tokenize(text))
        section = None
        bodies: dict[str, list[list[Token]]] = {}
        for line in lines:
            head = line[0]
            if (
                head.kind == "atom"
                and head.text in SECTIONS
                and len(line) > 1
                and line[1].text == ":"
                and line[1].kind == "punct"
            ):
                section = head.text
                if section in bodies:
                    raise ScenarioError("syntax", f"section {section!r} appears twice", head.line, head.col)
                self.mark(head, section)
                bodies[section] = []
                rest = line[2:]
                if rest:
                    if section not in _INLINE:
                        t = rest[0]
                        raise ScenarioError("syntax", f"section {section!r} takes no inline content", t.line, t.col)
                    bodies[section].append(rest)
                continue
            if section is None:
                raise ScenarioError("syntax", f"expected a section header, found {head.text!r}", head.line, head.col)
            if section == "format":
                raise ScenarioError("syntax", "format takes a single value", head.line, head.col)
            bodies[section].append(line)

        for name in SECTIONS:
            if name in bodies:
                getattr(self, f"section_{name}")(bodies[name])
        return self.tree, self.positions

    def section_format(self, lines) -> None:
        if not lines:
            raise ScenarioError("syntax", "format needs a value", *self.positions[("format",)])
        c = _Cursor(lines[0])
        raw = c.atom("a format version")
        c.done()
        if raw != "1":
            raise ScenarioError("syntax", f"unsupported format {raw!r}", lines[0][0].line, lines[0][0].col)
        self.tree["format"] = 1

    def section_model(self, lines) -> None:
        model = {"exo": [], "actions": [], "vars": []}
        for line in lines:
            self.stanza(_Cursor(line), model, "model")
        self.tree["model"] = model

    def _agent(self, lines, section: str) -> dict[str, Any]:
        agent: dict[str, Any] = {}
        model = {"exo": [], "actions": [], "vars": []}
        for line in lines:
            c = _Cursor(line)
            if len(line) > 1 and line[1].text == ":" and line[1].kind == "punct":
                key = c.atom()
                c.expect(":")
                if key in agent and key != "policy":
                    raise ScenarioError("syntax", f"{key!r} given twice", line[0].line, line[0].col)
                self.mark(line[0], section, key)
                if key == "observables":
                    agent[key] = [] if self.is_none(c) else self.name_list(c)
                elif key == "aims":
                    agent[key] = [] if self.is_none(c) else self.event_list(c)
                elif key == "committed":
                    agent[key] = c.atom("true or false")
                elif key == "policy":
                    rules = agent.setdefault("policy", [])
                    self.mark(line[0], section, "policy", len(rules))
                    cond = self.literals(c, "&")
                    c.expect("->")
                    rules.append({"if": cond, "then": self.literals(c, ",")})
                else:
                    raise ScenarioError("syntax", f"unknown {section} key {key!r}", line[0].line, line[0].col)
                c.done()
            else:
                self.stanza(c, model, section)
        if any(model.values()):
            agent["model"] = model
        return agent

    def section_agent(self, lines) -> None:
        self.tree["agent"] = self._agent(lines, "agent")

    def section_snapshot(self, lines) -> None:
        self.tree["snapshot"] = self._agent(lines, "snapshot")

    def _assignment(self, lines, section: str) -> dict[str, str] | None:
        tokens = [t for line in lines for t in (*line, Token("punct", ",", line[-1].line, line[-1].col))][:-1]
        c = _Cursor(tokens)
        if not tokens:
            return {}
        out = self.literals(c, ",")
        c.done()
        return out

    def section_performed(self, lines) -> None:
        self.tree["performed"] = self._assignment(lines, "performed")

    def section_plan(self, lines) -> None:
        self.tree["plan"] = self._assignment(lines, "plan")

    def section_realized(self, lines) -> None:
        self.tree["realized"] = self._assignment(lines, "realized")

    def section_config(self, lines) -> None:
        config: dict[str, Any] = {}
        for line in lines:
            c = _Cursor(line)
            key = c.atom("a config key")
            c.expect(":")
            if key in config:
                raise ScenarioError("syntax", f"{key!r} given twice", line[0].line, line[0].col)
            self.mark(line[0], "config", key)
            if key == "reference":
                if self.is_none(c):
                    config[key] = []
                else:
                    refs = [self.literals(c, ",")]
                    while c.accept(";"):
                        refs.append(self.literals(c, ","))
                    config[key] = refs
            else:
                config[key] = c.atom("a value")
            c.done()
        self.tree["config"] = config

    def section_queries(self, lines) -> None:
        queries = []
        for line in lines:
            c = _Cursor(line)
            self.mark(line[0], "queries", len(queries))
            query: dict[str, Any] = {"definition": c.atom("a query definition")}
            query["result"] = self.literals(c, "&")
            while not c.at_end():
                word = c.atom("'by' or 'via'")
                if word == "by" and "action" not in query:
                    query["action"] = self.literals(c, ",")
                elif word == "via" and "via" not in query:
                    query["via"] = self.literals(c, "&")
                else:
                    c.i -= 1
                    c.fail(f"unexpected {word!r}")
            queries.append(query)
        self.tree["queries"] = queries


def parse_tree(text: str) -> tuple[dict[str, Any], dict]:
    """Text -> (scenario tree, source positions) without semantic validation."""
    return _Parser().parse(text)


def parse(text: str) -> Scenario:
    """Parse and validate a ``.intent`` document."""
    tree, positions = parse_tree(text)
    return build_scenario(tree, positions)


# --------------------------------------------------------------------------
# canonical serialization


def _num(x: float) -> str:
    return f"{x:.12g}"


def _lits(d: dict[str, str], sep: str) -> str:
    return sep.join(f"{k}={v}" for k, v in d.items())


def _model_lines(model: dict[str, Any]) -> list[str]:
    out = []
    for u in model["exo"]:
        body = ", ".join(f"{v}: {_num(p)}" for v, p in u["distribution"])
        out.append(f"  exo {u['id']} {{{body}}}")
    for a in model["actions"]:
        out.append(f"  action {a['id']} {{{', '.join(a['domain'])}}}")
    for v in model["vars"]:
        head = f"  var {v['id']} {{{', '.join(v['domain'])}}} ({', '.join(v['parents'])}) {{"
        rows = [f"    ({', '.join(key)}) -> {out_}" for key, out_ in v["table"]]
        out.append(head)
        out.append(",\n".join(rows))
        out.append("  }")
    return out


def _agent_lines(agent: dict[str, Any]) -> list[str]:
    out = [f"  observables: {', '.join(agent['observables']) or 'none'}"]
    aims = "; ".join(_lits(a, " & ") for a in agent["aims"])
    out.append(f"  aims: {aims or 'none'}")
    out.append(f"  committed: {'true' if agent['committed'] else 'false'}")
    for rule in agent["policy"]:
        out.append(f"  policy: {_lits(rule['if'], ' & ')} -> {_lits(rule['then'], ', ')}")
    if agent["model"] is not None:
        out.extend(_model_lines(agent["model"]))
    return out


def serialize(scenario: Scenario) -> str:
    """Canonical text: fixed section and key order, two-space indent, trailing newline."""
    tree = scenario_to_tree(scenario)
    out = ["format: 1", "", "model:", *_model_lines(tree["model"]), "", "agent:", *_agent_lines(tree["agent"])]
    if tree["snapshot"] is not None:
        out += ["", "snapshot:", *_agent_lines(tree["snapshot"])]
    out.append("")
    if tree["performed"]:
        out.append(f"performed: {_lits(tree['performed'], ', ')}")
    if tree["plan"] is not None:
        out.append(f"plan: {_lits(tree['plan'], ', ')}")
    if tree["realized"] is not None:
        out.append(f"realized: {_lits(tree['realized'], ', ')}")
    cfg = tree["config"]
    out += ["", "config:"]
    out += [f"  {k}: {_num(cfg[k])}" for k in ("tau", "epsilon", "tolerance")]
    if cfg["reference"] is not None:
        refs = "; ".join(_lits(r, ", ") for r in cfg["reference"])
        out.append(f"  reference: {refs or 'none'}")
    out.append(f"  exclude_avoided_results: {'true' if cfg['exclude_avoided_results'] else 'false'}")
    out.append(f"  knowledge_mode: {cfg['knowledge_mode']}")
    if tree["queries"]:
        out += ["", "queries:"]
        for q in tree["queries"]:
            line = f"  {q['definition']} {_lits(q['result'], ' & ')}"
            if q["action"] is not None:
                line += f" by {_lits(q['action'], ', ')}"
            if q["via"] is not None:
                line += f" via {_lits(q['via'], ' & ')}"
            out.append(line)
    return "\n".join(out) + "\n"
