"""Line-oriented derivation scripts.

Grammar (``#`` starts a comment, blank lines are skipped)::

    assume <id> lwff <label>+ : <formula>
    assume <id> rwff le(<label>,<label>)
    assume <id> rwff succ(<label>,<label>)
    node <id> <rule> concl <label>+ : <formula> prem <id>,...
         [disch <id>,...] [subst <from> <to>]
    root <id>

Formulas use the history-language concrete syntax.  Premises reference
earlier lines positionally, in the order the rule schema lists them; rule
names may be primitive or derived (the loader expands derived rules before
checking).  Exit-code convention for the checker CLI: 0 accepted,
1 rejected, 2 parse error.
"""

from __future__ import annotations

import re

from .formulas import Formula, ParseError, _Parser, format_formula
from .kernel import Apply, Assume, Le, Lwff, Node, Succ, _postorder, renumber

__all__ = ["ScriptError", "parse_script", "serialize"]

_RWFF_RE = re.compile(r"^(le|succ)\(\s*(\w+)\s*,\s*(\w+)\s*\)$")
_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


class ScriptError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_formula_prefix(text: str, line: int) -> tuple[Formula, str]:
    parser = _Parser(text, allow_until=False, allow_hist=True, partial=True)
    try:
        f = parser.formula()
    except ParseError as e:
        raise ScriptError(f"bad formula: {e}", line)
    rest_offset = parser.peek()[1]
    return f, text[rest_offset:]


def _parse_labelled(text: str, line: int) -> Lwff:
    head, colon, rest = text.partition(":")
    if not colon:
        raise ScriptError("expected '<label>+ : <formula>'", line)
    labels = tuple(head.split())
    if not labels or not all(_LABEL_RE.match(x) for x in labels):
        raise ScriptError(f"bad label sequence {head.strip()!r}", line)
    f, tail = _parse_formula_prefix(rest, line)
    if tail.strip():
        raise ScriptError(f"trailing input after formula: {tail.strip()!r}", line)
    return Lwff(labels, f)


def _parse_ids(text: str, line: int) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(int(part))
        except ValueError:
            raise ScriptError(f"bad id {part!r}", line)
    return out


def parse_script(text: str) -> Node:
    """Parse a script into its root derivation node."""
    nodes: dict[int, Node] = {}
    root_id: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split(None, 2)
        if words[0] == "assume":
            if len(words) < 3:
                raise ScriptError("assume needs '<id> lwff|rwff ...'", lineno)
            try:
                nid = int(words[1])
            except ValueError:
                raise ScriptError(f"bad id {words[1]!r}", lineno)
            if nid in nodes:
                raise ScriptError(f"duplicate id {nid}", lineno)
            kind, _, rest = words[2].partition(" ")
            if kind == "lwff":
                nodes[nid] = Assume(nid, _parse_labelled(rest, lineno))
            elif kind == "rwff":
                m = _RWFF_RE.match(rest.strip())
                if not m:
                    raise ScriptError(f"bad relational formula {rest.strip()!r}", lineno)
                ctor = Le if m.group(1) == "le" else Succ
                nodes[nid] = Assume(nid, ctor(m.group(2), m.group(3)))
            else:
                raise ScriptError(f"expected 'lwff' or 'rwff', got {kind!r}", lineno)
        elif words[0] == "node":
            if len(words) < 3:
                raise ScriptError("node needs '<id> <rule> concl ...'", lineno)
            try:
                nid = int(words[1])
            except ValueError:
                raise ScriptError(f"bad id {words[1]!r}", lineno)
            if nid in nodes:
                raise ScriptError(f"duplicate id {nid}", lineno)
            rule, _, rest = words[2].partition(" ")
            if not rest.startswith("concl"):
                raise ScriptError("expected 'concl' after the rule name", lineno)
            rest = rest[len("concl"):]
            head, colon, tail = rest.partition(":")
            if not colon:
                raise ScriptError("expected '<label>+ : <formula>'", lineno)
            labels = tuple(head.split())
            if not labels or not all(_LABEL_RE.match(x) for x in labels):
                raise ScriptError(f"bad label sequence {head.strip()!r}", lineno)
            formula, tail = _parse_formula_prefix(tail, lineno)
            conclusion = Lwff(labels, formula)
            fields = tail.split()
            prem_ids: list[int] = []
            disch_ids: list[int] = []
            subst: tuple[str, str] | None = None
            i = 0
            if i < len(fields) and fields[i] == "prem":
                if i + 1 >= len(fields):
                    raise ScriptError("prem needs a comma-separated id list", lineno)
                prem_ids = _parse_ids(fields[i + 1], lineno)
                i += 2
            else:
                raise ScriptError("node needs a 'prem' clause", lineno)
            if i < len(fields) and fields[i] == "disch":
                if i + 1 >= len(fields):
                    raise ScriptError("disch needs a comma-separated id list", lineno)
                disch_ids = _parse_ids(fields[i + 1], lineno)
                i += 2
            if i < len(fields) and fields[i] == "subst":
                if len(fields) - i < 3:
                    raise ScriptError("subst needs two labels", lineno)
                subst = (fields[i + 1], fields[i + 2])
                i += 3
            if i != len(fields):
                raise ScriptError(f"unexpected trailing input {' '.join(fields[i:])!r}", lineno)
            premises = []
            for pid in prem_ids:
                if pid not in nodes:
                    raise ScriptError(f"premise {pid} is not defined yet", lineno)
                premises.append(nodes[pid])
            discharges = []
            for did in disch_ids:
                if did not in nodes:
                    raise ScriptError(f"discharged assumption {did} is not defined yet", lineno)
                if not isinstance(nodes[did], Assume):
                    raise ScriptError(f"discharged id {did} is not an assumption", lineno)
                discharges.append(nodes[did])
            nodes[nid] = Apply(nid, rule, conclusion, tuple(premises), tuple(discharges), subst)
        elif words[0] == "root":
            if root_id is not None:
                raise ScriptError("duplicate root line", lineno)
            if len(words) != 2:
                raise ScriptError("root needs exactly one id", lineno)
            try:
                root_id = int(words[1])
            except ValueError:
                raise ScriptError(f"bad id {words[1]!r}", lineno)
            if root_id not in nodes:
                raise ScriptError(f"root {root_id} is not defined", lineno)
        else:
            raise ScriptError(f"unknown directive {words[0]!r}", lineno)
    if root_id is None:
        raise ScriptError("missing root line", len(text.splitlines()) + 1)
    return nodes[root_id]


def _format_assume(a: Assume) -> str:
    if isinstance(a.formula, Lwff):
        return f"assume {a.id} lwff {' '.join(a.formula.seq)} : {format_formula(a.formula.formula)}"
    rel = "le" if isinstance(a.formula, Le) else "succ"
    return f"assume {a.id} rwff {rel}({a.formula.a},{a.formula.b})"


def serialize(root: Node) -> str:
    """Render a derivation as a script (ids renumbered in definition order)."""
    root = renumber(root)
    lines: list[str] = []
    for n in _postorder(root):
        if isinstance(n, Assume):
            lines.append(_format_assume(n))
        else:
            parts = [
                f"node {n.id} {n.rule} concl {' '.join(n.conclusion.seq)} :",
                format_formula(n.conclusion.formula),
                "prem",
                ",".join(str(p.id) for p in n.premises),
            ]
            if n.discharges:
                parts += ["disch", ",".join(str(a.id) for a in n.discharges)]
            if n.subst is not None:
                parts += ["subst", n.subst[0], n.subst[1]]
            lines.append(" ".join(parts))
    lines.append(f"root {root.id}")
    return "\n".join(lines) + "\n"
