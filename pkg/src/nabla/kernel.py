"""Trusted checker for the labeled natural deduction system.

Judgments are labeled formulas ``alpha : A`` (an lwff: a history-language
formula asserted at a nonempty label sequence) and relational formulas
``le(b,c)`` / ``succ(b,c)`` (rwffs) over the order and immediate-successor
relations.  A derivation is a tree of rule applications over assumption
leaves; assumption classes are leaf objects that may occur at several
premise positions and are closed by the discharging rule application.

``check`` validates every node against the 18 primitive rules, including
sequence shapes, discharge bookkeeping and eigenlabel freshness, and never
grows beyond that rule set: derived rules are expanded elsewhere and
re-checked here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    Always,
    Bottom,
    Formula,
    Hist,
    Implies,
    LocalClass,
    Next,
    classify_local,
    desugar,
    format_formula,
    in_history_language,
)

__all__ = [
    "Lwff",
    "Le",
    "Succ",
    "GenericFormula",
    "Assume",
    "Apply",
    "Node",
    "CheckReport",
    "PRIMITIVE_RULES",
    "SHAPE_MISMATCH",
    "FRESHNESS_VIOLATION",
    "NOT_LOCAL_FORMULA",
    "BAD_DISCHARGE",
    "UNKNOWN_RULE",
    "SEQUENCE_MISMATCH",
    "NonInjectiveRenaming",
    "MissingAnnotation",
    "check",
    "subst_label",
    "normalize_generic",
    "labels_of_generic",
    "format_generic",
    "open_assumption_classes",
    "open_assumptions",
    "all_nodes",
    "max_node_id",
    "rename_labels",
    "renumber",
    "labels_of_derivation",
    "is_ltl_derivation",
]


@dataclass(frozen=True)
class Lwff:
    seq: tuple[str, ...]
    formula: Formula

    def __post_init__(self) -> None:
        if not self.seq:
            raise ValueError("label sequence must be nonempty")


@dataclass(frozen=True)
class Le:
    a: str
    b: str


@dataclass(frozen=True)
class Succ:
    a: str
    b: str


GenericFormula = Lwff | Le | Succ


@dataclass(frozen=True, eq=False)
class Assume:
    """An assumption class; occurrences are premise references to this object."""

    id: int
    formula: GenericFormula


@dataclass(frozen=True, eq=False)
class Apply:
    id: int
    rule: str
    conclusion: Lwff
    premises: tuple["Node", ...]
    discharges: tuple[Assume, ...] = ()
    subst: tuple[str, str] | None = None


Node = Assume | Apply

SHAPE_MISMATCH = "ShapeMismatch"
FRESHNESS_VIOLATION = "FreshnessViolation"
NOT_LOCAL_FORMULA = "NotLocalFormula"
BAD_DISCHARGE = "BadDischarge"
UNKNOWN_RULE = "UnknownRule"
SEQUENCE_MISMATCH = "SequenceMismatch"

PRIMITIVE_RULES = frozenset(
    {
        "botE",
        "impI",
        "impE",
        "GI",
        "GE",
        "XI",
        "XE",
        "histI",
        "histE",
        "last",
        "serS",
        "linS",
        "reflLe",
        "transLe",
        "eqLe",
        "splitLe",
        "baseLe",
        "ind",
    }
)


@dataclass(frozen=True)
class CheckReport:
    accepted: bool
    conclusion: Lwff | None = None
    open_assumptions: frozenset[GenericFormula] = frozenset()
    node_id: int | None = None
    reason: str | None = None
    message: str | None = None

    def to_dict(self) -> dict:
        if self.accepted:
            return {
                "verdict": "accepted",
                "conclusion": format_generic(self.conclusion),
                "open_assumptions": sorted(format_generic(a) for a in self.open_assumptions),
            }
        return {
            "verdict": "rejected",
            "node": self.node_id,
            "reason": self.reason,
            "message": self.message,
        }


class NonInjectiveRenaming(ValueError):
    pass


class MissingAnnotation(KeyError):
    pass


class _Err(Exception):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason
        self.message = message


_NORM_CACHE: dict[Formula, Formula] = {}


def _norm(f: Formula) -> Formula:
    g = _NORM_CACHE.get(f)
    if g is None:
        g = desugar(f)
        _NORM_CACHE[f] = g
    return g


def normalize_generic(phi: GenericFormula) -> GenericFormula:
    if isinstance(phi, Lwff):
        return Lwff(phi.seq, _norm(phi.formula))
    return phi


def labels_of_generic(phi: GenericFormula) -> frozenset[str]:
    if isinstance(phi, Lwff):
        return frozenset(phi.seq)
    return frozenset((phi.a, phi.b))


def format_generic(phi: GenericFormula | None) -> str:
    if phi is None:
        return "-"
    if isinstance(phi, Lwff):
        return f"{' '.join(phi.seq)} : {format_formula(phi.formula)}"
    if isinstance(phi, Le):
        return f"le({phi.a},{phi.b})"
    return f"succ({phi.a},{phi.b})"


def subst_label(phi: GenericFormula, frm: str, to: str) -> GenericFormula:
    """Replace every occurrence of ``frm`` by ``to`` in the labels of ``phi``."""
    if isinstance(phi, Lwff):
        return Lwff(tuple(to if x == frm else x for x in phi.seq), phi.formula)
    swap = lambda x: to if x == frm else x
    if isinstance(phi, Le):
        return Le(swap(phi.a), swap(phi.b))
    return Succ(swap(phi.a), swap(phi.b))


def all_nodes(root: Node) -> list[Node]:
    """Every node reachable through premises or discharge references."""
    seen: dict[int, Node] = {}
    order: list[Node] = []
    stack = [root]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen[id(n)] = n
        order.append(n)
        if isinstance(n, Apply):
            stack.extend(n.premises)
            stack.extend(n.discharges)
    return order


def _postorder(root: Node) -> list[Node]:
    out: list[Node] = []
    visited: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        if id(n) in visited:
            continue
        visited.add(id(n))
        stack.append((n, True))
        if isinstance(n, Apply):
            for m in reversed(n.premises):
                stack.append((m, False))
            for a in n.discharges:
                stack.append((a, False))
    return out


def _compute_opens(order: list[Node]) -> dict[int, frozenset[Assume]]:
    opens: dict[int, frozenset[Assume]] = {}
    for n in order:
        if isinstance(n, Assume):
            opens[id(n)] = frozenset((n,))
        else:
            acc: set[Assume] = set()
            for p in n.premises:
                acc |= opens[id(p)]
            acc -= set(n.discharges)
            opens[id(n)] = frozenset(acc)
    return opens


def open_assumption_classes(root: Node) -> frozenset[Assume]:
    order = _postorder(root)
    return _compute_opens(order)[id(root)]


def open_assumptions(root: Node) -> frozenset[GenericFormula]:
    """Open assumptions as a set of (desugared) generic formulas."""
    return frozenset(normalize_generic(a.formula) for a in open_assumption_classes(root))


def max_node_id(root: Node) -> int:
    return max((n.id for n in all_nodes(root)), default=0)


def labels_of_derivation(root: Node) -> frozenset[str]:
    labs: set[str] = set()
    for n in all_nodes(root):
        if isinstance(n, Assume):
            labs |= labels_of_generic(n.formula)
        else:
            labs |= labels_of_generic(n.conclusion)
            if n.subst is not None:
                labs.update(n.subst)
    return frozenset(labs)


# ---------------------------------------------------------------------------
# Rule validation


def _lwff_of(n: Node) -> Lwff | None:
    if isinstance(n, Assume):
        return n.formula if isinstance(n.formula, Lwff) else None
    return n.conclusion


def _rwff_of(n: Node) -> Le | Succ | None:
    if isinstance(n, Assume) and isinstance(n.formula, (Le, Succ)):
        return n.formula
    return None


def _generic_of(n: Node) -> GenericFormula:
    return n.formula if isinstance(n, Assume) else n.conclusion


def _need(count: int, node: Apply) -> None:
    if len(node.premises) != count:
        raise _Err(SHAPE_MISMATCH, f"rule {node.rule} takes {count} premises, got {len(node.premises)}")


def _need_lwff(node: Apply, i: int) -> Lwff:
    w = _lwff_of(node.premises[i])
    if w is None:
        raise _Err(SHAPE_MISMATCH, f"premise {i + 1} of {node.rule} must be a labeled formula")
    return w


def _need_rwff(node: Apply, i: int, kind: type) -> Le | Succ:
    r = _rwff_of(node.premises[i])
    if r is None or not isinstance(r, kind):
        name = "le" if kind is Le else "succ"
        raise _Err(SHAPE_MISMATCH, f"premise {i + 1} of {node.rule} must be a {name}(...) assumption")
    return r


def _no_discharge(node: Apply) -> None:
    if node.discharges:
        raise _Err(BAD_DISCHARGE, f"rule {node.rule} discharges nothing")


def _validate_discharges(
    node: Apply,
    opens: dict[int, frozenset[Assume]],
    slots: list[tuple[GenericFormula, int]],
) -> None:
    """Each discharged class must match a slot formula and be confined to
    the slot's designated premise subtree (zero occurrences is fine)."""
    assignment: dict[int, int] = {}
    for a in node.discharges:
        g = normalize_generic(a.formula)
        target = None
        for slot_formula, prem_index in slots:
            if g == normalize_generic(slot_formula):
                target = prem_index
                break
        if target is None:
            raise _Err(
                BAD_DISCHARGE,
                f"{node.rule} cannot discharge {format_generic(a.formula)} (assumption {a.id})",
            )
        assignment[id(a)] = target
    for a in node.discharges:
        for j, p in enumerate(node.premises):
            if j != assignment[id(a)] and a in opens[id(p)]:
                raise _Err(
                    BAD_DISCHARGE,
                    f"assumption {a.id} occurs outside the hypothetical premise of {node.rule}",
                )


def _check_fresh(
    node: Apply,
    label: str | None,
    named: tuple[str, ...],
    hyp: Node,
    opens: dict[int, frozenset[Assume]],
) -> None:
    if label is None:
        return
    for other in named:
        if label == other:
            raise _Err(
                FRESHNESS_VIOLATION,
                f"eigenlabel {label!r} of {node.rule} must differ from the rule's label {other!r}",
            )
    remaining = opens[id(hyp)] - set(node.discharges)
    for a in sorted(remaining, key=lambda x: x.id):
        if label in labels_of_generic(a.formula):
            raise _Err(
                FRESHNESS_VIOLATION,
                f"label {label!r} of {node.rule} occurs in open assumption {format_generic(a.formula)}",
            )


def _same_judgment(node: Apply, w: Lwff, where: str) -> None:
    c = node.conclusion
    if w.seq != c.seq:
        raise _Err(SEQUENCE_MISMATCH, f"{where} of {node.rule} has sequence {' '.join(w.seq)}, expected {' '.join(c.seq)}")
    if _norm(w.formula) != _norm(c.formula):
        raise _Err(SHAPE_MISMATCH, f"{where} of {node.rule} proves a different formula than the conclusion")


def _check_subst(node: Apply, frm: str, to: str) -> None:
    if node.subst is not None and node.subst != (frm, to):
        raise _Err(
            SHAPE_MISMATCH,
            f"substitution annotation {node.subst} does not match the rule instance ({frm} -> {to})",
        )


def _check_botE(node: Apply, opens) -> None:
    _need(1, node)
    w = _need_lwff(node, 0)
    if _norm(w.formula) != Bottom():
        raise _Err(SHAPE_MISMATCH, "premise of botE must prove bot")
    slot = Lwff(node.conclusion.seq, Implies(_norm(node.conclusion.formula), Bottom()))
    _validate_discharges(node, opens, [(slot, 0)])


def _check_impI(node: Apply, opens) -> None:
    _need(1, node)
    f = _norm(node.conclusion.formula)
    if not isinstance(f, Implies):
        raise _Err(SHAPE_MISMATCH, "conclusion of impI must be an implication")
    w = _need_lwff(node, 0)
    if w.seq != node.conclusion.seq:
        raise _Err(SEQUENCE_MISMATCH, "impI premise and conclusion must share one sequence")
    if _norm(w.formula) != f.right:
        raise _Err(SHAPE_MISMATCH, "impI premise must prove the consequent")
    _validate_discharges(node, opens, [(Lwff(node.conclusion.seq, f.left), 0)])


def _check_impE(node: Apply, opens) -> None:
    _need(2, node)
    w1 = _need_lwff(node, 0)
    w2 = _need_lwff(node, 1)
    cs = node.conclusion.seq
    if w1.seq != cs or w2.seq != cs:
        raise _Err(SEQUENCE_MISMATCH, "impE premises and conclusion must share one sequence")
    f1 = _norm(w1.formula)
    if not isinstance(f1, Implies) or f1.left != _norm(w2.formula) or f1.right != _norm(node.conclusion.formula):
        raise _Err(SHAPE_MISMATCH, "impE premises do not fit A -> B and A")
    _no_discharge(node)


def _check_univ_intro(node: Apply, opens, op, rel) -> None:
    # GI and XI share one shape over (Always, Le) resp. (Next, Succ).
    _need(1, node)
    f = _norm(node.conclusion.formula)
    if not isinstance(f, op):
        raise _Err(SHAPE_MISMATCH, f"conclusion of {node.rule} has the wrong outer operator")
    w = _need_lwff(node, 0)
    cs = node.conclusion.seq
    if len(w.seq) != len(cs) + 1 or w.seq[:-1] != cs:
        raise _Err(SEQUENCE_MISMATCH, f"premise of {node.rule} must extend the conclusion sequence by one label")
    if _norm(w.formula) != f.operand:
        raise _Err(SHAPE_MISMATCH, f"premise of {node.rule} must prove the operand")
    b1, b2 = cs[-1], w.seq[-1]
    _validate_discharges(node, opens, [(rel(b1, b2), 0)])
    _check_fresh(node, b2, (b1,), node.premises[0], opens)


def _check_univ_elim(node: Apply, opens, op, rel) -> None:
    _need(2, node)
    cs = node.conclusion.seq
    if len(cs) < 2:
        raise _Err(SEQUENCE_MISMATCH, f"conclusion of {node.rule} needs at least two labels")
    b1, b2 = cs[-2], cs[-1]
    w = _need_lwff(node, 0)
    if w.seq != cs[:-1]:
        raise _Err(SEQUENCE_MISMATCH, f"premise of {node.rule} must carry the conclusion sequence minus its last label")
    f = _norm(w.formula)
    if not isinstance(f, op) or f.operand != _norm(node.conclusion.formula):
        raise _Err(SHAPE_MISMATCH, f"premise of {node.rule} has the wrong formula")
    kind = Le if rel is Le else Succ
    r = _need_rwff(node, 1, kind)
    if r != rel(b1, b2):
        raise _Err(SHAPE_MISMATCH, f"relational premise of {node.rule} must relate the last two labels")
    _no_discharge(node)


def _check_histI(node: Apply, opens) -> None:
    _need(1, node)
    f = _norm(node.conclusion.formula)
    if not isinstance(f, Hist):
        raise _Err(SHAPE_MISMATCH, "conclusion of histI must be a history formula")
    cs = node.conclusion.seq
    if len(cs) < 2:
        raise _Err(SEQUENCE_MISMATCH, "conclusion of histI needs at least two labels")
    b1, b3 = cs[-2], cs[-1]
    w = _need_lwff(node, 0)
    if len(w.seq) != len(cs) or w.seq[:-1] != cs[:-1]:
        raise _Err(SEQUENCE_MISMATCH, "premise of histI must differ from the conclusion sequence in the last label only")
    if _norm(w.formula) != f.operand:
        raise _Err(SHAPE_MISMATCH, "premise of histI must prove the operand")
    b2 = w.seq[-1]
    _validate_discharges(node, opens, [(Le(b1, b2), 0), (Le(b2, b3), 0)])
    _check_fresh(node, b2, (b1, b3), node.premises[0], opens)


def _check_histE(node: Apply, opens) -> None:
    _need(3, node)
    cs = node.conclusion.seq
    if len(cs) < 2:
        raise _Err(SEQUENCE_MISMATCH, "conclusion of histE needs at least two labels")
    b1, b2 = cs[-2], cs[-1]
    w = _need_lwff(node, 0)
    if len(w.seq) != len(cs) or w.seq[:-1] != cs[:-1]:
        raise _Err(SEQUENCE_MISMATCH, "major premise of histE must differ from the conclusion sequence in the last label only")
    f = _norm(w.formula)
    if not isinstance(f, Hist) or f.operand != _norm(node.conclusion.formula):
        raise _Err(SHAPE_MISMATCH, "major premise of histE must prove the history of the conclusion formula")
    b3 = w.seq[-1]
    r1 = _need_rwff(node, 1, Le)
    r2 = _need_rwff(node, 2, Le)
    if r1 != Le(b1, b2) or r2 != Le(b2, b3):
        raise _Err(SHAPE_MISMATCH, "relational premises of histE must place the new label inside the interval")
    _no_discharge(node)


def _check_last(node: Apply, opens) -> None:
    _need(1, node)
    w = _need_lwff(node, 0)
    if w.seq[-1] != node.conclusion.seq[-1]:
        raise _Err(SEQUENCE_MISMATCH, "last must keep the final label")
    fc = _norm(node.conclusion.formula)
    if _norm(w.formula) != fc:
        raise _Err(SHAPE_MISMATCH, "last must keep the formula")
    if classify_local(fc) is not LocalClass.LOCAL:
        raise _Err(NOT_LOCAL_FORMULA, f"last applies to local formulas only, got {format_formula(node.conclusion.formula)}")
    _no_discharge(node)


def _check_serS(node: Apply, opens) -> None:
    _need(1, node)
    w = _need_lwff(node, 0)
    _same_judgment(node, w, "premise")
    pair: Succ | None = None
    for a in node.discharges:
        g = normalize_generic(a.formula)
        if not isinstance(g, Succ) or (pair is not None and g != pair):
            raise _Err(BAD_DISCHARGE, "serS discharges one successor assumption")
        pair = g
    _validate_discharges(node, opens, [(pair, 0)] if pair else [])
    if pair is not None:
        _check_fresh(node, pair.b, (pair.a,), node.premises[0], opens)


def _check_linS(node: Apply, opens) -> None:
    _need(4, node)
    r1 = _need_rwff(node, 0, Succ)
    r2 = _need_rwff(node, 1, Succ)
    if r1.a != r2.a:
        raise _Err(SHAPE_MISMATCH, "linS successor premises must start from one label")
    b2, b3 = r1.b, r2.b
    phi = _generic_of(node.premises[2])
    w = _need_lwff(node, 3)
    _same_judgment(node, w, "hypothetical premise")
    _check_subst(node, b2, b3)
    slot = subst_label(normalize_generic(phi), b2, b3)
    _validate_discharges(node, opens, [(slot, 3)])


def _check_reflLe(node: Apply, opens) -> None:
    _need(1, node)
    w = _need_lwff(node, 0)
    _same_judgment(node, w, "premise")
    pair: Le | None = None
    for a in node.discharges:
        g = normalize_generic(a.formula)
        if not isinstance(g, Le) or g.a != g.b or (pair is not None and g != pair):
            raise _Err(BAD_DISCHARGE, "reflLe discharges one reflexive order assumption")
        pair = g
    _validate_discharges(node, opens, [(pair, 0)] if pair else [])


def _check_transLe(node: Apply, opens) -> None:
    _need(3, node)
    r1 = _need_rwff(node, 0, Le)
    r2 = _need_rwff(node, 1, Le)
    if r1.b != r2.a:
        raise _Err(SHAPE_MISMATCH, "transLe premises must chain")
    w = _need_lwff(node, 2)
    _same_judgment(node, w, "hypothetical premise")
    _validate_discharges(node, opens, [(Le(r1.a, r2.b), 2)])


def _check_eqLe(node: Apply, opens) -> None:
    _need(3, node)
    cs = node.conclusion.seq
    w = _need_lwff(node, 2)
    if len(w.seq) != len(cs) or w.seq[:-1] != cs[:-1]:
        raise _Err(SEQUENCE_MISMATCH, "eqLe premise must differ from the conclusion sequence in the last label only")
    if _norm(w.formula) != _norm(node.conclusion.formula):
        raise _Err(SHAPE_MISMATCH, "eqLe must keep the formula")
    b1, b2 = w.seq[-1], cs[-1]
    r1 = _need_rwff(node, 0, Le)
    r2 = _need_rwff(node, 1, Le)
    if r1 != Le(b1, b2) or r2 != Le(b2, b1):
        raise _Err(SHAPE_MISMATCH, "eqLe relational premises must assert equality of the swapped labels")
    _check_subst(node, b1, b2)
    _no_discharge(node)


def _check_splitLe(node: Apply, opens) -> None:
    _need(4, node)
    r1 = _need_rwff(node, 0, Le)
    b1, b2 = r1.a, r1.b
    phi = _generic_of(node.premises[1])
    w_eq = _need_lwff(node, 2)
    w_lt = _need_lwff(node, 3)
    _same_judgment(node, w_eq, "equality-case premise")
    _same_judgment(node, w_lt, "strict-case premise")
    _check_subst(node, b1, b2)
    eq_slot = subst_label(normalize_generic(phi), b1, b2)
    bp: str | None = None
    slots: list[tuple[GenericFormula, int]] = [(eq_slot, 2)]
    for a in node.discharges:
        g = normalize_generic(a.formula)
        if g == eq_slot:
            continue
        if isinstance(g, Succ) and g.a == b1:
            cand = g.b
        elif isinstance(g, Le) and g.b == b2:
            cand = g.a
        else:
            raise _Err(BAD_DISCHARGE, f"splitLe cannot discharge {format_generic(a.formula)}")
        if bp is not None and cand != bp:
            raise _Err(BAD_DISCHARGE, "splitLe strict-case assumptions name two different fresh labels")
        bp = cand
    if bp is not None:
        slots += [(Succ(b1, bp), 3), (Le(bp, b2), 3)]
    _validate_discharges(node, opens, slots)
    _check_fresh(node, bp, (b1, b2), node.premises[3], opens)


def _check_baseLe(node: Apply, opens) -> None:
    _need(2, node)
    r1 = _need_rwff(node, 0, Succ)
    w = _need_lwff(node, 1)
    _same_judgment(node, w, "hypothetical premise")
    _validate_discharges(node, opens, [(Le(r1.a, r1.b), 1)])


def _check_ind(node: Apply, opens) -> None:
    _need(3, node)
    cs = node.conclusion.seq
    alpha, b = cs[:-1], cs[-1]
    fc = _norm(node.conclusion.formula)
    w0 = _need_lwff(node, 0)
    if len(w0.seq) != len(cs) or w0.seq[:-1] != alpha:
        raise _Err(SEQUENCE_MISMATCH, "base premise of ind must differ from the conclusion sequence in the last label only")
    if _norm(w0.formula) != fc:
        raise _Err(SHAPE_MISMATCH, "base premise of ind must prove the conclusion formula")
    b0 = w0.seq[-1]
    r = _need_rwff(node, 1, Le)
    if r != Le(b0, b):
        raise _Err(SHAPE_MISMATCH, "relational premise of ind must be le(base, conclusion label)")
    wh = _need_lwff(node, 2)
    if len(wh.seq) != len(cs) or wh.seq[:-1] != alpha:
        raise _Err(SEQUENCE_MISMATCH, "step premise of ind must differ from the conclusion sequence in the last label only")
    if _norm(wh.formula) != fc:
        raise _Err(SHAPE_MISMATCH, "step premise of ind must prove the conclusion formula")
    bj = wh.seq[-1]
    bi: str | None = None
    for a in node.discharges:
        g = normalize_generic(a.formula)
        if isinstance(g, Le) and g.a == b0:
            cand = g.b
        elif isinstance(g, Succ) and g.b == bj:
            cand = g.a
        elif isinstance(g, Lwff) and len(g.seq) == len(cs) and g.seq[:-1] == alpha and g.formula == fc:
            cand = g.seq[-1]
        else:
            raise _Err(BAD_DISCHARGE, f"ind cannot discharge {format_generic(a.formula)}")
        if bi is not None and cand != bi:
            raise _Err(BAD_DISCHARGE, "ind inductive assumptions name two different fresh labels")
        bi = cand
    slots: list[tuple[GenericFormula, int]] = []
    if bi is not None:
        slots = [(Le(b0, bi), 2), (Succ(bi, bj), 2), (Lwff(alpha + (bi,), fc), 2)]
    _validate_discharges(node, opens, slots)
    named = (b, b0) if bi is None else (b, b0, bi)
    _check_fresh(node, bj, named, node.premises[2], opens)
    if bi is not None:
        _check_fresh(node, bi, (b, b0, bj), node.premises[2], opens)


_VALIDATORS = {
    "botE": _check_botE,
    "impI": _check_impI,
    "impE": _check_impE,
    "GI": lambda n, o: _check_univ_intro(n, o, Always, Le),
    "GE": lambda n, o: _check_univ_elim(n, o, Always, Le),
    "XI": lambda n, o: _check_univ_intro(n, o, Next, Succ),
    "XE": lambda n, o: _check_univ_elim(n, o, Next, Succ),
    "histI": _check_histI,
    "histE": _check_histE,
    "last": _check_last,
    "serS": _check_serS,
    "linS": _check_linS,
    "reflLe": _check_reflLe,
    "transLe": _check_transLe,
    "eqLe": _check_eqLe,
    "splitLe": _check_splitLe,
    "baseLe": _check_baseLe,
    "ind": _check_ind,
}


def check(root: Node) -> CheckReport:
    """Validate a derivation; total and deterministic, never raises on bad input."""
    order = _postorder(root)
    opens = _compute_opens(order)
    discharged_by: dict[int, int] = {}
    for n in order:
        try:
            if isinstance(n, Assume):
                if isinstance(n.formula, Lwff) and not in_history_language(n.formula.formula):
                    raise _Err(SHAPE_MISMATCH, "assumption formula is not in the proof language")
                continue
            if not in_history_language(n.conclusion.formula):
                raise _Err(SHAPE_MISMATCH, "conclusion formula is not in the proof language")
            validator = _VALIDATORS.get(n.rule)
            if validator is None:
                raise _Err(UNKNOWN_RULE, f"unknown rule {n.rule!r}")
            for a in n.discharges:
                prev = discharged_by.get(id(a))
                if prev is not None and prev != n.id:
                    raise _Err(BAD_DISCHARGE, f"assumption {a.id} is discharged twice")
                discharged_by[id(a)] = n.id
            validator(n, opens)
        except _Err as e:
            return CheckReport(accepted=False, node_id=n.id, reason=e.reason, message=e.message)
    if isinstance(root, Assume) and not isinstance(root.formula, Lwff):
        return CheckReport(
            accepted=False, node_id=root.id, reason=SHAPE_MISMATCH, message="a derivation concludes a labeled formula"
        )
    conclusion = root.formula if isinstance(root, Assume) else root.conclusion
    opens_root = frozenset(normalize_generic(a.formula) for a in opens[id(root)])
    return CheckReport(accepted=True, conclusion=conclusion, open_assumptions=opens_root)


def rename_labels(root: Node, mapping: dict[str, str]) -> Node:
    """Rebuild the derivation with labels renamed; must be injective on the
    labels occurring in it.  Preserves node ids and sharing."""
    present = labels_of_derivation(root)
    full = {lab: mapping.get(lab, lab) for lab in present}
    if len(set(full.values())) != len(full):
        raise NonInjectiveRenaming(f"renaming is not injective on {sorted(present)}")

    def ren_seq(seq: tuple[str, ...]) -> tuple[str, ...]:
        return tuple(full.get(x, x) for x in seq)

    def ren_generic(phi: GenericFormula) -> GenericFormula:
        if isinstance(phi, Lwff):
            return Lwff(ren_seq(phi.seq), phi.formula)
        if isinstance(phi, Le):
            return Le(full.get(phi.a, phi.a), full.get(phi.b, phi.b))
        return Succ(full.get(phi.a, phi.a), full.get(phi.b, phi.b))

    memo: dict[int, Node] = {}
    for n in _postorder(root):
        if isinstance(n, Assume):
            memo[id(n)] = Assume(n.id, ren_generic(n.formula))
        else:
            subst = None if n.subst is None else (full.get(n.subst[0], n.subst[0]), full.get(n.subst[1], n.subst[1]))
            memo[id(n)] = Apply(
                n.id,
                n.rule,
                ren_generic(n.conclusion),
                tuple(memo[id(p)] for p in n.premises),
                tuple(memo[id(a)] for a in n.discharges),
                subst,
            )
    return memo[id(root)]


def renumber(root: Node, start: int = 1) -> Node:
    """Rebuild with fresh sequential ids (needed before serializing composites)."""
    memo: dict[int, Node] = {}
    counter = start
    for n in _postorder(root):
        if isinstance(n, Assume):
            memo[id(n)] = Assume(counter, n.formula)
        else:
            memo[id(n)] = Apply(
                counter,
                n.rule,
                n.conclusion,
                tuple(memo[id(p)] for p in n.premises),
                tuple(memo[id(a)] for a in n.discharges),
                n.subst,
            )
        counter += 1
    return memo[id(root)]


def is_ltl_derivation(root: Node, sources: dict[Lwff, Formula]) -> bool:
    """True iff conclusion and open assumptions are all ``b : tr(source)``
    for one shared label ``b`` and the annotated until-language sources."""
    from .translate import matches_translation

    report = check(root)
    if not report.accepted:
        raise ValueError("is_ltl_derivation requires an accepted derivation")
    normalized_sources = {normalize_generic(k): v for k, v in sources.items()}
    judgments = [normalize_generic(report.conclusion)] + sorted(
        (a for a in report.open_assumptions), key=format_generic
    )
    label: str | None = None
    for phi in judgments:
        if not isinstance(phi, Lwff):
            return False
        if len(phi.seq) != 1:
            return False
        if label is None:
            label = phi.seq[0]
        elif phi.seq[0] != label:
            return False
        src = normalized_sources.get(phi)
        if src is None:
            raise MissingAnnotation(format_generic(phi))
        if not matches_translation(src, phi.formula):
            return False
    return True
