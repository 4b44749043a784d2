"""Derived rules as expansion templates, plus proof transformers.

The kernel trusts only its 18 primitive rules.  Scripts may use the
derived names ``andI andE1 andE2 orIl orIr orE FI FE``; ``expand`` rewrites
those applications into primitive derivations, and every expansion is
re-checked by the kernel downstream.  ``mp_compose``, ``nec_g`` and
``nec_x`` make the Hilbert closure rules executable over closed proofs,
and ``derive_tautology`` builds a closed proof for any classical
propositional tautology by case-splitting on its atoms.
"""

from __future__ import annotations

import itertools

from .formulas import (
    And,
    Always,
    Atom,
    Bottom,
    Formula,
    Hist,
    Implies,
    LocalClass,
    Next,
    Not,
    Or,
    Sometime,
    Until,
    atoms_of,
    classify_local,
    desugar,
    format_formula,
)
from .kernel import (
    Apply,
    Assume,
    Le,
    Lwff,
    Node,
    Succ,
    check,
    labels_of_derivation,
    max_node_id,
    normalize_generic,
    rename_labels,
)

__all__ = [
    "DERIVED_RULES",
    "SchemaMismatch",
    "ShapeMismatch",
    "NotLocalFormula",
    "NonParametricLabel",
    "NotATautology",
    "NotPropositional",
    "expand",
    "mp_compose",
    "nec_g",
    "nec_x",
    "derive_tautology",
]

DERIVED_RULES = frozenset({"andI", "andE1", "andE2", "orIl", "orIr", "orE", "FI", "FE"})


class SchemaMismatch(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


class NotLocalFormula(ValueError):
    pass


class NonParametricLabel(ValueError):
    pass


class NotATautology(ValueError):
    pass


class NotPropositional(ValueError):
    pass


class _Ids:
    def __init__(self, start: int):
        self.counter = itertools.count(start)

    def next(self) -> int:
        return next(self.counter)


def _split_or(f: Formula) -> tuple[Formula, Formula]:
    if isinstance(f, Or):
        return f.left, f.right
    g = desugar(f)
    if isinstance(g, Implies) and isinstance(g.left, Implies) and g.left.right == Bottom():
        return g.left.left, g.right
    raise SchemaMismatch(f"not a disjunction: {format_formula(f)}")


def _split_and(f: Formula) -> tuple[Formula, Formula]:
    if isinstance(f, And):
        return f.left, f.right
    g = desugar(f)
    # (((a -> bot) -> bot) -> (b -> bot)) -> bot
    if (
        isinstance(g, Implies)
        and g.right == Bottom()
        and isinstance(g.left, Implies)
        and isinstance(g.left.left, Implies)
        and g.left.left.right == Bottom()
        and isinstance(g.left.left.left, Implies)
        and g.left.left.left.right == Bottom()
        and isinstance(g.left.right, Implies)
        and g.left.right.right == Bottom()
    ):
        return g.left.left.left.left, g.left.right.left
    raise SchemaMismatch(f"not a conjunction: {format_formula(f)}")


def _split_sometime(f: Formula) -> Formula:
    if isinstance(f, Sometime):
        return f.operand
    g = desugar(f)
    if (
        isinstance(g, Implies)
        and g.right == Bottom()
        and isinstance(g.left, Always)
        and isinstance(g.left.operand, Implies)
        and g.left.operand.right == Bottom()
    ):
        return g.left.operand.left
    raise SchemaMismatch(f"not a sometime formula: {format_formula(f)}")


def _norm(f: Formula) -> Formula:
    return desugar(f)


def _concl_of(n: Node) -> Lwff:
    if isinstance(n, Assume):
        if not isinstance(n.formula, Lwff):
            raise SchemaMismatch("expected a labeled premise")
        return n.formula
    return n.conclusion


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaMismatch(message)


def _not_f(f: Formula) -> Formula:
    return Implies(f, Bottom())


# --- templates -------------------------------------------------------------


def _expand_andI(node: Apply, prems, ids: _Ids) -> Node:
    d1, d2 = prems
    w1, w2 = _concl_of(d1), _concl_of(d2)
    a, b = _split_and(node.conclusion.formula)
    seq = node.conclusion.seq
    _require(w1.seq == seq and w2.seq == seq, "andI premises must share the conclusion sequence")
    _require(_norm(w1.formula) == _norm(a) and _norm(w2.formula) == _norm(b), "andI premises must prove the conjuncts")
    _require(not node.discharges, "andI discharges nothing")
    phi = Implies(Implies(_not_f(a), Bottom()), _not_f(b))
    h = Assume(ids.next(), Lwff(seq, phi))
    ha = Assume(ids.next(), Lwff(seq, _not_f(a)))
    n1 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (ha, d1))
    n2 = Apply(ids.next(), "impI", Lwff(seq, Implies(_not_f(a), Bottom())), (n1,), (ha,))
    n3 = Apply(ids.next(), "impE", Lwff(seq, _not_f(b)), (h, n2))
    n4 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (n3, d2))
    return Apply(ids.next(), "impI", node.conclusion, (n4,), (h,))


def _expand_andE(node: Apply, prems, ids: _Ids, first: bool) -> Node:
    (d,) = prems
    w = _concl_of(d)
    a, b = _split_and(w.formula)
    seq = node.conclusion.seq
    _require(w.seq == seq, "andE premise must share the conclusion sequence")
    want = a if first else b
    _require(_norm(node.conclusion.formula) == _norm(want), "andE conclusion must be the selected conjunct")
    _require(not node.discharges, "andE discharges nothing")
    if first:
        hx = Assume(ids.next(), Lwff(seq, _not_f(a)))
        h1 = Assume(ids.next(), Lwff(seq, Implies(_not_f(a), Bottom())))
        n1 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (h1, hx))
        n2 = Apply(ids.next(), "impI", Lwff(seq, _not_f(b)), (n1,))
        n3 = Apply(ids.next(), "impI", Lwff(seq, Implies(Implies(_not_f(a), Bottom()), _not_f(b))), (n2,), (h1,))
    else:
        hx = Assume(ids.next(), Lwff(seq, _not_f(b)))
        n3 = Apply(ids.next(), "impI", Lwff(seq, Implies(Implies(_not_f(a), Bottom()), _not_f(b))), (hx,))
    n4 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (d, n3))
    return Apply(ids.next(), "botE", node.conclusion, (n4,), (hx,))


def _expand_orIl(node: Apply, prems, ids: _Ids) -> Node:
    (d,) = prems
    w = _concl_of(d)
    a, b = _split_or(node.conclusion.formula)
    seq = node.conclusion.seq
    _require(w.seq == seq, "orIl premise must share the conclusion sequence")
    _require(_norm(w.formula) == _norm(a), "orIl premise must prove the left disjunct")
    _require(not node.discharges, "orIl discharges nothing")
    h = Assume(ids.next(), Lwff(seq, _not_f(a)))
    n1 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (h, d))
    n2 = Apply(ids.next(), "botE", Lwff(seq, b), (n1,))
    return Apply(ids.next(), "impI", node.conclusion, (n2,), (h,))


def _expand_orIr(node: Apply, prems, ids: _Ids) -> Node:
    (d,) = prems
    w = _concl_of(d)
    a, b = _split_or(node.conclusion.formula)
    seq = node.conclusion.seq
    _require(w.seq == seq, "orIr premise must share the conclusion sequence")
    _require(_norm(w.formula) == _norm(b), "orIr premise must prove the right disjunct")
    _require(not node.discharges, "orIr discharges nothing")
    return Apply(ids.next(), "impI", node.conclusion, (d,))


def _expand_orE(node: Apply, prems, ids: _Ids) -> Node:
    d0, da, db = prems
    w0 = _concl_of(d0)
    a, b = _split_or(w0.formula)
    goal = node.conclusion
    _require(_norm(_concl_of(da).formula) == _norm(goal.formula) and _concl_of(da).seq == goal.seq, "orE first case must prove the conclusion")
    _require(_norm(_concl_of(db).formula) == _norm(goal.formula) and _concl_of(db).seq == goal.seq, "orE second case must prove the conclusion")
    ha = [x for x in node.discharges if normalize_generic(x.formula) == normalize_generic(Lwff(w0.seq, a))]
    hb = [x for x in node.discharges if x not in ha and normalize_generic(x.formula) == normalize_generic(Lwff(w0.seq, b))]
    _require(len(ha) + len(hb) == len(node.discharges), "orE discharges case assumptions only")
    hc = Assume(ids.next(), Lwff(goal.seq, _not_f(goal.formula)))
    n1 = Apply(ids.next(), "impE", Lwff(goal.seq, Bottom()), (hc, da))
    n2 = Apply(ids.next(), "botE", Lwff(w0.seq, Bottom()), (n1,))
    n3 = Apply(ids.next(), "impI", Lwff(w0.seq, _not_f(a)), (n2,), tuple(ha))
    n4 = Apply(ids.next(), "impE", Lwff(w0.seq, b), (d0, n3))
    n5 = Apply(ids.next(), "impE", Lwff(goal.seq, Bottom()), (hc, db))
    n6 = Apply(ids.next(), "botE", Lwff(w0.seq, Bottom()), (n5,))
    n7 = Apply(ids.next(), "impI", Lwff(w0.seq, _not_f(b)), (n6,), tuple(hb))
    n8 = Apply(ids.next(), "impE", Lwff(w0.seq, Bottom()), (n7, n4))
    return Apply(ids.next(), "botE", goal, (n8,), (hc,))


def _expand_FI(node: Apply, prems, ids: _Ids) -> Node:
    d1, r = prems
    w = _concl_of(d1)
    a = _split_sometime(node.conclusion.formula)
    seq = node.conclusion.seq
    _require(len(w.seq) == len(seq) + 1 and w.seq[:-1] == seq, "FI premise must extend the conclusion sequence by one label")
    _require(_norm(w.formula) == _norm(a), "FI premise must prove the operand")
    rw = r.formula if isinstance(r, Assume) else None
    _require(isinstance(rw, Le) and rw == Le(seq[-1], w.seq[-1]), "FI needs le(last, new) as its relational premise")
    _require(not node.discharges, "FI discharges nothing")
    h = Assume(ids.next(), Lwff(seq, Always(_not_f(a))))
    n1 = Apply(ids.next(), "GE", Lwff(w.seq, _not_f(a)), (h, r))
    n2 = Apply(ids.next(), "impE", Lwff(w.seq, Bottom()), (n1, d1))
    n3 = Apply(ids.next(), "botE", Lwff(seq, Bottom()), (n2,))
    return Apply(ids.next(), "impI", node.conclusion, (n3,), (h,))


def _expand_FE(node: Apply, prems, ids: _Ids) -> Node:
    d0, dh = prems
    w0 = _concl_of(d0)
    a = _split_sometime(w0.formula)
    goal = node.conclusion
    wh = _concl_of(dh)
    _require(wh.seq == goal.seq and _norm(wh.formula) == _norm(goal.formula), "FE hypothetical premise must prove the conclusion")
    b1 = w0.seq[-1]
    hr = [x for x in node.discharges if isinstance(x.formula, Le) and x.formula.a == b1]
    b2s = {x.formula.b for x in hr}
    hall = [
        x
        for x in node.discharges
        if isinstance(x.formula, Lwff)
        and len(x.formula.seq) == len(w0.seq) + 1
        and x.formula.seq[:-1] == w0.seq
        and _norm(x.formula.formula) == _norm(a)
    ]
    b2s |= {x.formula.seq[-1] for x in hall}
    _require(len(hr) + len(hall) == len(node.discharges), "FE discharges its witness assumptions only")
    _require(len(b2s) == 1, "FE witness assumptions must name one fresh label")
    b2 = b2s.pop()
    hc = Assume(ids.next(), Lwff(goal.seq, _not_f(goal.formula)))
    n1 = Apply(ids.next(), "impE", Lwff(goal.seq, Bottom()), (hc, dh))
    n2 = Apply(ids.next(), "botE", Lwff(w0.seq + (b2,), Bottom()), (n1,))
    n3 = Apply(ids.next(), "impI", Lwff(w0.seq + (b2,), _not_f(a)), (n2,), tuple(hall))
    n4 = Apply(ids.next(), "GI", Lwff(w0.seq, Always(_not_f(a))), (n3,), tuple(hr))
    n5 = Apply(ids.next(), "impE", Lwff(w0.seq, Bottom()), (d0, n4))
    return Apply(ids.next(), "botE", goal, (n5,), (hc,))


_TEMPLATES = {
    "andI": _expand_andI,
    "andE1": lambda n, p, i: _expand_andE(n, p, i, True),
    "andE2": lambda n, p, i: _expand_andE(n, p, i, False),
    "orIl": _expand_orIl,
    "orIr": _expand_orIr,
    "orE": _expand_orE,
    "FI": _expand_FI,
    "FE": _expand_FE,
}

_ARITY = {"andI": 2, "andE1": 1, "andE2": 1, "orIl": 1, "orIr": 1, "orE": 3, "FI": 2, "FE": 2}


def expand(root: Node) -> Node:
    """Rewrite derived-rule applications into primitive derivations."""
    from .kernel import _postorder

    ids = _Ids(max_node_id(root) + 1)
    memo: dict[int, Node] = {}
    for n in _postorder(root):
        if isinstance(n, Assume):
            memo[id(n)] = n
            continue
        prems = tuple(memo[id(p)] for p in n.premises)
        disch = tuple(memo[id(a)] for a in n.discharges)
        if n.rule in _TEMPLATES:
            if len(prems) != _ARITY[n.rule]:
                raise SchemaMismatch(f"rule {n.rule} takes {_ARITY[n.rule]} premises, got {len(prems)}")
            staged = Apply(n.id, n.rule, n.conclusion, prems, disch, n.subst)
            memo[id(n)] = _TEMPLATES[n.rule](staged, prems, ids)
        else:
            memo[id(n)] = Apply(n.id, n.rule, n.conclusion, prems, disch, n.subst)
    return memo[id(root)]


# --- Hilbert closure transformers -------------------------------------------


def _closed_single_label(d: Node, what: str) -> tuple[str, Formula]:
    report = check(d)
    if not report.accepted:
        raise ShapeMismatch(f"{what} requires an accepted derivation: {report.message}")
    if report.open_assumptions:
        raise ShapeMismatch(f"{what} requires a closed proof")
    if len(report.conclusion.seq) != 1:
        raise NonParametricLabel(f"{what} requires a single-label conclusion")
    return report.conclusion.seq[0], report.conclusion.formula


def mp_compose(d1: Node, d2: Node) -> Node:
    """From closed proofs of ``b : A`` and ``b : A -> B`` build ``b : B``."""
    b1, f1 = _closed_single_label(d1, "mp_compose")
    b2, f2 = _closed_single_label(d2, "mp_compose")
    if b1 != b2:
        raise ShapeMismatch(f"mp_compose labels differ: {b1!r} vs {b2!r}")
    g2 = desugar(f2)
    if not isinstance(g2, Implies) or g2.left != desugar(f1):
        raise ShapeMismatch("mp_compose needs proofs of A and A -> B")
    consequent = f2.right if isinstance(f2, Implies) else g2.right
    ids = _Ids(max_node_id(d1) + max_node_id(d2) + 1)
    return Apply(ids.next(), "impE", Lwff((b1,), consequent), (d2, d1))


def _nec(d: Node, op, rel, rule: str, name: str) -> Node:
    report = check(d)
    if not report.accepted:
        raise ShapeMismatch(f"{name} requires an accepted derivation: {report.message}")
    if classify_local(report.conclusion.formula) is not LocalClass.LOCAL:
        raise NotLocalFormula(f"{name} requires a local formula, got {format_formula(report.conclusion.formula)}")
    b, f = _closed_single_label(d, name)
    used = labels_of_derivation(d)
    c = next(f"w{i}" for i in itertools.count(1) if f"w{i}" not in used and f"w{i}" != b)
    renamed = rename_labels(d, {b: c})
    ids = _Ids(max_node_id(d) + 1)
    lifted = Apply(ids.next(), "last", Lwff((b, c), f), (renamed,))
    hyp = Assume(ids.next(), rel(b, c))
    return Apply(ids.next(), rule, Lwff((b,), op(f)), (lifted,), (hyp,))


def nec_g(d: Node) -> Node:
    """From a closed proof of ``b : C`` (C local) build one of ``b : G C``."""
    return _nec(d, Always, Le, "GI", "nec_g")


def nec_x(d: Node) -> Node:
    """From a closed proof of ``b : C`` (C local) build one of ``b : X C``."""
    return _nec(d, Next, Succ, "XI", "nec_x")


# --- tautology proofs --------------------------------------------------------


def _is_propositional(f: Formula) -> bool:
    if isinstance(f, (Always, Next, Hist, Until, Sometime)):
        return False
    if isinstance(f, (Implies, Or, And)):
        return _is_propositional(f.left) and _is_propositional(f.right)
    if isinstance(f, Not):
        return _is_propositional(f.operand)
    return True


def _eval_prop(f: Formula, v: dict[str, bool]) -> bool:
    if isinstance(f, Atom):
        return v[f.name]
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Implies):
        return (not _eval_prop(f.left, v)) or _eval_prop(f.right, v)
    raise TypeError(f"not a core propositional formula: {f!r}")


def derive_tautology(f: Formula, label: str = "b") -> Node:
    """Closed proof of ``label : f`` for a classical propositional tautology.

    Case-split construction: under each valuation of the atoms the formula
    (or the refuted side of each subformula) is derived from the literal
    assumptions, then the literals are eliminated atom by atom through
    excluded-middle reasoning built from botE.  Output uses only impI,
    impE and botE.
    """
    if not _is_propositional(f):
        raise NotPropositional(f"temporal operators in {format_formula(f)}")
    g = desugar(f)
    names = sorted(atoms_of(g))
    for bits in itertools.product([False, True], repeat=len(names)):
        if not _eval_prop(g, dict(zip(names, bits))):
            raise NotATautology(f"falsified by {dict(zip(names, bits))}")
    ids = _Ids(1)
    seq = (label,)

    def prove(phi: Formula, v: dict[str, bool], env: dict[str, Assume]) -> Node:
        # Derives `phi` when it holds under v, `phi -> bot` when it fails;
        # env holds this branch's literal assumption classes.
        if isinstance(phi, Atom):
            return env[phi.name]
        if isinstance(phi, Bottom):
            hb = Assume(ids.next(), Lwff(seq, Bottom()))
            return Apply(ids.next(), "impI", Lwff(seq, Implies(Bottom(), Bottom())), (hb,), (hb,))
        assert isinstance(phi, Implies)
        x, y = phi.left, phi.right
        if not _eval_prop(x, v):
            dx = prove(x, v, env)  # proves x -> bot
            h = Assume(ids.next(), Lwff(seq, x))
            n1 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (dx, h))
            n2 = Apply(ids.next(), "botE", Lwff(seq, y), (n1,))
            return Apply(ids.next(), "impI", Lwff(seq, phi), (n2,), (h,))
        if _eval_prop(y, v):
            return Apply(ids.next(), "impI", Lwff(seq, phi), (prove(y, v, env),))
        dx, dy = prove(x, v, env), prove(y, v, env)  # x holds, y -> bot
        h = Assume(ids.next(), Lwff(seq, phi))
        n1 = Apply(ids.next(), "impE", Lwff(seq, y), (h, dx))
        n2 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (dy, n1))
        return Apply(ids.next(), "impI", Lwff(seq, _not_f(phi)), (n2,), (h,))

    def build(v: dict[str, bool], env: dict[str, Assume], remaining: list[str]) -> Node:
        if not remaining:
            return prove(g, v, env)
        a, rest = remaining[0], remaining[1:]
        atom = Atom(a)
        lit_true = Assume(ids.next(), Lwff(seq, atom))
        lit_false = Assume(ids.next(), Lwff(seq, _not_f(atom)))
        d_true = build({**v, a: True}, {**env, a: lit_true}, rest)
        d_false = build({**v, a: False}, {**env, a: lit_false}, rest)
        d1 = Apply(ids.next(), "impI", Lwff(seq, Implies(atom, g)), (d_true,), (lit_true,))
        d2 = Apply(ids.next(), "impI", Lwff(seq, Implies(_not_f(atom), g)), (d_false,), (lit_false,))
        hf = Assume(ids.next(), Lwff(seq, _not_f(g)))
        ha = Assume(ids.next(), Lwff(seq, atom))
        m1 = Apply(ids.next(), "impE", Lwff(seq, g), (d1, ha))
        m2 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (hf, m1))
        m3 = Apply(ids.next(), "impI", Lwff(seq, _not_f(atom)), (m2,), (ha,))
        m4 = Apply(ids.next(), "impE", Lwff(seq, g), (d2, m3))
        m5 = Apply(ids.next(), "impE", Lwff(seq, Bottom()), (hf, m4))
        return Apply(ids.next(), "botE", Lwff(seq, g), (m5,), (hf,))

    return build({}, {}, names)
