"""Seeded random generators for formulas, models and derivations.

Formula generators pick constructors with equal weight under a complexity
budget.  The derivation generator builds kernel-accepted derivations by
forward chaining: every rule application satisfies the side conditions by
construction (eigenlabels come from a global fresh supply), and the result
is asserted Accepted.
"""

from __future__ import annotations

import random

from .formulas import (
    Always,
    Atom,
    Bottom,
    Formula,
    Hist,
    Implies,
    LocalClass,
    Next,
    Until,
    classify_local,
    temporal_depth,
)
from .kernel import (
    Apply,
    Assume,
    Le,
    Lwff,
    Node,
    Succ,
    check,
    labels_of_generic,
    normalize_generic,
    open_assumption_classes,
)

__all__ = [
    "random_until_formula",
    "random_history_formula",
    "random_local_formula",
    "random_hist_tier_formula",
    "random_obs_sequence",
    "random_interpretation",
    "DerivationSampler",
]

DEFAULT_SYMBOLS = ("p", "q", "r")


def _split(rng: random.Random, budget: int) -> tuple[int, int]:
    left = rng.randint(0, budget)
    return left, budget - left


def random_until_formula(rng: random.Random, budget: int, symbols=DEFAULT_SYMBOLS) -> Formula:
    if budget <= 0:
        return Atom(rng.choice(symbols)) if rng.random() < 0.8 else Bottom()
    kind = rng.randrange(6)
    if kind == 0:
        return Atom(rng.choice(symbols))
    if kind == 1:
        return Bottom()
    if kind == 2:
        lb, rb = _split(rng, budget - 1)
        return Implies(random_until_formula(rng, lb, symbols), random_until_formula(rng, rb, symbols))
    if kind == 3:
        return Always(random_until_formula(rng, budget - 1, symbols))
    if kind == 4:
        return Next(random_until_formula(rng, budget - 1, symbols))
    lb, rb = _split(rng, budget - 1)
    return Until(random_until_formula(rng, lb, symbols), random_until_formula(rng, rb, symbols))


def random_history_formula(
    rng: random.Random, budget: int, symbols=DEFAULT_SYMBOLS, max_temporal_depth: int | None = None
) -> Formula:
    def gen(b: int) -> Formula:
        if b <= 0:
            return Atom(rng.choice(symbols)) if rng.random() < 0.8 else Bottom()
        kind = rng.randrange(6)
        if kind == 0:
            return Atom(rng.choice(symbols))
        if kind == 1:
            return Bottom()
        if kind == 2:
            lb, rb = _split(rng, b - 1)
            return Implies(gen(lb), gen(rb))
        if kind == 3:
            return Always(gen(b - 1))
        if kind == 4:
            return Next(gen(b - 1))
        return Hist(gen(b - 1))

    f = gen(budget)
    if max_temporal_depth is not None:
        while temporal_depth(f) > max_temporal_depth:
            f = gen(budget)
    return f


def random_local_formula(rng: random.Random, budget: int, symbols=DEFAULT_SYMBOLS) -> Formula:
    """Sample from the local tier of the grammar (history only under G/X)."""
    if budget <= 0:
        return Atom(rng.choice(symbols)) if rng.random() < 0.8 else Bottom()
    kind = rng.randrange(5)
    if kind == 0:
        return Atom(rng.choice(symbols))
    if kind == 1:
        return Bottom()
    if kind == 2:
        lb, rb = _split(rng, budget - 1)
        return Implies(random_local_formula(rng, lb, symbols), random_local_formula(rng, rb, symbols))
    if kind == 3:
        return Always(random_hist_tier_formula(rng, budget - 1, symbols))
    return Next(random_hist_tier_formula(rng, budget - 1, symbols))


def random_hist_tier_formula(rng: random.Random, budget: int, symbols=DEFAULT_SYMBOLS) -> Formula:
    """Sample from the wider tier (history also at top or under implication)."""
    if budget <= 0:
        return random_local_formula(rng, 0, symbols)
    kind = rng.randrange(3)
    if kind == 0:
        return random_local_formula(rng, budget, symbols)
    if kind == 1:
        lb, rb = _split(rng, budget - 1)
        return Implies(random_hist_tier_formula(rng, lb, symbols), random_hist_tier_formula(rng, rb, symbols))
    return Hist(random_hist_tier_formula(rng, budget - 1, symbols))


def random_obs_sequence(rng: random.Random, max_len: int = 4, max_value: int = 10, min_len: int = 1) -> tuple[int, ...]:
    return tuple(rng.randint(0, max_value) for _ in range(rng.randint(min_len, max_len)))


def random_interpretation(rng: random.Random, labels, max_value: int = 12) -> dict[str, int]:
    return {lab: rng.randint(0, max_value) for lab in sorted(labels)}


class DerivationSampler:
    """Forward-chaining generator of small kernel-accepted derivations."""

    def __init__(self, rng: random.Random, symbols=("p", "q")):
        self.rng = rng
        self.symbols = symbols
        self._ids = 0
        self._labels = 0
        self.pool: list[Node] = []

    def _id(self) -> int:
        self._ids += 1
        return self._ids

    def _fresh_label(self) -> str:
        self._labels += 1
        return f"u{self._labels}"

    def _known_labels(self, node: Node) -> list[str]:
        labs: set[str] = set()
        if isinstance(node, Apply):
            labs |= set(node.conclusion.seq)
        for a in open_assumption_classes(node):
            labs |= labels_of_generic(a.formula)
        return sorted(labs)

    def _some_label(self, node: Node) -> str:
        labs = self._known_labels(node)
        if labs and self.rng.random() < 0.7:
            return self.rng.choice(labs)
        return self._fresh_label()

    def _concl(self, node: Node) -> Lwff:
        return node.formula if isinstance(node, Assume) else node.conclusion  # type: ignore[return-value]

    def _assume(self, formula) -> Assume:
        return Assume(self._id(), formula)

    def _matching_opens(self, node: Node, target) -> tuple[Assume, ...]:
        want = normalize_generic(target)
        hits = [a for a in open_assumption_classes(node) if normalize_generic(a.formula) == want]
        return tuple(sorted(hits, key=lambda a: a.id))

    def _seed(self) -> Node:
        seq = tuple(self._fresh_label() for _ in range(self.rng.randint(1, 2)))
        f = random_history_formula(self.rng, self.rng.randint(0, 2), self.symbols)
        return self._assume(Lwff(seq, f))

    def _small_formula(self) -> Formula:
        return random_history_formula(self.rng, self.rng.randint(0, 2), self.symbols)

    # Each step returns a new node or None when the chosen move does not fit.

    def _step_impI(self, d: Node) -> Node | None:
        w = self._concl(d)
        opens = open_assumption_classes(d)
        same_seq = [a for a in opens if isinstance(a.formula, Lwff) and a.formula.seq == w.seq]
        if same_seq and self.rng.random() < 0.7:
            target = self.rng.choice(sorted(same_seq, key=lambda a: a.id))
            ante = target.formula.formula
            disch = self._matching_opens(d, target.formula)
        else:
            ante = self._small_formula()
            disch = self._matching_opens(d, Lwff(w.seq, ante))
        return Apply(self._id(), "impI", Lwff(w.seq, Implies(ante, w.formula)), (d,), disch)

    def _step_impE(self, d: Node) -> Node | None:
        w = self._concl(d)
        target = self._small_formula()
        leaf = self._assume(Lwff(w.seq, Implies(w.formula, target)))
        return Apply(self._id(), "impE", Lwff(w.seq, target), (leaf, d))

    def _step_botE(self, d: Node) -> Node | None:
        w = self._concl(d)
        leaf = self._assume(Lwff(w.seq, Implies(w.formula, Bottom())))
        falsum = Apply(self._id(), "impE", Lwff(w.seq, Bottom()), (leaf, d))
        seq = tuple(self._fresh_label() for _ in range(self.rng.randint(1, 2)))
        return Apply(self._id(), "botE", Lwff(seq, self._small_formula()), (falsum,))

    def _step_GE(self, d: Node) -> Node | None:
        w = self._concl(d)
        if not isinstance(w.formula, Always):
            return None
        b2 = self._some_label(d)
        leaf = self._assume(Le(w.seq[-1], b2))
        return Apply(self._id(), "GE", Lwff(w.seq + (b2,), w.formula.operand), (d, leaf))

    def _step_XE(self, d: Node) -> Node | None:
        w = self._concl(d)
        if not isinstance(w.formula, Next):
            return None
        b2 = self._some_label(d)
        leaf = self._assume(Succ(w.seq[-1], b2))
        return Apply(self._id(), "XE", Lwff(w.seq + (b2,), w.formula.operand), (d, leaf))

    def _step_histE(self, d: Node) -> Node | None:
        w = self._concl(d)
        if not isinstance(w.formula, Hist) or len(w.seq) < 2:
            return None
        b1, b3 = w.seq[-2], w.seq[-1]
        b2 = self._some_label(d)
        l1 = self._assume(Le(b1, b2))
        l2 = self._assume(Le(b2, b3))
        return Apply(self._id(), "histE", Lwff(w.seq[:-1] + (b2,), w.formula.operand), (d, l1, l2))

    def _fresh_ok(self, d: Node, label: str, disch: tuple[Assume, ...]) -> bool:
        rem = open_assumption_classes(d) - set(disch)
        return all(label not in labels_of_generic(a.formula) for a in rem)

    def _step_GI(self, d: Node) -> Node | None:
        w = self._concl(d)
        if len(w.seq) < 2:
            return None
        b1, b2 = w.seq[-2], w.seq[-1]
        disch = self._matching_opens(d, Le(b1, b2))
        if b2 == b1 or not self._fresh_ok(d, b2, disch):
            return None
        return Apply(self._id(), "GI", Lwff(w.seq[:-1], Always(w.formula)), (d,), disch)

    def _step_XI(self, d: Node) -> Node | None:
        w = self._concl(d)
        if len(w.seq) < 2:
            return None
        b1, b2 = w.seq[-2], w.seq[-1]
        disch = self._matching_opens(d, Succ(b1, b2))
        if b2 == b1 or not self._fresh_ok(d, b2, disch):
            return None
        return Apply(self._id(), "XI", Lwff(w.seq[:-1], Next(w.formula)), (d,), disch)

    def _step_histI(self, d: Node) -> Node | None:
        w = self._concl(d)
        if len(w.seq) < 2:
            return None
        b1, b2 = w.seq[-2], w.seq[-1]
        b3 = self._some_label(d)
        disch = self._matching_opens(d, Le(b1, b2)) + self._matching_opens(d, Le(b2, b3))
        if b2 in (b1, b3) or not self._fresh_ok(d, b2, disch):
            return None
        return Apply(self._id(), "histI", Lwff(w.seq[:-1] + (b3,), Hist(w.formula)), (d,), disch)

    def _step_last(self, d: Node) -> Node | None:
        w = self._concl(d)
        if classify_local(w.formula) is not LocalClass.LOCAL:
            return None
        prefix = tuple(self._some_label(d) for _ in range(self.rng.randint(0, 2)))
        return Apply(self._id(), "last", Lwff(prefix + (w.seq[-1],), w.formula), (d,))

    def _step_reflLe(self, d: Node) -> Node | None:
        w = self._concl(d)
        x = self._some_label(d)
        disch = self._matching_opens(d, Le(x, x))
        return Apply(self._id(), "reflLe", Lwff(w.seq, w.formula), (d,), disch)

    def _step_transLe(self, d: Node) -> Node | None:
        w = self._concl(d)
        x, y, z = (self._some_label(d) for _ in range(3))
        l1 = self._assume(Le(x, y))
        l2 = self._assume(Le(y, z))
        disch = self._matching_opens(d, Le(x, z))
        return Apply(self._id(), "transLe", Lwff(w.seq, w.formula), (l1, l2, d), disch)

    def _step_baseLe(self, d: Node) -> Node | None:
        w = self._concl(d)
        x, y = self._some_label(d), self._some_label(d)
        l1 = self._assume(Succ(x, y))
        disch = self._matching_opens(d, Le(x, y))
        return Apply(self._id(), "baseLe", Lwff(w.seq, w.formula), (l1, d), disch)

    def _step_eqLe(self, d: Node) -> Node | None:
        w = self._concl(d)
        b1 = w.seq[-1]
        b2 = self._some_label(d)
        l1 = self._assume(Le(b1, b2))
        l2 = self._assume(Le(b2, b1))
        return Apply(self._id(), "eqLe", Lwff(w.seq[:-1] + (b2,), w.formula), (l1, l2, d))

    def _step_serS(self, d: Node) -> Node | None:
        w = self._concl(d)
        x = self._some_label(d)
        y = self._fresh_label()
        leaf = self._assume(Succ(x, y))
        used = Apply(self._id(), "baseLe", Lwff(w.seq, w.formula), (leaf, d), self._matching_opens(d, Le(x, y)))
        return Apply(self._id(), "serS", Lwff(w.seq, w.formula), (used,), (leaf,))

    def _step_linS(self, d: Node) -> Node | None:
        w = self._concl(d)
        if isinstance(w.formula, Always):
            # uniqueness moves the instantiation point of GE between the
            # two successors of a shared base label
            base = self._some_label(d)
            y, z = self._fresh_label(), self._fresh_label()
            r1 = self._assume(Succ(base, y))
            r2 = self._assume(Succ(base, z))
            used = self._assume(Le(w.seq[-1], z))
            hyp = Apply(self._id(), "GE", Lwff(w.seq + (z,), w.formula.operand), (d, used))
            phi = self._assume(Le(w.seq[-1], y))
            return Apply(self._id(), "linS", hyp.conclusion, (r1, r2, phi, hyp), (used,), (y, z))
        x = self._some_label(d)
        y, z = self._fresh_label(), self._fresh_label()
        r1 = self._assume(Succ(x, y))
        r2 = self._assume(Succ(x, z))
        phi = self._assume(Le(y, x))
        ghost = self._assume(Le(z, x))  # phi with z for y; vacuously discharged
        return Apply(self._id(), "linS", Lwff(w.seq, w.formula), (r1, r2, phi, d), (ghost,), (y, z))

    def _step_splitLe(self, d: Node) -> Node | None:
        w = self._concl(d)
        x, y = self._some_label(d), self._some_label(d)
        r1 = self._assume(Le(x, y))
        phi = self._assume(Le(x, x))
        eq_ghost = self._assume(Le(y, y))
        fresh = self._fresh_label()
        s_ghost = self._assume(Succ(x, fresh))
        l_ghost = self._assume(Le(fresh, y))
        return Apply(
            self._id(),
            "splitLe",
            Lwff(w.seq, w.formula),
            (r1, phi, d, d),
            (eq_ghost, s_ghost, l_ghost),
            (x, y),
        )

    def _step_ind(self, d: Node) -> Node | None:
        w = self._concl(d)
        alpha, b0 = w.seq[:-1], w.seq[-1]
        b = self._some_label(d)
        bj = self._fresh_label()
        if b == b0 or b == bj:
            return None
        rel = self._assume(Le(b0, b))
        neg = self._assume(Lwff(w.seq, Implies(w.formula, Bottom())))
        falsum = Apply(self._id(), "impE", Lwff(w.seq, Bottom()), (neg, d))
        hyp = Apply(self._id(), "botE", Lwff(alpha + (bj,), w.formula), (falsum,))
        return Apply(self._id(), "ind", Lwff(alpha + (b,), w.formula), (d, rel, hyp), ())

    def sample(self, steps: int = 6) -> Node:
        d = self._seed()
        ops = [
            self._step_impI,
            self._step_impE,
            self._step_botE,
            self._step_GE,
            self._step_XE,
            self._step_histE,
            self._step_GI,
            self._step_XI,
            self._step_histI,
            self._step_last,
            self._step_reflLe,
            self._step_transLe,
            self._step_baseLe,
            self._step_eqLe,
            self._step_serS,
            self._step_linS,
            self._step_splitLe,
            self._step_ind,
        ]
        for _ in range(steps):
            op = self.rng.choice(ops)
            out = op(d)
            if out is not None:
                d = out
        report = check(d)
        assert report.accepted, f"generator produced a rejected derivation: {report.message}"
        return d
