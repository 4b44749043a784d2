"""Lasso models and the two truth relations.

Models of the logic live over the natural numbers; here they are presented
finitely as lassos: a stem of ``s`` valuations followed by a loop of period
``p >= 1`` that repeats forever.  ``eval_ltl`` evaluates until-language
formulas at a position; ``eval_h`` evaluates history-language formulas at
an observation sequence (a nonempty list of positions, not necessarily
monotone).

The history-language clause for ``G`` quantifies over all positions beyond
the last sequence element.  ``eval_h`` truncates that quantifier at
``max(n_k, s) + 2p``: past the stem, valuations repeat with period ``p``,
so an interval containing two full periods decides the quantifier.  The
bound is validated empirically against ``eval_h_oracle``, a literal
transcription with a caller-chosen horizon.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .formulas import (
    Always,
    Atom,
    Bottom,
    Formula,
    Hist,
    Implies,
    Next,
    Until,
    desugar,
    format_formula,
    in_history_language,
    in_until_language,
    temporal_depth,
)
from .kernel import GenericFormula, Le, Lwff, Succ, format_generic

__all__ = [
    "LassoModel",
    "Counterexample",
    "HorizonTooSmall",
    "UnboundLabel",
    "ModelFormatError",
    "parse_model",
    "format_model",
    "eval_ltl",
    "eval_h",
    "eval_h_oracle",
    "eval_rwff",
    "eval_lwff",
    "eval_generic",
    "random_lasso",
    "falsify_consequence",
]


class HorizonTooSmall(ValueError):
    pass


class UnboundLabel(KeyError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LassoModel:
    """Valuations for positions ``0 .. s+p-1``; position ``n >= s`` reads
    ``loop[(n - s) % p]``."""

    stem: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        if not self.loop:
            raise ValueError("loop period must be at least 1")

    @property
    def stem_len(self) -> int:
        return len(self.stem)

    @property
    def period(self) -> int:
        return len(self.loop)

    def valuation(self, n: int) -> frozenset[str]:
        if n < self.stem_len:
            return self.stem[n]
        return self.loop[(n - self.stem_len) % self.period]

    def canon(self, n: int) -> int:
        """Canonical table index for position ``n``."""
        if n < self.stem_len:
            return n
        return self.stem_len + (n - self.stem_len) % self.period

    def to_dict(self) -> dict:
        return {
            "stem": [sorted(v) for v in self.stem],
            "loop": [sorted(v) for v in self.loop],
        }


def parse_model(text: str) -> LassoModel:
    """Line format: ``stem <s>``, ``loop <p>``, then ``at <i>: <ident>*``
    for i in order 0..s+p-1, then ``end``."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) < 3 or not lines[0].startswith("stem ") or not lines[1].startswith("loop "):
        raise ModelFormatError("model file must start with 'stem <s>' and 'loop <p>' lines")
    try:
        s = int(lines[0].split()[1])
        p = int(lines[1].split()[1])
    except (IndexError, ValueError) as e:
        raise ModelFormatError(f"bad stem/loop header: {e}")
    if s < 0 or p < 1:
        raise ModelFormatError("need stem >= 0 and loop >= 1")
    if lines[-1] != "end":
        raise ModelFormatError("model file must end with 'end'")
    rows = lines[2:-1]
    if len(rows) != s + p:
        raise ModelFormatError(f"expected {s + p} 'at' lines, found {len(rows)}")
    table: list[frozenset[str]] = []
    for i, row in enumerate(rows):
        head, _, syms = row.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "at" or parts[1] != str(i):
            raise ModelFormatError(f"expected 'at {i}: ...', got {row!r}")
        table.append(frozenset(syms.split()))
    return LassoModel(tuple(table[:s]), tuple(table[s:]))


def format_model(m: LassoModel) -> str:
    out = [f"stem {m.stem_len}", f"loop {m.period}"]
    for i, v in enumerate(m.stem + m.loop):
        out.append(f"at {i}: {' '.join(sorted(v))}".rstrip())
    out.append("end")
    return "\n".join(out) + "\n"


def eval_ltl(m: LassoModel, n: int, a: Formula) -> bool:
    """Truth of an until-language formula at position ``n``.

    Positions are canonicalized into the ``s + p`` window and each
    subformula gets a per-position table; ``G`` and ``U`` are resolved by
    fixpoint over the window.
    """
    if n < 0:
        raise ValueError("positions are natural numbers")
    if not in_until_language(a):
        raise ValueError(f"not an until-language formula: {format_formula(a)}")
    g = desugar(a)
    s, p = m.stem_len, m.period
    size = s + p
    succ = [i + 1 if i + 1 < size else s for i in range(size)]
    tables: dict[Formula, list[bool]] = {}

    def table(x: Formula) -> list[bool]:
        t = tables.get(x)
        if t is not None:
            return t
        if isinstance(x, Atom):
            t = [x.name in m.valuation(i) for i in range(size)]
        elif isinstance(x, Bottom):
            t = [False] * size
        elif isinstance(x, Implies):
            ta, tb = table(x.left), table(x.right)
            t = [(not ta[i]) or tb[i] for i in range(size)]
        elif isinstance(x, Next):
            ta = table(x.operand)
            t = [ta[succ[i]] for i in range(size)]
        elif isinstance(x, Always):
            ta = table(x.operand)
            loop_all = all(ta[s:])
            t = [loop_all if i >= s else (all(ta[i:s]) and loop_all) for i in range(size)]
        elif isinstance(x, Until):
            ta, tb = table(x.left), table(x.right)
            t = [False] * size
            changed = True
            while changed:
                changed = False
                for i in reversed(range(size)):
                    v = tb[i] or (ta[i] and t[succ[i]])
                    if v and not t[i]:
                        t[i] = True
                        changed = True
        else:
            raise TypeError(f"not a core formula: {x!r}")
        tables[x] = t
        return t

    return table(g)[m.canon(n)]


def _check_sequence(seq) -> tuple[int, ...]:
    sigma = tuple(seq)
    if not sigma:
        raise ValueError("observation sequences are nonempty")
    if any(n < 0 for n in sigma):
        raise ValueError("observation sequences contain natural numbers")
    return sigma


def eval_h(m: LassoModel, seq, a: Formula) -> bool:
    """Truth of a history-language formula at an observation sequence."""
    sigma = _check_sequence(seq)
    if not in_history_language(a):
        raise ValueError(f"not a history-language formula: {format_formula(a)}")
    g = desugar(a)
    s, p = m.stem_len, m.period
    memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def ev(sig: tuple[int, ...], x: Formula) -> bool:
        key = (id(x), sig)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(x, Atom):
            v = x.name in m.valuation(sig[-1])
        elif isinstance(x, Bottom):
            v = False
        elif isinstance(x, Implies):
            v = (not ev(sig, x.left)) or ev(sig, x.right)
        elif isinstance(x, Next):
            v = ev(sig + (sig[-1] + 1,), x.operand)
        elif isinstance(x, Always):
            nk = sig[-1]
            hi = max(nk, s) + 2 * p
            v = all(ev(sig + (mm,), x.operand) for mm in range(nk, hi + 1))
        elif isinstance(x, Hist):
            if len(sig) == 1:
                v = ev(sig, x.operand)
            else:
                prev = sig[:-1]
                v = all(ev(prev + (mm,), x.operand) for mm in range(sig[-2], sig[-1] + 1))
        else:
            raise TypeError(f"not a core formula: {x!r}")
        memo[key] = v
        return v

    return ev(sigma, g)


def eval_h_oracle(m: LassoModel, seq, a: Formula, horizon: int) -> bool:
    """Literal transcription of the truth clauses with truncated ``G``;
    test-only reference for ``eval_h``'s two-period bound.

    Requires ``horizon >= max(seq) + (s+p) * temporal_depth(a) + 1``.  The
    slack ``horizon - max(seq)`` becomes the window of every ``G``
    quantifier (each ranges over ``[n_k, n_k + slack]``), so a top-level
    ``G`` is truncated at the horizon and nested quantifiers keep the same
    generous headroom instead of sharing one absolute cutoff.
    """
    sigma = _check_sequence(seq)
    if not in_history_language(a):
        raise ValueError(f"not a history-language formula: {format_formula(a)}")
    need = max(sigma) + (m.stem_len + m.period) * temporal_depth(a) + 1
    if horizon < need:
        raise HorizonTooSmall(f"horizon {horizon} < required {need}")
    slack = horizon - max(sigma)
    g = desugar(a)
    memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def ev(sig: tuple[int, ...], x: Formula) -> bool:
        key = (id(x), sig)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(x, Atom):
            v = x.name in m.valuation(sig[-1])
        elif isinstance(x, Bottom):
            v = False
        elif isinstance(x, Implies):
            v = (not ev(sig, x.left)) or ev(sig, x.right)
        elif isinstance(x, Next):
            v = ev(sig + (sig[-1] + 1,), x.operand)
        elif isinstance(x, Always):
            v = all(ev(sig + (mm,), x.operand) for mm in range(sig[-1], sig[-1] + slack + 1))
        elif isinstance(x, Hist):
            if len(sig) == 1:
                v = ev(sig, x.operand)
            else:
                prev = sig[:-1]
                v = all(ev(prev + (mm,), x.operand) for mm in range(sig[-2], sig[-1] + 1))
        else:
            raise TypeError(f"not a core formula: {x!r}")
        memo[key] = v
        return v

    return ev(sigma, g)


def eval_rwff(m: LassoModel, interp: dict[str, int], r: Le | Succ) -> bool:
    try:
        va, vb = interp[r.a], interp[r.b]
    except KeyError as e:
        raise UnboundLabel(str(e))
    if isinstance(r, Le):
        return va <= vb
    return vb == va + 1


def eval_lwff(m: LassoModel, interp: dict[str, int], w: Lwff) -> bool:
    try:
        sigma = tuple(interp[x] for x in w.seq)
    except KeyError as e:
        raise UnboundLabel(str(e))
    return eval_h(m, sigma, w.formula)


def eval_generic(m: LassoModel, interp: dict[str, int], phi: GenericFormula) -> bool:
    if isinstance(phi, Lwff):
        return eval_lwff(m, interp, phi)
    return eval_rwff(m, interp, phi)


@dataclass(frozen=True)
class Counterexample:
    model: LassoModel
    interpretation: dict[str, int]
    sample_index: int
    failing: str

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "interpretation": dict(sorted(self.interpretation.items())),
            "sample_index": self.sample_index,
            "failing": self.failing,
        }


def _labels_in(formulas) -> list[str]:
    labs: set[str] = set()
    for phi in formulas:
        if isinstance(phi, Lwff):
            labs |= set(phi.seq)
        else:
            labs |= {phi.a, phi.b}
    return sorted(labs)


def _symbols_in(formulas) -> list[str]:
    from .formulas import atoms_of

    syms: set[str] = set()
    for phi in formulas:
        if isinstance(phi, Lwff):
            syms |= atoms_of(phi.formula)
    return sorted(syms)


def random_lasso(rng: random.Random, symbols, max_stem: int = 4, max_period: int = 3) -> LassoModel:
    """Each valuation cell is an independent fair coin per symbol."""
    syms = list(symbols) if symbols else ["p"]
    s = rng.randint(0, max_stem)
    p = rng.randint(1, max_period)
    cells = [frozenset(x for x in syms if rng.random() < 0.5) for _ in range(s + p)]
    return LassoModel(tuple(cells[:s]), tuple(cells[s:]))


def falsify_consequence(
    premises,
    goal: GenericFormula,
    samples: int,
    seed: int,
    max_label_value: int = 12,
) -> Counterexample | None:
    """Search random (model, interpretation) pairs for one satisfying every
    premise but not the goal.  A falsifier, never a prover: finding nothing
    does not establish the consequence.  Deterministic for a fixed seed.
    """
    premises = list(premises)
    every = premises + [goal]
    labels = _labels_in(every)
    symbols = _symbols_in(every)
    rng = random.Random(seed)
    for i in range(samples):
        model = random_lasso(rng, symbols)
        interp = {lab: rng.randint(0, max_label_value) for lab in labels}
        if all(eval_generic(model, interp, phi) for phi in premises) and not eval_generic(model, interp, goal):
            return Counterexample(model, interp, i, format_generic(goal))
    return None
