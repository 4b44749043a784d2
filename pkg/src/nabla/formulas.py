"""Formula ASTs for the two object languages, with parsing and printing.

Two closely related languages share one node hierarchy:

* the "until" language: atoms, bot, ``->``, ``G``, ``X``, ``U``;
* the "history" language: atoms, bot, ``->``, ``G``, ``X``, ``H``.

``~``, ``|``, ``&`` and ``F`` are definitional abbreviations available in
both languages; :func:`desugar` expands them.  Language membership is
checked by :func:`in_until_language` / :func:`in_history_language`, and the
two parsers reject the foreign operator (``H`` resp. ``U``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

__all__ = [
    "Formula",
    "Atom",
    "Bottom",
    "Implies",
    "Always",
    "Next",
    "Until",
    "Hist",
    "Not",
    "Or",
    "And",
    "Sometime",
    "LocalClass",
    "ParseError",
    "parse_ltl",
    "parse_h",
    "format_formula",
    "desugar",
    "is_desugared",
    "complexity",
    "temporal_depth",
    "classify_local",
    "in_until_language",
    "in_history_language",
    "atoms_of",
]


class Formula:
    """Base class; all nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Hist(Formula):
    """The history operator (written ``H`` in concrete syntax)."""

    operand: Formula


# Abbreviations.  desugar() removes them; printers keep them for readability.


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Sometime(Formula):
    operand: Formula


class LocalClass(enum.Enum):
    """Position of a history-language formula in the local grammar.

    LOCAL formulas keep their truth value under replacement of every
    observation-sequence element but the last; HIST_ONLY formulas need the
    last two.  NEITHER is unreachable for desugared history-language input
    (asserted in :func:`classify_local`).
    """

    LOCAL = "local"
    HIST_ONLY = "hist-only"
    NEITHER = "neither"


class ParseError(ValueError):
    """Raised on malformed concrete syntax.

    ``offset`` is the byte offset of the offending token; ``expected`` is
    the set of token descriptions that would have been accepted there.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str]):
        super().__init__(f"{message} at offset {offset} (expected one of: {', '.join(sorted(expected))})")
        self.offset = offset
        self.expected = expected


RESERVED = frozenset({"bot", "G", "X", "F", "H", "U"})

_UNARY = {"G": Always, "X": Next, "F": Sometime, "H": Hist, "~": Not}
_BINARY = {"->": Implies, "|": Or, "&": And, "U": Until}


def _tokenize(text: str, partial: bool = False) -> list[tuple[str, int]]:
    # partial: stop at the first non-formula character instead of raising,
    # so one formula can be parsed out of a longer line.
    tokens: list[tuple[str, int]] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()~|&":
            tokens.append((ch, i))
            i += 1
        elif ch == "-":
            if text.startswith("->", i):
                tokens.append(("->", i))
                i += 2
            elif partial:
                break
            else:
                raise ParseError(f"stray {ch!r}", i, frozenset({"->"}))
        elif ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], i))
            i = j
        elif partial:
            break
        else:
            raise ParseError(f"unexpected character {ch!r}", i, frozenset({"identifier", "("}))
    tokens.append(("<end>", i if partial else n))
    return tokens


class _Parser:
    def __init__(self, text: str, allow_until: bool, allow_hist: bool, partial: bool = False):
        self.tokens = _tokenize(text, partial)
        self.pos = 0
        self.allow_until = allow_until
        self.allow_hist = allow_hist

    def peek(self) -> tuple[str, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: set[str]) -> ParseError:
        tok, off = self.peek()
        return ParseError(f"unexpected token {tok!r}", off, frozenset(expected))

    def formula(self) -> Formula:
        tok, off = self.next()
        if tok == "bot":
            return Bottom()
        if tok == "(":
            return self.parenthesized()
        if tok.isidentifier() and tok not in RESERVED:
            return Atom(tok)
        self.pos -= 1
        raise self.fail({"identifier", "bot", "("})

    def parenthesized(self) -> Formula:
        tok, off = self.peek()
        if tok in _UNARY:
            if tok == "H" and not self.allow_hist:
                raise ParseError("operator 'H' not in this language", off, frozenset({"identifier", "bot", "("}))
            self.next()
            operand = self.formula()
            self.expect(")")
            return _UNARY[tok](operand)
        left = self.formula()
        op, op_off = self.next()
        if op == "U" and not self.allow_until:
            raise ParseError("operator 'U' not in this language", op_off, frozenset({"->", "|", "&"}))
        if op not in _BINARY:
            self.pos -= 1
            ops = {"->", "|", "&"} | ({"U"} if self.allow_until else set())
            raise self.fail(ops)
        right = self.formula()
        self.expect(")")
        return _BINARY[op](left, right)

    def expect(self, tok: str) -> None:
        got, off = self.next()
        if got != tok:
            self.pos -= 1
            raise self.fail({tok})

    def run(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "<end>":
            raise self.fail({"<end>"})
        return f


def parse_ltl(text: str) -> Formula:
    """Parse a formula of the until language (``U`` allowed, ``H`` rejected)."""
    return _Parser(text, allow_until=True, allow_hist=False).run()


def parse_h(text: str) -> Formula:
    """Parse a formula of the history language (``H`` allowed, ``U`` rejected)."""
    return _Parser(text, allow_until=False, allow_hist=True).run()


def format_formula(f: Formula) -> str:
    """Concrete syntax; inverse of the parsers on every AST."""
    match f:
        case Atom(name):
            return name
        case Bottom():
            return "bot"
        case Implies(a, b):
            return f"({format_formula(a)} -> {format_formula(b)})"
        case Or(a, b):
            return f"({format_formula(a)} | {format_formula(b)})"
        case And(a, b):
            return f"({format_formula(a)} & {format_formula(b)})"
        case Until(a, b):
            return f"({format_formula(a)} U {format_formula(b)})"
        case Always(a):
            return f"(G {format_formula(a)})"
        case Next(a):
            return f"(X {format_formula(a)})"
        case Sometime(a):
            return f"(F {format_formula(a)})"
        case Hist(a):
            return f"(H {format_formula(a)})"
        case Not(a):
            return f"(~ {format_formula(a)})"
    raise TypeError(f"not a formula: {f!r}")


def desugar(f: Formula) -> Formula:
    """Expand ``~``, ``|``, ``&`` and ``F`` into the core connectives.

    Uses exactly: ``~a = a -> bot``, ``a | b = (~a) -> b``,
    ``a & b = ~(~a | ~b)`` and ``F a = ~(G (~a))``.
    """
    match f:
        case Atom() | Bottom():
            return f
        case Implies(a, b):
            return Implies(desugar(a), desugar(b))
        case Always(a):
            return Always(desugar(a))
        case Next(a):
            return Next(desugar(a))
        case Until(a, b):
            return Until(desugar(a), desugar(b))
        case Hist(a):
            return Hist(desugar(a))
        case Not(a):
            return Implies(desugar(a), Bottom())
        case Or(a, b):
            return Implies(Implies(desugar(a), Bottom()), desugar(b))
        case And(a, b):
            return desugar(Not(Or(Not(a), Not(b))))
        case Sometime(a):
            return Implies(Always(Implies(desugar(a), Bottom())), Bottom())
    raise TypeError(f"not a formula: {f!r}")


def is_desugared(f: Formula) -> bool:
    match f:
        case Atom() | Bottom():
            return True
        case Implies(a, b) | Until(a, b):
            return is_desugared(a) and is_desugared(b)
        case Always(a) | Next(a) | Hist(a):
            return is_desugared(a)
    return False


def complexity(f: Formula) -> int:
    """Number of connective/temporal-operator nodes after desugaring."""
    g = desugar(f)

    def count(x: Formula) -> int:
        match x:
            case Atom() | Bottom():
                return 0
            case Implies(a, b) | Until(a, b):
                return 1 + count(a) + count(b)
            case Always(a) | Next(a) | Hist(a):
                return 1 + count(a)
        raise TypeError(f"not a core formula: {x!r}")

    return count(g)


def temporal_depth(f: Formula) -> int:
    """Maximum nesting depth of temporal operators, after desugaring."""
    g = desugar(f)

    def depth(x: Formula) -> int:
        match x:
            case Atom() | Bottom():
                return 0
            case Implies(a, b) | Until(a, b):
                return max(depth(a), depth(b))
            case Always(a) | Next(a) | Hist(a):
                return 1 + depth(a)
        raise TypeError(f"not a core formula: {x!r}")

    return depth(g)


def in_until_language(f: Formula) -> bool:
    """True iff no history node occurs anywhere in ``f``."""
    match f:
        case Atom() | Bottom():
            return True
        case Hist(_):
            return False
        case Implies(a, b) | Until(a, b) | Or(a, b) | And(a, b):
            return in_until_language(a) and in_until_language(b)
        case Always(a) | Next(a) | Not(a) | Sometime(a):
            return in_until_language(a)
    return False


def in_history_language(f: Formula) -> bool:
    """True iff no until node occurs anywhere in ``f``."""
    match f:
        case Atom() | Bottom():
            return True
        case Until(_, _):
            return False
        case Implies(a, b) | Or(a, b) | And(a, b):
            return in_history_language(a) and in_history_language(b)
        case Always(a) | Next(a) | Not(a) | Sometime(a) | Hist(a):
            return in_history_language(a)
    return False


def _is_local(f: Formula) -> bool:
    # Local grammar: H may only occur under G or X.  G/X bodies are
    # unconstrained (any history-language formula qualifies there).
    match f:
        case Atom() | Bottom():
            return True
        case Implies(a, b):
            return _is_local(a) and _is_local(b)
        case Always(_) | Next(_):
            return True
        case Hist(_):
            return False
    raise TypeError(f"not a desugared history formula: {f!r}")


def classify_local(f: Formula) -> LocalClass:
    """Classify a history-language formula against the local grammar.

    Input is desugared first.  Every desugared history-language formula
    belongs to the history tier of the grammar, so NEITHER is unreachable;
    this is asserted rather than returned.
    """
    g = desugar(f)
    if not in_history_language(g):
        raise ValueError(f"not a history-language formula: {format_formula(f)}")
    if _is_local(g):
        return LocalClass.LOCAL
    assert in_history_language(g)  # NEITHER unreachable on desugared input
    return LocalClass.HIST_ONLY


def atoms_of(f: Formula) -> frozenset[str]:
    match f:
        case Atom(name):
            return frozenset({name})
        case Bottom():
            return frozenset()
        case Implies(a, b) | Until(a, b) | Or(a, b) | And(a, b):
            return atoms_of(a) | atoms_of(b)
        case Always(a) | Next(a) | Not(a) | Sometime(a) | Hist(a):
            return atoms_of(a)
    raise TypeError(f"not a formula: {f!r}")
