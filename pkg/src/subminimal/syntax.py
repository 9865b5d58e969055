"""Formula ASTs, the surface grammar, and compilation to kernel opcodes.

Two surface languages share one node hierarchy. The propositional
language has atoms, T, &, |, -> and the primitive negation ~; it has
no falsum. The modal language adds F, [] and [n], and there ~x is
sugar for x -> F, so parsed modal formulas never contain a Neg node.

Operator precedence, loosest first: <-> (desugared while parsing),
-> (right associative), |, &, then the prefix operators. The printer
emits the minimal parenthesisation, so parse(show(f)) == f for every
formula, while show(parse(s)) == s only for inputs that already use
minimal parentheses and no <->.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from subminimal.kernels.ops import (
    OP_AND,
    OP_BBOX,
    OP_BOT,
    OP_BOX,
    OP_IMP,
    OP_NEG,
    OP_OR,
    OP_TOP,
    OP_VAR,
)


class ParseError(ValueError):
    """Raised on malformed input, with the offset of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position


class Formula:
    """Base class for all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Formula):
    pass


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class BBox(Formula):
    sub: Formula


_BINARY = (And, Or, Imp)
_UNARY = (Neg, Box, BBox)


def _children(formula: Formula) -> tuple[Formula, ...]:
    if isinstance(formula, _BINARY):
        return (formula.left, formula.right)
    if isinstance(formula, _UNARY):
        return (formula.sub,)
    return ()


def is_prop(formula: Formula) -> bool:
    """True when the formula stays inside the propositional language."""
    return all(
        not isinstance(f, (Bot, Box, BBox)) for f in _walk(formula)
    )


def is_modal(formula: Formula) -> bool:
    """True when the formula stays inside the modal language (no Neg)."""
    return all(not isinstance(f, Neg) for f in _walk(formula))


def _walk(formula: Formula) -> Iterator[Formula]:
    stack = [formula]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(_children(f))


# --------------------------------------------------------------------------
# printing


def _prec(formula: Formula) -> int:
    if isinstance(formula, (Var, Top, Bot)):
        return 4
    if isinstance(formula, _UNARY):
        return 3
    if isinstance(formula, And):
        return 2
    if isinstance(formula, Or):
        return 1
    return 0


def show(formula: Formula) -> str:
    """Render a formula in the surface syntax with minimal parentheses."""
    if isinstance(formula, Var):
        return formula.name
    if isinstance(formula, Top):
        return "T"
    if isinstance(formula, Bot):
        return "F"
    if isinstance(formula, _UNARY):
        op = "~" if isinstance(formula, Neg) else "[]" if isinstance(formula, Box) else "[n]"
        return op + _wrap(formula.sub, 3, False)
    if isinstance(formula, And):
        return _wrap(formula.left, 2, False) + " & " + _wrap(formula.right, 2, True)
    if isinstance(formula, Or):
        return _wrap(formula.left, 1, False) + " | " + _wrap(formula.right, 1, True)
    if isinstance(formula, Imp):
        return _wrap(formula.left, 0, True) + " -> " + _wrap(formula.right, 0, False)
    raise TypeError(f"not a formula: {formula!r}")


def _wrap(formula: Formula, level: int, strict: bool) -> str:
    p = _prec(formula)
    if p < level or (strict and p == level):
        return "(" + show(formula) + ")"
    return show(formula)


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"(?P<iff><->)|(?P<imp>->)|(?P<and>&)|(?P<or>\|)|(?P<not>~)"
    r"|(?P<bbox>\[n\])|(?P<box>\[\])|(?P<lp>\()|(?P<rp>\))"
    r"|(?P<top>T\b)|(?P<bot>F\b)|(?P<atom>[a-z][a-zA-Z0-9_]*)"
)

_WS_RE = re.compile(r"\s*")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        pos = _WS_RE.match(text, pos).end()
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", pos)
        tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], modal: bool):
        self.tokens = tokens
        self.i = 0
        self.modal = modal

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.tokens[self.i][2])

    def iff(self) -> Formula:
        left = self.imp()
        if self.peek() == "iff":
            self.take()
            right = self.iff()
            return And(Imp(left, right), Imp(right, left))
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek() == "imp":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek() == "or":
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.unary()
        while self.peek() == "and":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind = self.peek()
        if kind == "not":
            self.take()
            sub = self.unary()
            return Imp(sub, Bot()) if self.modal else Neg(sub)
        if kind in ("box", "bbox"):
            if not self.modal:
                raise self.fail("modal operator outside the modal language")
            self.take()
            sub = self.unary()
            return Box(sub) if kind == "box" else BBox(sub)
        return self.atom()

    def atom(self) -> Formula:
        kind, text, pos = self.take()
        if kind == "atom":
            return Var(text)
        if kind == "top":
            return Top()
        if kind == "bot":
            if not self.modal:
                raise ParseError("falsum outside the modal language", pos)
            return Bot()
        if kind == "lp":
            inner = self.iff()
            kind2, _, pos2 = self.take()
            if kind2 != "rp":
                raise ParseError("expected closing parenthesis", pos2)
            return inner
        raise ParseError("expected a formula", pos)


def parse(text: str, language: str = "prop") -> Formula:
    """Parse surface syntax into a formula.

    ``language`` is "prop" or "modal". Biconditionals are expanded into
    conjoined implications; in the modal language ~x becomes x -> F.
    """
    if language not in ("prop", "modal"):
        raise ValueError(f"unknown language: {language!r}")
    parser = _Parser(_tokenize(text), modal=language == "modal")
    formula = parser.iff()
    if parser.peek() != "end":
        raise parser.fail("trailing input")
    return formula


# --------------------------------------------------------------------------
# structural helpers


def subformula_closure(formula: Formula) -> frozenset[Formula]:
    """All subformulas of the formula, itself included."""
    return frozenset(_walk(formula))


def variables(formula: Formula) -> tuple[str, ...]:
    """Variable names occurring in the formula, sorted."""
    return tuple(sorted({f.name for f in _walk(formula) if isinstance(f, Var)}))


def depth(formula: Formula) -> int:
    """Connective nesting depth; atoms and constants have depth 0."""
    kids = _children(formula)
    if not kids:
        return 0
    return 1 + max(depth(k) for k in kids)


def substitute(formula: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Replace every variable that the mapping covers, simultaneously."""
    if isinstance(formula, Var):
        return mapping.get(formula.name, formula)
    if isinstance(formula, _BINARY):
        return formula.__class__(
            substitute(formula.left, mapping), substitute(formula.right, mapping)
        )
    if isinstance(formula, _UNARY):
        return formula.__class__(substitute(formula.sub, mapping))
    return formula


def _match(scheme: Formula, formula: Formula, env: dict[str, Formula]) -> bool:
    if isinstance(scheme, Var):
        bound = env.get(scheme.name)
        if bound is None:
            env[scheme.name] = formula
            return True
        return bound == formula
    if scheme.__class__ is not formula.__class__:
        return False
    if isinstance(scheme, _UNARY):
        return _match(scheme.sub, formula.sub, env)
    if isinstance(scheme, _BINARY):
        return _match(scheme.left, formula.left, env) and _match(
            scheme.right, formula.right, env
        )
    return True


def is_instance_of(formula: Formula, scheme: Formula) -> bool:
    """Whether the formula arises from the scheme by substituting for
    the scheme's variables."""
    return _match(scheme, formula, {})


def godel_translate(formula: Formula) -> Formula:
    """Box translation of a propositional formula into the modal language.

    Atoms are boxed, conjunction and disjunction pass through,
    implications are boxed, and the primitive negation becomes [n].
    """
    if isinstance(formula, Var):
        return Box(formula)
    if isinstance(formula, Top):
        return Top()
    if isinstance(formula, And):
        return And(godel_translate(formula.left), godel_translate(formula.right))
    if isinstance(formula, Or):
        return Or(godel_translate(formula.left), godel_translate(formula.right))
    if isinstance(formula, Imp):
        return Box(Imp(godel_translate(formula.left), godel_translate(formula.right)))
    if isinstance(formula, Neg):
        return BBox(godel_translate(formula.sub))
    raise ValueError(f"not a propositional formula: {show(formula)}")


# --------------------------------------------------------------------------
# the logic chain


@dataclass(frozen=True)
class Logic:
    """A named logic in the chain, identified by its defining axiom."""

    name: str
    order: int
    axiom: Formula


AXIOM_N = parse("(p <-> q) -> (~p <-> ~q)")
AXIOM_NEF = parse("(p & ~p) -> ~q")
AXIOM_COPC = parse("(p -> q) -> (~q -> ~p)")
AXIOM_MPC = parse("(p -> ~p) -> ~p")

LOGICS: dict[str, Logic] = {
    "n": Logic("n", 0, AXIOM_N),
    "nef": Logic("nef", 1, AXIOM_NEF),
    "copc": Logic("copc", 2, AXIOM_COPC),
    "mpc": Logic("mpc", 3, AXIOM_MPC),
}


def chain_axioms(logic: Logic) -> tuple[Formula, ...]:
    """Axioms of the logic and of every weaker logic in the chain."""
    return tuple(
        l.axiom
        for l in sorted(LOGICS.values(), key=lambda l: l.order)
        if l.order <= logic.order
    )


# --------------------------------------------------------------------------
# random formulas and kernel compilation


def random_formula(rng, names: Sequence[str], max_depth: int, language: str = "prop") -> Formula:
    """Draw a formula over the given variable names.

    rng is a random.Random. Leaves are variables or constants; the
    connective set follows the language.
    """
    if language not in ("prop", "modal"):
        raise ValueError(f"unknown language: {language!r}")
    modal = language == "modal"
    if max_depth <= 0 or rng.random() < 0.2:
        leaves: list[Formula] = [Var(name) for name in names]
        leaves.append(Top())
        if modal:
            leaves.append(Bot())
        return rng.choice(leaves)
    kinds = ["and", "or", "imp"] + (["box", "bbox"] if modal else ["neg"])
    kind = rng.choice(kinds)
    if kind == "neg":
        return Neg(random_formula(rng, names, max_depth - 1, language))
    if kind == "box":
        return Box(random_formula(rng, names, max_depth - 1, language))
    if kind == "bbox":
        return BBox(random_formula(rng, names, max_depth - 1, language))
    left = random_formula(rng, names, max_depth - 1, language)
    right = random_formula(rng, names, max_depth - 1, language)
    return {"and": And, "or": Or, "imp": Imp}[kind](left, right)


def compile_prop(formula: Formula, var_order: Sequence[str]) -> tuple[int, ...]:
    """Flatten a propositional formula to postfix kernel opcodes.

    Variables are numbered by their position in var_order; a variable
    outside it, or a modal node, raises ValueError.
    """
    index = {name: i for i, name in enumerate(var_order)}
    code: list[int] = []
    _emit(formula, index, code, modal=False)
    return tuple(code)


def compile_modal(formula: Formula, var_order: Sequence[str]) -> tuple[int, ...]:
    """Flatten a modal formula to postfix kernel opcodes."""
    index = {name: i for i, name in enumerate(var_order)}
    code: list[int] = []
    _emit(formula, index, code, modal=True)
    return tuple(code)


_BINOPS = {And: OP_AND, Or: OP_OR, Imp: OP_IMP}


def _emit(formula: Formula, index: Mapping[str, int], code: list[int], modal: bool) -> None:
    if isinstance(formula, Var):
        if formula.name not in index:
            raise ValueError(f"variable not in the compilation order: {formula.name}")
        code.extend((OP_VAR, index[formula.name]))
    elif isinstance(formula, Top):
        code.extend((OP_TOP, 0))
    elif isinstance(formula, Bot):
        if not modal:
            raise ValueError("falsum in a propositional compilation")
        code.extend((OP_BOT, 0))
    elif isinstance(formula, _BINARY):
        _emit(formula.left, index, code, modal)
        _emit(formula.right, index, code, modal)
        code.extend((_BINOPS[formula.__class__], 0))
    elif isinstance(formula, Neg):
        if modal:
            raise ValueError("primitive negation in a modal compilation")
        _emit(formula.sub, index, code, modal)
        code.extend((OP_NEG, 0))
    elif isinstance(formula, Box):
        if not modal:
            raise ValueError("box in a propositional compilation")
        _emit(formula.sub, index, code, modal)
        code.extend((OP_BOX, 0))
    elif isinstance(formula, BBox):
        if not modal:
            raise ValueError("second modality in a propositional compilation")
        _emit(formula.sub, index, code, modal)
        code.extend((OP_BBOX, 0))
    else:
        raise TypeError(f"not a formula: {formula!r}")
