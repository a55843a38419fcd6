"""Computation tree logic: formulas, concrete syntax, and syntax DAGs.

Formulas are immutable trees built from propositions, Boolean connectives
and the temporal operators EX/EG/EU plus the usual derived forms (EF, AX,
AG, AF, AU, implication, constants).  The learner and synthesizer work on
the existential normal form (ENF) fragment: propositions, negation,
conjunction, disjunction, EX, EU and EG.  `enf` rewrites any formula into
that fragment; `to_dag` turns an ENF formula into its canonical syntax DAG
in which identical subterms share one node.

Formula size is the number of *distinct* subformulas, i.e. the node count
of the syntax DAG, not the node count of the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "CtlFormula", "Prop", "Const", "TRUE", "FALSE", "Not", "And", "Or",
    "Implies", "ExistsNext", "ExistsUntil", "ExistsGlobally",
    "ExistsFinally", "ForallNext", "ForallUntil", "ForallGlobally",
    "ForallFinally", "CtlError", "ParseError", "NotInEnf",
    "RESERVED_WORDS", "parse_ctl", "print_ctl", "enf", "is_enf",
    "subformulas", "size", "propositions", "evaluate_constant",
    "syntactically_equal", "DagNode", "SyntaxDag", "to_dag",
    "enumerate_formulas",
]

# Words the formula lexer claims for itself; they cannot name propositions.
RESERVED_WORDS = frozenset(
    {"true", "false", "E", "A", "U", "EX", "EG", "EF", "AX", "AG", "AF"}
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class CtlError(ValueError):
    """Base class for formula-level errors."""


class ParseError(CtlError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at column {position})")
        self.position = position


class NotInEnf(CtlError):
    """Raised when an operation requires an ENF formula but got sugar."""


class CtlFormula:
    """Base class for formula nodes.  Subclasses are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_ctl(self)


@dataclass(frozen=True, slots=True)
class Prop(CtlFormula):
    name: str

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise CtlError(f"invalid proposition name {self.name!r}")
        if self.name in RESERVED_WORDS:
            raise CtlError(f"proposition name {self.name!r} is a reserved word")


@dataclass(frozen=True, slots=True)
class Const(CtlFormula):
    value: bool


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True, slots=True)
class Not(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class And(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True, slots=True)
class Or(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True, slots=True)
class Implies(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True, slots=True)
class ExistsNext(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class ExistsUntil(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True, slots=True)
class ExistsGlobally(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class ExistsFinally(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class ForallNext(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class ForallUntil(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True, slots=True)
class ForallGlobally(CtlFormula):
    operand: CtlFormula


@dataclass(frozen=True, slots=True)
class ForallFinally(CtlFormula):
    operand: CtlFormula


_UNARY = (Not, ExistsNext, ExistsGlobally, ExistsFinally,
          ForallNext, ForallGlobally, ForallFinally)
_BINARY = (And, Or, Implies, ExistsUntil, ForallUntil)

# ENF fragment: propositions plus these connectives.
_ENF_OPS = (Not, And, Or, ExistsNext, ExistsUntil, ExistsGlobally)


def children(f: CtlFormula) -> tuple[CtlFormula, ...]:
    if isinstance(f, _UNARY):
        return (f.operand,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    return ()


def is_enf(f: CtlFormula, allow_constants: bool = False) -> bool:
    """True iff `f` uses only ENF connectives over propositions."""
    if isinstance(f, Prop):
        return True
    if isinstance(f, Const):
        return allow_constants
    if isinstance(f, _ENF_OPS):
        return all(is_enf(g, allow_constants) for g in children(f))
    return False


def subformulas(f: CtlFormula) -> frozenset[CtlFormula]:
    """All distinct subformulas of `f`, including `f` itself."""
    seen: set[CtlFormula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.extend(children(g))
    return frozenset(seen)


def size(f: CtlFormula) -> int:
    """Formula size: the number of distinct subformulas (DAG node count)."""
    return len(subformulas(f))


def propositions(f: CtlFormula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, Prop))


def syntactically_equal(f: CtlFormula, g: CtlFormula) -> bool:
    """Structural identity of two formulas.

    Two formulas are syntactically equal exactly when their canonical
    syntax DAGs coincide up to node renumbering, which for immutable trees
    is plain structural equality; `p & q` and `q & p` are different.
    """
    return f == g


def evaluate_constant(f: CtlFormula) -> bool:
    """Truth value of a proposition-free formula.

    Over total transition relations every formula built from constants
    alone has a fixed truth value on every structure: EX c = EG c = c and
    both until forms reduce to their second argument.
    """
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Prop):
        raise CtlError(f"formula contains proposition {f.name!r}")
    if isinstance(f, Not):
        return not evaluate_constant(f.operand)
    if isinstance(f, And):
        return evaluate_constant(f.left) and evaluate_constant(f.right)
    if isinstance(f, Or):
        return evaluate_constant(f.left) or evaluate_constant(f.right)
    if isinstance(f, Implies):
        return (not evaluate_constant(f.left)) or evaluate_constant(f.right)
    if isinstance(f, (ExistsNext, ExistsGlobally, ExistsFinally,
                      ForallNext, ForallGlobally, ForallFinally)):
        return evaluate_constant(f.operand)
    if isinstance(f, (ExistsUntil, ForallUntil)):
        return evaluate_constant(f.right)
    raise CtlError(f"unknown formula node {f!r}")


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------
#
#   formula := or ('->' formula)?            right associative
#   or      := and ('|' and)*                left associative
#   and     := unary ('&' unary)*            left associative
#   unary   := ('!' | EX | EG | EF | AX | AG | AF) unary
#            | 'E' '[' formula 'U' formula ']'
#            | 'A' '[' formula 'U' formula ']'
#            | atom
#   atom    := 'true' | 'false' | name | '(' formula ')'

_TOKEN_RE = re.compile(r"->|[!&|()\[\]]|[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", pos + 1)
        tokens.append((m.group(), pos + 1))
        pos = m.end()
    tokens.append(("", len(text) + 1))  # end marker
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.idx = 0

    def peek(self) -> str:
        return self.tokens[self.idx][0]

    def pos(self) -> int:
        return self.tokens[self.idx][1]

    def take(self) -> str:
        tok = self.tokens[self.idx][0]
        self.idx += 1
        return tok

    def expect(self, tok: str, what: str) -> None:
        if self.peek() != tok:
            got = self.peek() or "end of input"
            raise ParseError(f"expected {what}, found {got!r}", self.pos())
        self.take()

    def formula(self) -> CtlFormula:
        left = self.or_expr()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def or_expr(self) -> CtlFormula:
        f = self.and_expr()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> CtlFormula:
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> CtlFormula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        prefix = {"EX": ExistsNext, "EG": ExistsGlobally, "EF": ExistsFinally,
                  "AX": ForallNext, "AG": ForallGlobally, "AF": ForallFinally}
        if tok in prefix:
            self.take()
            return prefix[tok](self.unary())
        if tok in ("E", "A"):
            self.take()
            self.expect("[", "'[' after path quantifier")
            left = self.formula()
            self.expect("U", "'U' inside until")
            right = self.formula()
            self.expect("]", "']' closing until")
            return (ExistsUntil if tok == "E" else ForallUntil)(left, right)
        return self.atom()

    def atom(self) -> CtlFormula:
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            self.expect(")", "closing parenthesis")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok and _IDENT_RE.match(tok) and tok not in RESERVED_WORDS:
            self.take()
            return Prop(tok)
        got = tok or "end of input"
        raise ParseError(f"expected a formula, found {got!r}", self.pos())


def parse_ctl(text: str) -> CtlFormula:
    parser = _Parser(text)
    f = parser.formula()
    if parser.peek() != "":
        raise ParseError(f"unexpected trailing input {parser.peek()!r}",
                         parser.pos())
    return f


# Precedence levels used by the printer; higher binds tighter.
_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5

_UNARY_SYMBOL = {
    Not: "!", ExistsNext: "EX ", ExistsGlobally: "EG ", ExistsFinally: "EF ",
    ForallNext: "AX ", ForallGlobally: "AG ", ForallFinally: "AF ",
}


def _fmt(f: CtlFormula, min_prec: int) -> str:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, (ExistsUntil, ForallUntil)):
        q = "E" if isinstance(f, ExistsUntil) else "A"
        return f"{q}[{_fmt(f.left, 0)} U {_fmt(f.right, 0)}]"
    if isinstance(f, _UNARY):
        text = _UNARY_SYMBOL[type(f)] + _fmt(f.operand, _PREC_UNARY)
        prec = _PREC_UNARY
    elif isinstance(f, And):
        text = f"{_fmt(f.left, _PREC_AND)} & {_fmt(f.right, _PREC_AND + 1)}"
        prec = _PREC_AND
    elif isinstance(f, Or):
        text = f"{_fmt(f.left, _PREC_OR)} | {_fmt(f.right, _PREC_OR + 1)}"
        prec = _PREC_OR
    elif isinstance(f, Implies):
        text = f"{_fmt(f.left, _PREC_IMPLIES + 1)} -> {_fmt(f.right, _PREC_IMPLIES)}"
        prec = _PREC_IMPLIES
    else:
        raise CtlError(f"unknown formula node {f!r}")
    if prec < min_prec:
        return f"({text})"
    return text


def print_ctl(f: CtlFormula) -> str:
    """Render with minimal parentheses; `parse_ctl` inverts it exactly."""
    return _fmt(f, 0)


# ---------------------------------------------------------------------------
# Existential normal form
# ---------------------------------------------------------------------------

def _true_formula(alphabet: Sequence[str] | None) -> CtlFormula:
    # With a known alphabet the constant becomes p | !p over its first
    # proposition; otherwise it stays a constant the checker evaluates.
    if alphabet:
        p = Prop(alphabet[0])
        return Or(p, Not(p))
    return TRUE


def enf(f: CtlFormula, alphabet: Sequence[str] | None = None) -> CtlFormula:
    """Rewrite into the existential fragment {!, &, |, EX, EU, EG}.

    Universal operators are eliminated by the standard dualities; EF f
    becomes E[true U f].  ENF formulas are returned unchanged, so `enf` is
    idempotent.
    """
    if isinstance(f, Prop):
        return f
    if isinstance(f, Const):
        if alphabet:
            p = Prop(alphabet[0])
            return Or(p, Not(p)) if f.value else And(p, Not(p))
        return f
    if isinstance(f, Not):
        return Not(enf(f.operand, alphabet))
    if isinstance(f, And):
        return And(enf(f.left, alphabet), enf(f.right, alphabet))
    if isinstance(f, Or):
        return Or(enf(f.left, alphabet), enf(f.right, alphabet))
    if isinstance(f, Implies):
        return Or(Not(enf(f.left, alphabet)), enf(f.right, alphabet))
    if isinstance(f, ExistsNext):
        return ExistsNext(enf(f.operand, alphabet))
    if isinstance(f, ExistsUntil):
        return ExistsUntil(enf(f.left, alphabet), enf(f.right, alphabet))
    if isinstance(f, ExistsGlobally):
        return ExistsGlobally(enf(f.operand, alphabet))
    if isinstance(f, ExistsFinally):
        return ExistsUntil(_true_formula(alphabet), enf(f.operand, alphabet))
    if isinstance(f, ForallNext):
        return Not(ExistsNext(Not(enf(f.operand, alphabet))))
    if isinstance(f, ForallGlobally):
        # AG f = !EF !f
        inner = Not(enf(f.operand, alphabet))
        return Not(ExistsUntil(_true_formula(alphabet), inner))
    if isinstance(f, ForallFinally):
        return Not(ExistsGlobally(Not(enf(f.operand, alphabet))))
    if isinstance(f, ForallUntil):
        # A[f U g] = !E[!g U (!f & !g)] & !EG !g
        lhs = enf(f.left, alphabet)
        rhs = enf(f.right, alphabet)
        not_g = Not(rhs)
        return And(Not(ExistsUntil(not_g, And(Not(lhs), not_g))),
                   Not(ExistsGlobally(not_g)))
    raise CtlError(f"unknown formula node {f!r}")


# ---------------------------------------------------------------------------
# Canonical syntax DAGs
# ---------------------------------------------------------------------------

# Operator labels as they appear on DAG nodes.
NOT_LABEL, AND_LABEL, OR_LABEL = "!", "&", "|"
EX_LABEL, EU_LABEL, EG_LABEL = "EX", "EU", "EG"
OPERATOR_LABELS = (NOT_LABEL, AND_LABEL, OR_LABEL, EX_LABEL, EU_LABEL, EG_LABEL)
UNARY_LABELS = frozenset({NOT_LABEL, EX_LABEL, EG_LABEL})
BINARY_LABELS = frozenset({AND_LABEL, OR_LABEL, EU_LABEL})

_NODE_LABEL = {Not: NOT_LABEL, And: AND_LABEL, Or: OR_LABEL,
               ExistsNext: EX_LABEL, ExistsUntil: EU_LABEL,
               ExistsGlobally: EG_LABEL}


@dataclass(frozen=True, slots=True)
class DagNode:
    """One shared subterm: a proposition name or an operator label."""
    label: str
    left: int | None = None
    right: int | None = None


@dataclass(frozen=True)
class SyntaxDag:
    """Canonical DAG of an ENF formula.

    Nodes are numbered 1..size with children strictly smaller than their
    parents and node 1 a proposition; `nodes[i - 1]` holds node i and the
    root is the last node.
    """

    nodes: tuple[DagNode, ...]

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> int:
        return len(self.nodes)

    def node(self, i: int) -> DagNode:
        return self.nodes[i - 1]

    def __iter__(self) -> Iterator[tuple[int, DagNode]]:
        return ((i + 1, n) for i, n in enumerate(self.nodes))

    def to_formula(self) -> CtlFormula:
        built: dict[int, CtlFormula] = {}
        for i, node in self:
            if node.left is None:
                built[i] = Prop(node.label)
            elif node.right is None:
                ctor = {NOT_LABEL: Not, EX_LABEL: ExistsNext,
                        EG_LABEL: ExistsGlobally}[node.label]
                built[i] = ctor(built[node.left])
            else:
                ctor = {AND_LABEL: And, OR_LABEL: Or,
                        EU_LABEL: ExistsUntil}[node.label]
                built[i] = ctor(built[node.left], built[node.right])
        return built[self.root]


def to_dag(f: CtlFormula) -> SyntaxDag:
    """Canonical syntax DAG of an ENF formula.

    Numbering is a left-first post-order traversal with structural
    sharing, so every child precedes its parent and the first node is the
    leftmost proposition leaf.
    """
    if not is_enf(f):
        raise NotInEnf(f"not in existential normal form: {print_ctl(f)}")
    index: dict[CtlFormula, int] = {}
    nodes: list[DagNode] = []

    def visit(g: CtlFormula) -> int:
        got = index.get(g)
        if got is not None:
            return got
        if isinstance(g, Prop):
            nodes.append(DagNode(g.name))
        else:
            kids = children(g)
            left = visit(kids[0])
            right = visit(kids[1]) if len(kids) == 2 else None
            nodes.append(DagNode(_NODE_LABEL[type(g)], left, right))
        index[g] = len(nodes)
        return index[g]

    visit(f)
    return SyntaxDag(tuple(nodes))


# ---------------------------------------------------------------------------
# Bounded enumeration of the ENF fragment
# ---------------------------------------------------------------------------

def enumerate_formulas(alphabet: Sequence[str],
                       max_size: int) -> list[CtlFormula]:
    """All ENF formulas over `alphabet` with size up to `max_size`.

    Returned in non-decreasing size order with every child preceding its
    parents.  Size is DAG size, so `And(f, g)` weighs |sub(f) u sub(g)| + 1
    and the counts grow quickly; intended for small bounds only.
    """
    if max_size < 1:
        return []
    subs: dict[CtlFormula, frozenset[CtlFormula]] = {}
    ordered: list[CtlFormula] = []
    by_size: dict[int, list[CtlFormula]] = {k: [] for k in range(1, max_size + 1)}

    def admit(f: CtlFormula, sub: frozenset[CtlFormula]) -> None:
        if f not in subs:
            subs[f] = sub
            ordered.append(f)
            by_size[len(sub)].append(f)

    for name in alphabet:
        p = Prop(name)
        admit(p, frozenset([p]))

    for target in range(2, max_size + 1):
        for f in list(by_size[target - 1]):
            base = subs[f]
            for ctor in (Not, ExistsNext, ExistsGlobally):
                g = ctor(f)
                admit(g, base | {g})
        smaller = [f for k in range(1, target) for f in by_size[k]]
        for f in smaller:
            for g in smaller:
                union = subs[f] | subs[g]
                if len(union) != target - 1:
                    continue
                for ctor in (And, Or, ExistsUntil):
                    h = ctor(f, g)
                    admit(h, union | {h})
    return ordered
