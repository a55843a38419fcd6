"""Kripke structures and their line-oriented text format.

A structure is a finite set of states with a total transition relation,
a non-empty set of initial states, and a labeling of states with atomic
propositions.  States and propositions are identifier strings; internally
states are indices into `state_names`.

The text format is fixed-order and canonical when printed:

    kripke
    props: p q
    states: s0 s1
    init: s0
    labels: s0: p q ; s1:
    trans: s0 -> s1 ; s1 -> s0 s1

`#` starts a comment, blank lines are ignored, `;` separates per-state
entries, and every parse runs through `validate`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .ctl import RESERVED_WORDS

__all__ = [
    "KripkeStructure", "KripkeError", "ParseError", "NonTotalTransition",
    "UnknownState", "UnknownProposition", "EmptyInitial", "InvalidStructure",
    "validate", "parse_kripke", "print_kripke", "inline_kripke", "isomorphic",
]

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class KripkeError(ValueError):
    """Base class for structure-level errors."""


class ParseError(KripkeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class NonTotalTransition(KripkeError):
    def __init__(self, state: str):
        super().__init__(f"state {state!r} has no outgoing transition")
        self.state = state


class UnknownState(KripkeError):
    def __init__(self, state: str):
        super().__init__(f"unknown state {state!r}")
        self.state = state


class UnknownProposition(KripkeError):
    def __init__(self, prop: str):
        super().__init__(f"unknown proposition {prop!r}")
        self.prop = prop


class EmptyInitial(KripkeError):
    def __init__(self) -> None:
        super().__init__("no initial state")


class InvalidStructure(KripkeError):
    """Malformed structure description (duplicates, bad identifiers)."""


@dataclass(frozen=True)
class KripkeStructure:
    """A validated Kripke structure.

    `successors[s]` is the post set of state index s, `labels[s]` the set
    of proposition names holding there.  The constructor re-checks the
    invariants, so instances are total and well-formed by construction.
    """

    alphabet: tuple[str, ...]
    state_names: tuple[str, ...]
    initial: frozenset[int]
    labels: tuple[frozenset[str], ...]
    successors: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = len(self.state_names)
        if n == 0:
            raise InvalidStructure("a structure needs at least one state")
        if len(set(self.state_names)) != n:
            raise InvalidStructure("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidStructure("duplicate propositions")
        for name in self.alphabet:
            _check_prop_name(name)
        for name in self.state_names:
            if not _IDENT_RE.match(name):
                raise InvalidStructure(f"invalid state name {name!r}")
        if len(self.labels) != n or len(self.successors) != n:
            raise InvalidStructure("labels/successors must cover every state")
        if not self.initial:
            raise EmptyInitial()
        for s in self.initial:
            if not 0 <= s < n:
                raise UnknownState(str(s))
        props = set(self.alphabet)
        for s, label in enumerate(self.labels):
            for p in label:
                if p not in props:
                    raise UnknownProposition(p)
        for s, post in enumerate(self.successors):
            if not post:
                raise NonTotalTransition(self.state_names[s])
            for t in post:
                if not 0 <= t < n:
                    raise UnknownState(str(t))

    @property
    def size(self) -> int:
        return len(self.state_names)

    def post(self, s: int) -> frozenset[int]:
        return self.successors[s]

    def index(self, name: str) -> int:
        try:
            return self.state_names.index(name)
        except ValueError:
            raise UnknownState(name) from None


def _check_prop_name(name: str) -> None:
    if not _IDENT_RE.match(name):
        raise InvalidStructure(f"invalid proposition name {name!r}")
    if name in RESERVED_WORDS:
        raise InvalidStructure(
            f"proposition name {name!r} is reserved by the formula syntax")


def validate(*, props: Sequence[str], states: Sequence[str],
             init: Iterable[str], labels: Mapping[str, Iterable[str]],
             trans: Mapping[str, Iterable[str]]) -> KripkeStructure:
    """Check a raw name-based description and build the structure.

    States missing from `labels` get the empty label set; states missing
    from `trans` fail the totality check.
    """
    if len(set(states)) != len(states):
        raise InvalidStructure("duplicate state names")
    if len(set(props)) != len(props):
        raise InvalidStructure("duplicate propositions")
    index = {name: i for i, name in enumerate(states)}
    prop_set = set(props)

    def state_index(name: str) -> int:
        if name not in index:
            raise UnknownState(name)
        return index[name]

    initial = frozenset(state_index(name) for name in init)
    if not initial:
        raise EmptyInitial()

    label_list: list[frozenset[str]] = [frozenset()] * len(states)
    for name, entry in labels.items():
        ps = tuple(entry)
        for p in ps:
            if p not in prop_set:
                raise UnknownProposition(p)
        label_list[state_index(name)] = frozenset(ps)

    succ_list: list[frozenset[int]] = [frozenset()] * len(states)
    for name, entry in trans.items():
        succ_list[state_index(name)] = frozenset(
            state_index(t) for t in entry)
    for s, post in enumerate(succ_list):
        if not post:
            raise NonTotalTransition(states[s])

    return KripkeStructure(
        alphabet=tuple(props),
        state_names=tuple(states),
        initial=initial,
        labels=tuple(label_list),
        successors=tuple(succ_list),
    )


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1)
            for m in re.finditer(r"\S+", line)]


def parse_kripke(text: str) -> KripkeStructure:
    """Parse the text format; the result is validated."""
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(raw)
        if stripped.strip():
            lines.append((lineno, stripped))

    def need(pos: int, expectation: str) -> tuple[int, str]:
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise ParseError(f"expected {expectation}", last + 1, 1)
        return lines[pos]

    lineno, header = need(0, "'kripke' header")
    if header.strip() != "kripke":
        raise ParseError("expected 'kripke' header", lineno,
                         _tokens(header)[0][1])

    def section(pos: int, keyword: str) -> tuple[int, str, list[tuple[str, int]]]:
        lineno, line = need(pos, f"'{keyword}:' section")
        toks = _tokens(line)
        if not toks or toks[0][0] != f"{keyword}:":
            got, col = toks[0] if toks else ("", 1)
            raise ParseError(f"expected '{keyword}:' section, found {got!r}",
                             lineno, col)
        return lineno, line, toks[1:]

    _, _, prop_toks = section(1, "props")
    props = [t for t, _ in prop_toks]
    _, _, state_toks = section(2, "states")
    states = [t for t, _ in state_toks]
    lineno_init, _, init_toks = section(3, "init")
    init = [t for t, _ in init_toks]

    def entries(lineno: int, toks: list[tuple[str, int]],
                keyword: str) -> dict[str, list[str]]:
        # Split on ';' then read each entry's own shape.
        groups: list[list[tuple[str, int]]] = [[]]
        for tok, col in toks:
            if tok == ";":
                groups.append([])
            else:
                groups[-1].append((tok, col))
        table: dict[str, list[str]] = {}
        for group in groups:
            if not group:
                continue
            (head, col) = group[0]
            if keyword == "labels":
                if not head.endswith(":") or len(head) < 2:
                    raise ParseError(
                        "expected a state name followed by ':'", lineno, col)
                name = head[:-1]
                rest = [t for t, _ in group[1:]]
            else:
                name = head
                if len(group) < 2 or group[1][0] != "->":
                    raise ParseError(
                        "expected '->' after source state", lineno,
                        group[1][1] if len(group) > 1 else col + len(head))
                rest = [t for t, _ in group[2:]]
            if name in table:
                raise ParseError(f"duplicate entry for state {name!r}",
                                 lineno, col)
            table[name] = rest
        return table

    lineno_lab, _, label_toks = section(4, "labels")
    labels = entries(lineno_lab, label_toks, "labels")
    lineno_tr, _, trans_toks = section(5, "trans")
    trans = entries(lineno_tr, trans_toks, "trans")

    if len(lines) > 6:
        lineno, line = lines[6]
        raise ParseError("unexpected content after 'trans:' section",
                         lineno, _tokens(line)[0][1])

    if not init:
        raise ParseError("empty 'init:' section", lineno_init, 1)
    return validate(props=props, states=states, init=init,
                    labels=labels, trans=trans)


def print_kripke(m: KripkeStructure) -> str:
    """Canonical rendering: declaration order, index-sorted sets."""
    prop_order = {p: i for i, p in enumerate(m.alphabet)}
    label_entries = []
    trans_entries = []
    for s, name in enumerate(m.state_names):
        ps = sorted(m.labels[s], key=prop_order.__getitem__)
        label_entries.append(f"{name}:" + ("" if not ps else " " + " ".join(ps)))
        succ = " ".join(m.state_names[t] for t in sorted(m.successors[s]))
        trans_entries.append(f"{name} -> {succ}")
    init = " ".join(m.state_names[s] for s in sorted(m.initial))
    lines = [
        "kripke",
        "props: " + " ".join(m.alphabet) if m.alphabet else "props:",
        "states: " + " ".join(m.state_names),
        "init: " + init,
        "labels: " + " ; ".join(label_entries),
        "trans: " + " ; ".join(trans_entries),
    ]
    return "\n".join(lines) + "\n"


def inline_kripke(m: KripkeStructure) -> str:
    """One-line rendering for trace output."""
    return " / ".join(print_kripke(m).rstrip("\n").splitlines())


# ---------------------------------------------------------------------------
# Isomorphism on small structures
# ---------------------------------------------------------------------------

def isomorphic(a: KripkeStructure, b: KripkeStructure) -> bool:
    """Structure isomorphism by exhaustive permutation search.

    Intended for small inputs (the learner checks samples of up to eight
    states); labels must match by proposition name.
    """
    if a.size != b.size:
        return False
    if set(a.alphabet) != set(b.alphabet):
        return False
    if len(a.initial) != len(b.initial):
        return False
    sig_a = sorted((tuple(sorted(a.labels[s])), s in a.initial,
                    len(a.successors[s])) for s in range(a.size))
    sig_b = sorted((tuple(sorted(b.labels[s])), s in b.initial,
                    len(b.successors[s])) for s in range(b.size))
    if sig_a != sig_b:
        return False
    states = range(a.size)
    for perm in itertools.permutations(states):
        if any(a.labels[s] != b.labels[perm[s]] for s in states):
            continue
        if {perm[s] for s in a.initial} != set(b.initial):
            continue
        if all({perm[t] for t in a.successors[s]} == set(b.successors[perm[s]])
               for s in states):
            return True
    return False
