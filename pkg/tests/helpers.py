"""Shared test utilities: independent oracles and random generators.

The oracles here deliberately avoid the library's bitmask fixed points
and SAT machinery.  Satisfaction sets are recomputed with plain Python
sets and while loops, bounded until/globally semantics by explicit path
enumeration, and sample consistency by brute-force formula enumeration.
Agreement between these and the fast implementations is what the tests
certify.
"""

from __future__ import annotations

import itertools
import random
from pathlib import Path
from typing import Iterable, Sequence

from ctlinfer import ctl, kripke
from ctlinfer.ctl import (And, Const, CtlFormula, ExistsFinally,
                          ExistsGlobally, ExistsNext, ExistsUntil,
                          ForallFinally, ForallGlobally, ForallNext,
                          ForallUntil, Implies, Not, Or, Prop)
from ctlinfer.kripke import KripkeStructure

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> KripkeStructure:
    return kripke.parse_kripke((FIXTURES / name).read_text())


def fixture_names() -> list[str]:
    return sorted(p.name for p in FIXTURES.glob("*.kripke"))


# ---------------------------------------------------------------------------
# Independent model checking oracle (plain sets, full CTL)
# ---------------------------------------------------------------------------

def naive_sat(m: KripkeStructure, f: CtlFormula) -> frozenset[int]:
    """Satisfaction set by direct set iteration, no bitmasks, no ENF."""
    every = frozenset(range(m.size))
    post = m.successors

    def lfp(seed: set[int], admit) -> frozenset[int]:
        found = set(seed)
        while True:
            grown = found | {s for s in every
                             if s not in found and admit(s, found)}
            if grown == found:
                return frozenset(found)
            found = grown

    def gfp(seed: set[int], keep) -> frozenset[int]:
        kept = set(seed)
        while True:
            shrunk = {s for s in kept if keep(s, kept)}
            if shrunk == kept:
                return frozenset(kept)
            kept = shrunk

    def rec(g: CtlFormula) -> frozenset[int]:
        if isinstance(g, Prop):
            if g.name not in m.alphabet:
                raise kripke.UnknownProposition(g.name)
            return frozenset(s for s in every if g.name in m.labels[s])
        if isinstance(g, Const):
            return every if g.value else frozenset()
        if isinstance(g, Not):
            return every - rec(g.operand)
        if isinstance(g, And):
            return rec(g.left) & rec(g.right)
        if isinstance(g, Or):
            return rec(g.left) | rec(g.right)
        if isinstance(g, Implies):
            return (every - rec(g.left)) | rec(g.right)
        if isinstance(g, ExistsNext):
            target = rec(g.operand)
            return frozenset(s for s in every if post[s] & target)
        if isinstance(g, ForallNext):
            target = rec(g.operand)
            return frozenset(s for s in every if post[s] <= target)
        if isinstance(g, ExistsUntil):
            head, goal = rec(g.left), rec(g.right)
            return lfp(set(goal), lambda s, t: s in head and post[s] & t)
        if isinstance(g, ForallUntil):
            head, goal = rec(g.left), rec(g.right)
            return lfp(set(goal), lambda s, t: s in head and post[s] <= t)
        if isinstance(g, ExistsFinally):
            goal = rec(g.operand)
            return lfp(set(goal), lambda s, t: bool(post[s] & t))
        if isinstance(g, ForallFinally):
            goal = rec(g.operand)
            return lfp(set(goal), lambda s, t: post[s] <= t)
        if isinstance(g, ExistsGlobally):
            return gfp(set(rec(g.operand)), lambda s, t: post[s] & t)
        if isinstance(g, ForallGlobally):
            return gfp(set(rec(g.operand)), lambda s, t: post[s] <= t)
        raise AssertionError(f"unhandled node {g!r}")

    return rec(f)


def naive_holds(m: KripkeStructure, f: CtlFormula) -> bool:
    return m.initial <= naive_sat(m, f)


# ---------------------------------------------------------------------------
# Bounded until/globally by explicit path enumeration
# ---------------------------------------------------------------------------

def eu_prefix(m: KripkeStructure, phi: frozenset[int], psi: frozenset[int],
              k: int) -> frozenset[int]:
    """States with a path s_0 .. s_t, t <= k - 1, into psi through phi."""

    def reaches(s: int, depth: int) -> bool:
        if s in psi:
            return True
        if depth == 0 or s not in phi:
            return False
        return any(reaches(t, depth - 1) for t in m.successors[s])

    return frozenset(s for s in range(m.size) if reaches(s, k - 1))


def eg_prefix(m: KripkeStructure, phi: frozenset[int],
              k: int) -> frozenset[int]:
    """States with a path prefix of k states that stays inside phi."""

    def survives(s: int, depth: int) -> bool:
        if s not in phi:
            return False
        if depth == 1:
            return True
        return any(survives(t, depth - 1) for t in m.successors[s])

    return frozenset(s for s in range(m.size) if survives(s, k))


# ---------------------------------------------------------------------------
# Random and exhaustive structure generation
# ---------------------------------------------------------------------------

def random_kripke(rng: random.Random, max_states: int = 4,
                  alphabet: Sequence[str] = ("p", "q"),
                  min_states: int = 1) -> KripkeStructure:
    n = rng.randint(min_states, max_states)
    states = list(range(n))
    labels = tuple(frozenset(p for p in alphabet if rng.random() < 0.5)
                   for _ in states)
    successors = tuple(
        frozenset(rng.sample(states, rng.randint(1, n))) for _ in states)
    k = rng.randint(1, n)
    initial = frozenset(rng.sample(states, k))
    return KripkeStructure(
        alphabet=tuple(alphabet),
        state_names=tuple(f"s{i}" for i in states),
        initial=initial, labels=labels, successors=successors)


def all_structures(num_states: int,
                   alphabet: Sequence[str]) -> Iterable[KripkeStructure]:
    """Every structure with exactly `num_states` states, up to naming."""
    states = list(range(num_states))
    names = tuple(f"s{i}" for i in states)
    label_choices = [frozenset(sub) for size in range(len(alphabet) + 1)
                     for sub in itertools.combinations(alphabet, size)]
    succ_choices = [frozenset(sub) for size in range(1, num_states + 1)
                    for sub in itertools.combinations(states, size)]
    init_choices = succ_choices
    for labels in itertools.product(label_choices, repeat=num_states):
        for succs in itertools.product(succ_choices, repeat=num_states):
            for init in init_choices:
                yield KripkeStructure(
                    alphabet=tuple(alphabet), state_names=names,
                    initial=init, labels=labels, successors=succs)


# ---------------------------------------------------------------------------
# Random formulas
# ---------------------------------------------------------------------------

_UNARY = (Not, ExistsNext, ExistsGlobally, ExistsFinally,
          ForallNext, ForallGlobally, ForallFinally)
_BINARY = (And, Or, Implies, ExistsUntil, ForallUntil)


def random_ctl(rng: random.Random, alphabet: Sequence[str],
               depth: int = 3) -> CtlFormula:
    """Random formula over the full surface grammar, sugar included."""
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if roll < 0.1:
            return ctl.TRUE if rng.random() < 0.5 else ctl.FALSE
        return Prop(rng.choice(list(alphabet)))
    if rng.random() < 0.5:
        return rng.choice(_UNARY)(random_ctl(rng, alphabet, depth - 1))
    ctor = rng.choice(_BINARY)
    return ctor(random_ctl(rng, alphabet, depth - 1),
                random_ctl(rng, alphabet, depth - 1))


def random_enf(rng: random.Random, alphabet: Sequence[str],
               max_size: int) -> CtlFormula:
    """Uniform pick from the enumerated ENF fragment (exact size bound)."""
    return rng.choice(ctl.enumerate_formulas(alphabet, max_size))


# ---------------------------------------------------------------------------
# Brute-force learning oracle
# ---------------------------------------------------------------------------

def consistent_by_oracle(f: CtlFormula,
                         positives: Sequence[KripkeStructure],
                         negatives: Sequence[KripkeStructure]) -> bool:
    return (all(naive_holds(m, f) for m in positives)
            and not any(naive_holds(m, f) for m in negatives))


def brute_force_minimum(positives: Sequence[KripkeStructure],
                        negatives: Sequence[KripkeStructure],
                        max_size: int) -> tuple[int, CtlFormula] | None:
    """Smallest consistent ENF formula by exhaustive enumeration."""
    alphabet = positives[0].alphabet if positives else negatives[0].alphabet
    for f in ctl.enumerate_formulas(alphabet, max_size):
        if consistent_by_oracle(f, positives, negatives):
            return ctl.size(f), f
    return None
