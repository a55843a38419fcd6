"""Bounded synthesis of Kripke structures satisfying a CTL formula.

The dual of formula search: the formula is fixed (as its ENF syntax DAG)
and the structure is unknown.  For each state count m' = 1..max_states a
CNF instance over free transition and labeling variables is solved:

* `t(s, s')` and `lab(s, p)` describe the candidate structure, with a
  totality clause per state and a single fixed initial state s0;
* `h(i, s)` evaluates DAG node i in state s; successor disjunctions range
  over all states, each conjunct `t(s, s') & ...` introduced as a shared
  Tseitin product variable (full equivalence, numbered above the
  semantic variables);
* EU/EG fixed points unroll into step variables over k = 1..m'+1.

Every synthesized structure is verified with the explicit-state checker
before being returned; a verification failure is a hard internal error
(`SynthesisInconsistency`), never a silent wrong answer.  A None result
means "no model within the state budget" and is reported as such; it is
not a proof that no larger model exists.

`implies` and `equivalent` reduce bounded implication checking to
synthesis of countermodels for f & !g.
"""

from __future__ import annotations

from typing import Sequence

from . import checker, ctl
from .ctl import And, CtlFormula, Not
from .encoder import VarPool
from .kripke import KripkeStructure
from .sat import (CdclSolver, Clause, equiv_and, equiv_and_disj, equiv_lit,
                  equiv_not, equiv_or, equiv_or_and_disj)

__all__ = ["SynthesisInconsistency", "synthesize", "implies", "equivalent"]

DEFAULT_MAX_STATES = 6


class SynthesisInconsistency(RuntimeError):
    """A synthesized structure failed checker verification (internal bug)."""


def _trivial_structure() -> KripkeStructure:
    return KripkeStructure(
        alphabet=(), state_names=("s0",), initial=frozenset({0}),
        labels=(frozenset(),), successors=(frozenset({0}),))


def _decode_structure(assignment: dict[int, bool], pool: VarPool,
                      num_states: int,
                      alphabet: Sequence[str]) -> KripkeStructure:
    names = tuple(f"s{s}" for s in range(num_states))
    labels = tuple(
        frozenset(p for p in alphabet if assignment[pool.get("lab", s, p)])
        for s in range(num_states))
    successors = tuple(
        frozenset(t for t in range(num_states)
                  if assignment[pool.get("t", s, t)])
        for s in range(num_states))
    return KripkeStructure(alphabet=tuple(alphabet), state_names=names,
                           initial=frozenset({0}), labels=labels,
                           successors=successors)


def _encode(dag: ctl.SyntaxDag, num_states: int, alphabet: Sequence[str],
            ) -> tuple[VarPool, list[Clause]]:
    pool = VarPool()
    states = range(num_states)
    for s in states:
        for t in states:
            pool.var("t", s, t)
    for s in states:
        for p in alphabet:
            pool.var("lab", s, p)
    for i, _ in dag:
        for s in states:
            pool.var("h", i, s)
    for i, node in dag:
        if node.label in (ctl.EU_LABEL, ctl.EG_LABEL):
            for s in states:
                for k in range(1, num_states + 2):
                    pool.var("st", i, s, k)

    clauses: list[Clause] = []
    for s in states:
        clauses.append(tuple(pool.get("t", s, t) for t in states))

    products: dict[tuple[int, int], int] = {}

    def product(a: int, b: int) -> int:
        key = (a, b) if a <= b else (b, a)
        got = products.get(key)
        if got is None:
            got = pool.fresh()
            clauses.extend(equiv_and(got, [a, b]))
            products[key] = got
        return got

    def reach(i: int, s: int, k: int) -> list[int]:
        # t(s, s') & st(i, s', k), one shared product per pair
        return [product(pool.get("t", s, t), pool.get("st", i, t, k))
                for t in states]

    for i, node in dag:
        h = lambda s, i=i: pool.get("h", i, s)
        if node.left is None:
            for s in states:
                clauses.extend(equiv_lit(h(s), pool.get("lab", s, node.label)))
            continue
        hl = lambda s, j=node.left: pool.get("h", j, s)
        if node.label == ctl.NOT_LABEL:
            for s in states:
                clauses.extend(equiv_not(h(s), hl(s)))
        elif node.label == ctl.EX_LABEL:
            for s in states:
                clauses.extend(equiv_or(h(s), [
                    product(pool.get("t", s, t), hl(t)) for t in states]))
        elif node.label == ctl.EG_LABEL:
            st = lambda s, k, i=i: pool.get("st", i, s, k)
            for s in states:
                clauses.extend(equiv_lit(st(s, 1), hl(s)))
                for k in range(1, num_states + 1):
                    clauses.extend(equiv_and_disj(
                        st(s, k + 1), hl(s), reach(i, s, k)))
                clauses.extend(equiv_lit(h(s), st(s, num_states + 1)))
        else:
            hr = lambda s, j=node.right: pool.get("h", j, s)
            if node.label == ctl.AND_LABEL:
                for s in states:
                    clauses.extend(equiv_and(h(s), [hl(s), hr(s)]))
            elif node.label == ctl.OR_LABEL:
                for s in states:
                    clauses.extend(equiv_or(h(s), [hl(s), hr(s)]))
            else:  # EU
                st = lambda s, k, i=i: pool.get("st", i, s, k)
                for s in states:
                    clauses.extend(equiv_lit(st(s, 1), hr(s)))
                    for k in range(1, num_states + 1):
                        clauses.extend(equiv_or_and_disj(
                            st(s, k + 1), st(s, k), hl(s), reach(i, s, k)))
                    clauses.extend(equiv_lit(h(s), st(s, num_states + 1)))

    clauses.append((pool.get("h", dag.root, 0),))
    return pool, clauses


def synthesize(formula: CtlFormula, max_states: int = DEFAULT_MAX_STATES,
               alphabet: Sequence[str] | None = None,
               seed: int | None = None) -> KripkeStructure | None:
    """A structure satisfying `formula` with at most `max_states` states.

    State counts are tried in increasing order, so a returned structure
    has as few states as the encoding admits.  None means no model within
    the budget, which is not a proof that none exists beyond it.
    """
    if max_states < 1:
        raise ValueError("state budget must be at least 1")
    props = sorted(ctl.propositions(formula))
    if alphabet is None:
        alphabet = tuple(props)
    else:
        alphabet = tuple(alphabet)
        missing = set(props) - set(alphabet)
        if missing:
            raise ValueError(f"alphabet is missing propositions {missing}")
    if not alphabet:
        # Proposition-free formulas have a fixed truth value on every
        # total structure; no encoding needed.
        if ctl.evaluate_constant(formula):
            return _trivial_structure()
        return None
    normalized = ctl.enf(formula, alphabet)
    dag = ctl.to_dag(normalized)
    for num_states in range(1, max_states + 1):
        pool, clauses = _encode(dag, num_states, alphabet)
        backend = CdclSolver(seed=seed)
        for clause in clauses:
            backend.add_clause(clause)
        backend.reserve(pool.count)
        if not backend.solve():
            continue
        model = _decode_structure(backend.model(), pool, num_states, alphabet)
        if not checker.holds(model, formula):
            raise SynthesisInconsistency(
                f"synthesized structure fails {ctl.print_ctl(formula)}")
        return model
    return None


def implies(f: CtlFormula, g: CtlFormula,
            max_states: int = DEFAULT_MAX_STATES,
            alphabet: Sequence[str] | None = None,
            seed: int | None = None) -> KripkeStructure | None:
    """Countermodel of f -> g within the state budget, or None.

    None means the implication holds on every structure with up to
    `max_states` states (a bounded verdict).  A returned structure
    satisfies f and falsifies g, checker-verified.
    """
    if alphabet is None:
        alphabet = tuple(sorted(ctl.propositions(f) | ctl.propositions(g)))
    witness = synthesize(And(f, Not(g)), max_states, alphabet, seed)
    if witness is not None:
        if not checker.holds(witness, f) or checker.holds(witness, g):
            raise SynthesisInconsistency(
                f"countermodel of {ctl.print_ctl(f)} -> {ctl.print_ctl(g)} "
                "fails verification")
    return witness


def equivalent(f: CtlFormula, g: CtlFormula,
               max_states: int = DEFAULT_MAX_STATES,
               alphabet: Sequence[str] | None = None,
               seed: int | None = None,
               ) -> tuple[str, KripkeStructure] | None:
    """None when f and g agree on all structures within the budget.

    Otherwise ("forward", w) with w satisfying f & !g, or ("backward", w)
    with w satisfying g & !f.
    """
    if alphabet is None:
        alphabet = tuple(sorted(ctl.propositions(f) | ctl.propositions(g)))
    witness = implies(f, g, max_states, alphabet, seed)
    if witness is not None:
        return ("forward", witness)
    witness = implies(g, f, max_states, alphabet, seed)
    if witness is not None:
        return ("backward", witness)
    return None
