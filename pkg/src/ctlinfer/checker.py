"""Explicit-state CTL model checking over Kripke structures.

Satisfaction sets are computed bottom-up over the formula: Boolean
connectives are set operations, EX is a predecessor image, and the two
fixed points are iterated to stabilization.  E[f U g] grows from the g-set
(least fixed point), EG f shrinks from the f-set (greatest fixed point);
both stabilize within |S| + 1 steps.

State sets are machine integers used as bitsets over state indices, which
keeps the fixed-point loops cheap; the public functions expose frozensets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import ctl
from .ctl import (And, Const, CtlFormula, ExistsGlobally, ExistsNext,
                  ExistsUntil, Not, NotInEnf, Or, Prop)
from .kripke import KripkeStructure, UnknownProposition

__all__ = ["SatSet", "sat_set", "sat_set_table", "holds",
           "eu_iterates", "eg_iterates"]


@dataclass(frozen=True)
class SatSet:
    """The states of one structure satisfying one formula."""
    formula: CtlFormula
    states: frozenset[int]


def _succ_masks(m: KripkeStructure) -> list[int]:
    masks = []
    for s in range(m.size):
        mask = 0
        for t in m.successors[s]:
            mask |= 1 << t
        masks.append(mask)
    return masks


def _label_mask(m: KripkeStructure, prop: str) -> int:
    if prop not in m.alphabet:
        raise UnknownProposition(prop)
    mask = 0
    for s in range(m.size):
        if prop in m.labels[s]:
            mask |= 1 << s
    return mask


def _ex_mask(succ: list[int], target: int) -> int:
    mask = 0
    for s, post in enumerate(succ):
        if post & target:
            mask |= 1 << s
    return mask


def _eu_mask(succ: list[int], phi: int, psi: int) -> int:
    current = psi
    while True:
        grown = current | (phi & _ex_mask(succ, current))
        if grown == current:
            return current
        current = grown


def _eg_mask(succ: list[int], phi: int) -> int:
    current = phi
    while True:
        shrunk = phi & _ex_mask(succ, current)
        if shrunk == current:
            return current
        current = shrunk


def _sat_mask(m: KripkeStructure, f: CtlFormula, succ: list[int],
              memo: dict[CtlFormula, int]) -> int:
    got = memo.get(f)
    if got is not None:
        return got
    full = (1 << m.size) - 1
    if isinstance(f, Prop):
        mask = _label_mask(m, f.name)
    elif isinstance(f, Const):
        mask = full if f.value else 0
    elif isinstance(f, Not):
        mask = full ^ _sat_mask(m, f.operand, succ, memo)
    elif isinstance(f, And):
        mask = (_sat_mask(m, f.left, succ, memo)
                & _sat_mask(m, f.right, succ, memo))
    elif isinstance(f, Or):
        mask = (_sat_mask(m, f.left, succ, memo)
                | _sat_mask(m, f.right, succ, memo))
    elif isinstance(f, ExistsNext):
        mask = _ex_mask(succ, _sat_mask(m, f.operand, succ, memo))
    elif isinstance(f, ExistsUntil):
        mask = _eu_mask(succ, _sat_mask(m, f.left, succ, memo),
                        _sat_mask(m, f.right, succ, memo))
    elif isinstance(f, ExistsGlobally):
        mask = _eg_mask(succ, _sat_mask(m, f.operand, succ, memo))
    else:
        raise NotInEnf(
            f"checker works on ENF formulas, got {ctl.print_ctl(f)}")
    memo[f] = mask
    return mask


def _to_set(mask: int, size: int) -> frozenset[int]:
    return frozenset(s for s in range(size) if mask >> s & 1)


def sat_set(m: KripkeStructure, f: CtlFormula) -> SatSet:
    """Satisfaction set of an ENF formula (constants allowed)."""
    mask = _sat_mask(m, f, _succ_masks(m), {})
    return SatSet(formula=f, states=_to_set(mask, m.size))


def sat_set_table(m: KripkeStructure, f: CtlFormula,
                  cache: dict[CtlFormula, int] | None = None,
                  ) -> dict[CtlFormula, frozenset[int]]:
    """Satisfaction sets for every subformula of `f`, children first.

    Pass the same `cache` dict across calls to reuse work when evaluating
    many formulas against one structure.
    """
    memo = cache if cache is not None else {}
    succ = _succ_masks(m)
    _sat_mask(m, f, succ, memo)
    table: dict[CtlFormula, frozenset[int]] = {}

    def emit(g: CtlFormula) -> None:
        if g in table:
            return
        for child in ctl.children(g):
            emit(child)
        table[g] = _to_set(memo[g], m.size)

    emit(f)
    return table


def holds(m: KripkeStructure, f: CtlFormula) -> bool:
    """True iff every initial state satisfies `f`.

    Accepts arbitrary formulas; they are normalized to ENF internally, and
    holds(m, f) always agrees with holds(m, enf(f)).
    """
    mask = _sat_mask(m, ctl.enf(f), _succ_masks(m), {})
    return all(mask >> s & 1 for s in m.initial)


def _iterate(start: int, step) -> list[int]:
    masks = [start]
    while True:
        nxt = step(masks[-1])
        if nxt == masks[-1]:
            return masks
        masks.append(nxt)


def eu_iterates(m: KripkeStructure, phi_states: Iterable[int],
                psi_states: Iterable[int]) -> list[frozenset[int]]:
    """Approximants of E[f U g] from the given phi/psi state sets.

    T_1 is the psi set and T_{k+1} adds the phi states with a successor in
    T_k.  The sequence is monotone and the last entry is the fixed point;
    it stabilizes within |S| + 1 entries and further steps repeat it.
    """
    succ = _succ_masks(m)
    phi = sum(1 << s for s in set(phi_states))
    psi = sum(1 << s for s in set(psi_states))
    masks = _iterate(psi, lambda t: t | (phi & _ex_mask(succ, t)))
    return [_to_set(t, m.size) for t in masks]


def eg_iterates(m: KripkeStructure,
                phi_states: Iterable[int]) -> list[frozenset[int]]:
    """Approximants of EG f from the given phi state set.

    T_1 is the phi set and T_{k+1} keeps the phi states with a successor
    in T_k.  The sequence is antitone and the last entry is the fixed
    point; it stabilizes within |S| + 1 entries.
    """
    succ = _succ_masks(m)
    phi = sum(1 << s for s in set(phi_states))
    masks = _iterate(phi, lambda t: phi & _ex_mask(succ, t))
    return [_to_set(t, m.size) for t in masks]
