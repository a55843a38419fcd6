"""Passive learning of minimal consistent ENF formulas from samples.

`learn_minimal` searches size budgets 1..B in order and returns the first
formula consistent with the sample: true on every initial state of every
positive structure, false on some initial state of every negative one.
Because budgets are tried bottom-up, the result has minimal size.

`infer_candidate` is the inner search of the counterexample-guided loop:
one distinguished positive structure, accumulated negative structures,
and a discard set D of formulas that must not be proposed again.  Each
member of D is excluded by a blocking clause at the budget matching its
size; renumbered embeddings of discarded formulas inside larger budgets
(possible when filler nodes are unreachable from the root) are caught by
re-checking every decoded formula against D and blocking that embedding
before re-solving, so no discarded formula is ever returned.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from typing import Sequence

from . import ctl, encoder
from .ctl import CtlFormula
from .kripke import KripkeStructure, isomorphic
from .sat import BackendFailure, CdclSolver

__all__ = ["Sample", "BudgetTrace", "LearnResult", "AlphabetMismatch",
           "NoConsistentFormula", "learn_minimal", "infer_candidate"]

# Isomorphism checking is exhaustive; above this size fall back to identity.
_ISO_LIMIT = 8


class AlphabetMismatch(ValueError):
    """Sample structures must agree on one proposition alphabet."""


class NoConsistentFormula(Exception):
    """No formula within the size budget separates the sample.

    Carries the per-budget solver trace; it is empty when the sample was
    rejected outright because a positive and a negative structure are
    isomorphic (no formula of any size can separate those).
    """

    def __init__(self, budgets: list["BudgetTrace"]):
        super().__init__("no consistent formula within the size budget")
        self.budgets = budgets


@dataclass(frozen=True)
class Sample:
    """Positive and negative structures over a shared alphabet."""

    positives: tuple[KripkeStructure, ...]
    negatives: tuple[KripkeStructure, ...] = ()

    def __post_init__(self) -> None:
        if not self.positives and not self.negatives:
            raise ValueError("sample must contain at least one structure")
        alphabet = self.structures[0].alphabet
        for struct in self.structures:
            if struct.alphabet != alphabet:
                raise AlphabetMismatch(
                    f"expected alphabet {alphabet}, got {struct.alphabet}")

    @property
    def structures(self) -> tuple[KripkeStructure, ...]:
        return self.positives + self.negatives

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.structures[0].alphabet

    def has_conflict(self) -> bool:
        """True iff some positive structure equals a negative one.

        Checked by isomorphism up to eight states and by identity beyond;
        such samples are unsatisfiable at every size budget because no
        formula distinguishes isomorphic structures.
        """
        for pos in self.positives:
            for neg in self.negatives:
                if pos.size <= _ISO_LIMIT and neg.size <= _ISO_LIMIT:
                    if isomorphic(pos, neg):
                        return True
                elif pos == neg:
                    return True
        return False


@dataclass(frozen=True)
class BudgetTrace:
    """Outcome of one size budget: SAT/UNSAT plus solver statistics."""

    size: int
    satisfiable: bool
    variables: int
    clauses: int
    millis: float

    def describe(self) -> str:
        verdict = "SAT" if self.satisfiable else "UNSAT"
        return (f"budget {self.size}: {verdict} (vars={self.variables}, "
                f"clauses={self.clauses}, ms={self.millis:.1f})")


@dataclass(frozen=True)
class LearnResult:
    formula: CtlFormula
    size: int
    budgets: tuple[BudgetTrace, ...]


def _search(sample: Sample, max_size: int, discarded: Sequence[CtlFormula],
            seed: int | None, dump_dir: str | None,
            ) -> tuple[LearnResult | None, list[BudgetTrace]]:
    budgets: list[BudgetTrace] = []
    blocked_dags = [ctl.to_dag(f) for f in discarded]
    for n in range(1, max_size + 1):
        instance = encoder.build_instance(
            n, sample.positives, sample.negatives,
            blocked=[d for d in blocked_dags if d.size == n])
        if dump_dir is not None:
            path = os.path.join(dump_dir, f"omega_{n}.cnf")
            with open(path, "w", encoding="ascii") as handle:
                handle.write(encoder.to_dimacs(instance))
        backend = CdclSolver(seed=seed)
        encoder.load_backend(instance, backend)
        started = time.perf_counter()
        while True:
            assignment = encoder.solve(instance, backend=backend)
            if assignment is None:
                break
            formula, lits = encoder.decode_with_literals(assignment, instance)
            if any(ctl.syntactically_equal(formula, d) for d in discarded):
                # A renumbered embedding of a discarded formula: exclude
                # this embedding and look for a different assignment.
                backend.add_clause([-lit for lit in lits])
                continue
            millis = (time.perf_counter() - started) * 1000.0
            budgets.append(BudgetTrace(n, True, instance.num_vars,
                                       instance.num_clauses, millis))
            if ctl.size(formula) != n:
                raise BackendFailure(
                    f"decoded formula {ctl.print_ctl(formula)} has size "
                    f"{ctl.size(formula)} at budget {n}; a smaller budget "
                    "should have found it")
            return LearnResult(formula, n, tuple(budgets)), budgets
        millis = (time.perf_counter() - started) * 1000.0
        budgets.append(BudgetTrace(n, False, instance.num_vars,
                                   instance.num_clauses, millis))
    return None, budgets


def learn_minimal(sample: Sample, max_size: int, seed: int | None = None,
                  dump_dir: str | None = None) -> LearnResult:
    """Minimal-size formula consistent with the sample.

    Tries budgets 1..max_size in order and returns at the first
    satisfiable one, so the result's size is the minimum over all
    consistent formulas.  Raises `NoConsistentFormula` when every budget
    is unsatisfiable (immediately when the sample is self-contradictory).
    """
    if max_size < 1:
        raise ValueError("size budget must be at least 1")
    if sample.has_conflict():
        raise NoConsistentFormula([])
    result, budgets = _search(sample, max_size, (), seed, dump_dir)
    if result is None:
        raise NoConsistentFormula(budgets)
    return result


def infer_candidate(model: KripkeStructure, bound: int,
                    negatives: Sequence[KripkeStructure] = (),
                    discarded: Sequence[CtlFormula] = (),
                    seed: int | None = None) -> LearnResult | None:
    """Smallest formula holding on `model`, failing every structure in
    `negatives`, and syntactically different from everything in
    `discarded`; None when no such formula of size <= bound exists."""
    if bound < 1:
        raise ValueError("size budget must be at least 1")
    sample = Sample((model,), tuple(negatives))
    if sample.has_conflict():
        return None
    result, _ = _search(sample, bound, tuple(discarded), seed, None)
    return result
