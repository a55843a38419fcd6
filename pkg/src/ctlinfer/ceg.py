"""Counterexample-guided inference of concise, language-minimal formulas.

Starting from the trivial hypothesis `true`, the loop repeatedly asks the
passive learner for the smallest formula that holds on the input
structure, fails every accumulated negative structure, and differs from
every discarded formula.  Each candidate is compared with the current
hypothesis using bounded countermodel synthesis:

* case 1 - candidate and hypothesis are equivalent within the state
  budget: discard the candidate and keep searching;
* case 2 - the candidate strictly strengthens the hypothesis (it implies
  the hypothesis, and a witness satisfies the hypothesis but not the
  candidate): the witness becomes a negative structure, the candidate is
  discarded from future searches and becomes the new hypothesis;
* case 3 - the candidate does not imply the hypothesis: the witness
  (satisfying the candidate, falsifying the hypothesis) becomes a
  negative structure, which silently eliminates the candidate from future
  searches.

Every iteration removes at least one formula from the finite candidate
space of size <= bound, so the loop terminates; a hard cap derived from
that space size guards the invariant.  Since all negative structures stay
within the synthesis budget, every structure in N keeps failing the
current hypothesis across strengthenings; this is re-asserted each
iteration and a violation raises `SynthesisInconsistency`.

Equivalence and implication verdicts are bounded by the synthesis state
budget, so "language-minimal" is certified relative to countermodels of
at most that size; `verify_solution` re-derives the guarantees and, for
small bounds, audits strict-implication minimality by exhaustive formula
enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import checker, ctl, learner, synth
from .ctl import CtlFormula, Not
from .kripke import KripkeStructure
from .synth import DEFAULT_MAX_STATES, SynthesisInconsistency

__all__ = ["CegTraceEntry", "CegReport", "Certification", "CegError",
           "CertificationFailure", "SynthesisInconsistency", "infer",
           "verify_solution", "formula_space_bound"]


class CegError(RuntimeError):
    """An internal loop invariant broke (bug signal, not an input error)."""


class CertificationFailure(Exception):
    """The inference result fails one of its advertised guarantees."""

    def __init__(self, reason: str, violating: CtlFormula | None = None):
        if violating is not None:
            reason = f"{reason}: {ctl.print_ctl(violating)}"
        super().__init__(reason)
        self.violating = violating


@dataclass(frozen=True)
class CegTraceEntry:
    iteration: int
    candidate: CtlFormula
    case: int
    countermodel: KripkeStructure | None


@dataclass(frozen=True)
class CegReport:
    formula: CtlFormula
    iterations: int
    trace: tuple[CegTraceEntry, ...]
    bound: int
    synth_states: int
    certification: str

    @property
    def negatives(self) -> tuple[KripkeStructure, ...]:
        return tuple(e.countermodel for e in self.trace
                     if e.countermodel is not None)


@dataclass(frozen=True)
class Certification:
    formula: CtlFormula
    size: int
    bound: int
    synth_states: int
    negatives_checked: int
    audited: bool
    candidates_audited: int


def formula_space_bound(num_props: int, bound: int) -> int:
    """Upper bound on the number of syntax DAGs with at most `bound`
    nodes: node 1 picks a proposition, every later node a label and two
    children below it.  Loose, but finite; used as an iteration cap."""
    total = 0
    for n in range(1, bound + 1):
        count = num_props
        for i in range(2, n + 1):
            count *= (num_props + len(ctl.OPERATOR_LABELS)) * (i - 1) ** 2
        total += count
    return total


def infer(model: KripkeStructure, bound: int,
          synth_states: int = DEFAULT_MAX_STATES, seed: int | None = None,
          on_iteration: Callable[[CegTraceEntry], None] | None = None,
          ) -> CegReport:
    """Infer a concise formula holding on `model`, strengthened until no
    size-<= bound candidate strictly implies it (within the synthesis
    budget).

    The initial hypothesis is the constant true, which every candidate
    implies; it survives only if no formula of size <= bound holds on the
    model at all.  `on_iteration` observes each trace entry as it is
    produced.
    """
    if bound < 1:
        raise ValueError("size bound must be at least 1")
    alphabet = model.alphabet
    hypothesis: CtlFormula = ctl.TRUE
    negatives: list[KripkeStructure] = []
    discarded: list[CtlFormula] = []
    proposed: list[CtlFormula] = []
    trace: list[CegTraceEntry] = []
    cap = formula_space_bound(len(alphabet), bound) + 1

    while True:
        if len(trace) >= cap:
            raise CegError("iteration cap exceeded; candidates must be "
                           "eliminated monotonically")
        found = learner.infer_candidate(model, bound, negatives, discarded,
                                        seed=seed)
        if found is None:
            break
        candidate = found.formula
        if any(ctl.syntactically_equal(candidate, p) for p in proposed):
            raise CegError(
                f"candidate {ctl.print_ctl(candidate)} proposed twice")
        proposed.append(candidate)

        if hypothesis == ctl.TRUE:
            # Everything implies true, so only the reverse direction can
            # fail: a witness of !candidate separates them.
            witness = synth.synthesize(Not(candidate), synth_states,
                                       alphabet, seed)
            if witness is None:
                case, countermodel = 1, None
                discarded.append(candidate)
            else:
                if checker.holds(witness, candidate):
                    raise SynthesisInconsistency(
                        "witness fails to refute the candidate")
                case, countermodel = 2, witness
                negatives.append(witness)
                discarded.append(candidate)
                hypothesis = candidate
        else:
            forward = synth.implies(candidate, hypothesis, synth_states,
                                    alphabet, seed)
            if forward is not None:
                case, countermodel = 3, forward
                negatives.append(forward)
            else:
                backward = synth.implies(hypothesis, candidate, synth_states,
                                         alphabet, seed)
                if backward is None:
                    case, countermodel = 1, None
                    discarded.append(candidate)
                else:
                    case, countermodel = 2, backward
                    negatives.append(backward)
                    discarded.append(candidate)
                    hypothesis = candidate

        entry = CegTraceEntry(len(trace) + 1, candidate, case, countermodel)
        trace.append(entry)
        if on_iteration is not None:
            on_iteration(entry)
        for struct in negatives:
            if checker.holds(struct, hypothesis):
                raise SynthesisInconsistency(
                    "a negative structure satisfies the hypothesis")

    certification = (
        f"strictness certified against countermodels of at most "
        f"{synth_states} states; candidate space of size <= {bound} "
        f"exhausted in {len(trace)} iterations")
    return CegReport(formula=hypothesis, iterations=len(trace),
                     trace=tuple(trace), bound=bound,
                     synth_states=synth_states, certification=certification)


def verify_solution(model: KripkeStructure, bound: int, result: CegReport,
                    synth_states: int | None = None,
                    audit_limit: int = 4) -> Certification:
    """Re-derive the guarantees of an inference result.

    Checks that the formula holds on the model, fits the size bound, and
    fails on every recorded negative structure.  When the bound is small
    enough (<= audit_limit) it additionally enumerates every ENF formula
    of size <= bound holding on the model and confirms that none strictly
    implies the result within the synthesis budget; the first violation
    raises `CertificationFailure` naming the violating formula.
    """
    if synth_states is None:
        synth_states = result.synth_states
    formula = result.formula
    if not checker.holds(model, formula):
        raise CertificationFailure("result does not hold on the model",
                                   formula)
    if ctl.size(formula) > bound:
        raise CertificationFailure(
            f"result exceeds the size bound {bound}", formula)

    audited = False
    candidates_audited = 0
    if bound <= audit_limit:
        audited = True
        for candidate in ctl.enumerate_formulas(model.alphabet, bound):
            if not checker.holds(model, candidate):
                continue
            candidates_audited += 1
            if ctl.syntactically_equal(candidate, formula):
                continue
            if synth.implies(candidate, formula, synth_states,
                             model.alphabet) is not None:
                continue  # candidate does not imply the result
            if synth.implies(formula, candidate, synth_states,
                             model.alphabet) is not None:
                raise CertificationFailure(
                    "a candidate strictly implies the result", candidate)

    negatives = result.negatives
    for struct in negatives:
        if checker.holds(struct, formula):
            raise CertificationFailure(
                "a negative structure satisfies the result", formula)
    return Certification(
        formula=formula, size=ctl.size(formula), bound=bound,
        synth_states=synth_states, negatives_checked=len(negatives),
        audited=audited, candidates_audited=candidates_audited)
