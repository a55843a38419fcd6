"""SAT encoding of size-bounded ENF formula search over labeled structures.

An instance at size budget n describes every syntax DAG with nodes 1..n
(children strictly below parents, node 1 a proposition, node n the root)
together with its evaluation on every structure of the sample:

* label variables `x(i, lab)` pick one proposition or operator per node;
* child variables `l(i, j)` / `r(i, j)` with j < i pick the children of
  every node i >= 2 (exactly one each, even where the arity ignores them);
* evaluation variables `y(m, i, s)` say that state s of structure m
  satisfies the subformula rooted at node i;
* step variables `ys(m, i, s, k)` with k in 1..|S|+1 unroll the EU/EG
  fixed points, which stabilize within |S| + 1 iterations.

Semantic constraints are equivalences guarded by the label/child choice,
so once the x/l/r variables are fixed all y/ys values are forced.
Consistency requires the root to hold in every initial state of the
positive structures and to fail in some initial state of each negative
one.  Blocking clauses exclude previously found formulas by negating the
defining literals of their canonical DAGs; a blocked formula contributes
a clause only at the budget equal to its own size (at larger budgets its
renumbered embeddings are excluded downstream by decode-and-recheck).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import ctl, sat
from .ctl import (AND_LABEL, BINARY_LABELS, EG_LABEL, EU_LABEL, EX_LABEL,
                  NOT_LABEL, OPERATOR_LABELS, OR_LABEL, CtlFormula, SyntaxDag)
from .kripke import KripkeStructure
from .sat import BackendFailure, CdclSolver, Clause

__all__ = ["VarPool", "EncodingInstance", "build_structural",
           "build_semantic", "build_consistency", "build_block",
           "build_instance", "load_backend", "solve", "decode",
           "decode_with_literals", "formula_assumptions", "to_dimacs",
           "BackendFailure"]


class VarPool:
    """Interns tuple keys as contiguous variable indices starting at 1.

    Auxiliary variables (`fresh`) are always numbered above the semantic
    variables allocated before them.
    """

    def __init__(self) -> None:
        self._index: dict[tuple, int] = {}
        self._keys: list[tuple | None] = []

    def var(self, *key) -> int:
        got = self._index.get(key)
        if got is None:
            self._keys.append(key)
            got = len(self._keys)
            self._index[key] = got
        return got

    def get(self, *key) -> int:
        return self._index[key]

    def fresh(self) -> int:
        self._keys.append(None)
        return len(self._keys)

    @property
    def count(self) -> int:
        return len(self._keys)

    def semantic_items(self) -> Iterable[tuple[tuple, int]]:
        return ((key, i + 1) for i, key in enumerate(self._keys)
                if key is not None)


@dataclass
class EncodingInstance:
    size_budget: int
    alphabet: tuple[str, ...]
    positives: tuple[KripkeStructure, ...]
    negatives: tuple[KripkeStructure, ...]
    pool: VarPool
    clauses: list[Clause] = field(default_factory=list)
    blocked: tuple[SyntaxDag, ...] = ()

    @property
    def structures(self) -> tuple[KripkeStructure, ...]:
        return self.positives + self.negatives

    @property
    def num_vars(self) -> int:
        return self.pool.count

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def label_var(self, i: int, lab: str) -> int:
        return self.pool.get("x", i, lab)

    def left_var(self, i: int, j: int) -> int:
        return self.pool.get("l", i, j)

    def right_var(self, i: int, j: int) -> int:
        return self.pool.get("r", i, j)

    def holds_var(self, m: int, i: int, s: int) -> int:
        return self.pool.get("y", m, i, s)

    def step_var(self, m: int, i: int, s: int, k: int) -> int:
        return self.pool.get("ys", m, i, s, k)


def _allocate(pool: VarPool, n: int, alphabet: Sequence[str],
              structures: Sequence[KripkeStructure]) -> None:
    labels = tuple(alphabet) + OPERATOR_LABELS
    for i in range(1, n + 1):
        for lab in labels:
            pool.var("x", i, lab)
    for i in range(2, n + 1):
        for j in range(1, i):
            pool.var("l", i, j)
        for j in range(1, i):
            pool.var("r", i, j)
    for m, struct in enumerate(structures):
        for i in range(1, n + 1):
            for s in range(struct.size):
                pool.var("y", m, i, s)
    for m, struct in enumerate(structures):
        for i in range(1, n + 1):
            for s in range(struct.size):
                for k in range(1, struct.size + 2):
                    pool.var("ys", m, i, s, k)


def build_structural(pool: VarPool, n: int,
                     alphabet: Sequence[str]) -> list[Clause]:
    """Exactly-one label and child choices; node 1 is a proposition."""
    labels = tuple(alphabet) + OPERATOR_LABELS
    clauses: list[Clause] = []
    for i in range(1, n + 1):
        clauses.extend(sat.exactly_one([pool.var("x", i, lab)
                                        for lab in labels]))
    clauses.append(tuple(pool.var("x", 1, p) for p in alphabet))
    for i in range(2, n + 1):
        clauses.extend(sat.exactly_one([pool.var("l", i, j)
                                        for j in range(1, i)]))
        clauses.extend(sat.exactly_one([pool.var("r", i, j)
                                        for j in range(1, i)]))
    return clauses


def build_semantic(pool: VarPool, n: int,
                   structures: Sequence[KripkeStructure]) -> list[Clause]:
    """Guarded evaluation equivalences for every node, label and child.

    The until/globally constraints are factored by guard: the base case
    depends only on the relevant child choice, the step case only on the
    left child, and the fixed-point link `y <-> ys(|S|+1)` only on the
    label.  Under the exactly-one structural constraints this is
    equivalent to guarding each equivalence with the full label-and-both-
    children choice, but emits linearly rather than quadratically many
    clauses.
    """
    if not structures:
        return []
    alphabet = structures[0].alphabet
    clauses: list[Clause] = []
    for m, struct in enumerate(structures):
        if struct.alphabet != alphabet:
            raise ValueError("sample structures must share one alphabet")
        big_k = struct.size
        post = struct.successors

        def y(i: int, s: int) -> int:
            return pool.var("y", m, i, s)

        def ys(i: int, s: int, k: int) -> int:
            return pool.var("ys", m, i, s, k)

        for i in range(1, n + 1):
            for p in alphabet:
                guard = pool.var("x", i, p)
                for s in range(struct.size):
                    if p in struct.labels[s]:
                        clauses.append((-guard, y(i, s)))
                    else:
                        clauses.append((-guard, -y(i, s)))
            if i == 1:
                continue  # node 1 is structurally a proposition
            x_not = pool.var("x", i, NOT_LABEL)
            x_and = pool.var("x", i, AND_LABEL)
            x_or = pool.var("x", i, OR_LABEL)
            x_ex = pool.var("x", i, EX_LABEL)
            x_eu = pool.var("x", i, EU_LABEL)
            x_eg = pool.var("x", i, EG_LABEL)
            for j in range(1, i):
                left = pool.var("l", i, j)
                right = pool.var("r", i, j)
                for s in range(struct.size):
                    succ = sorted(post[s])
                    clauses.extend(sat.equiv_not(
                        y(i, s), y(j, s), guards=(x_not, left)))
                    clauses.extend(sat.equiv_or(
                        y(i, s), [y(j, t) for t in succ],
                        guards=(x_ex, left)))
                    # EU base case reads the right child only.
                    clauses.extend(sat.equiv_lit(
                        ys(i, s, 1), y(j, s), guards=(x_eu, right)))
                    clauses.extend(sat.equiv_lit(
                        ys(i, s, 1), y(j, s), guards=(x_eg, left)))
                    for k in range(1, big_k + 1):
                        steps = [ys(i, t, k) for t in succ]
                        clauses.extend(sat.equiv_or_and_disj(
                            ys(i, s, k + 1), ys(i, s, k), y(j, s), steps,
                            guards=(x_eu, left)))
                        clauses.extend(sat.equiv_and_disj(
                            ys(i, s, k + 1), y(j, s), steps,
                            guards=(x_eg, left)))
            for j in range(1, i):
                for j2 in range(1, i):
                    guards = (pool.var("l", i, j), pool.var("r", i, j2))
                    for s in range(struct.size):
                        clauses.extend(sat.equiv_and(
                            y(i, s), [y(j, s), y(j2, s)],
                            guards=(x_and,) + guards))
                        clauses.extend(sat.equiv_or(
                            y(i, s), [y(j, s), y(j2, s)],
                            guards=(x_or,) + guards))
            for s in range(struct.size):
                clauses.extend(sat.equiv_lit(
                    y(i, s), ys(i, s, big_k + 1), guards=(x_eu,)))
                clauses.extend(sat.equiv_lit(
                    y(i, s), ys(i, s, big_k + 1), guards=(x_eg,)))
    return clauses


def build_consistency(pool: VarPool, n: int,
                      positives: Sequence[KripkeStructure],
                      negatives: Sequence[KripkeStructure]) -> list[Clause]:
    """Root true on all initial states of P, false somewhere in I for N."""
    clauses: list[Clause] = []
    for m, struct in enumerate(positives):
        for s in sorted(struct.initial):
            clauses.append((pool.var("y", m, n, s),))
    offset = len(positives)
    for m, struct in enumerate(negatives):
        clauses.append(tuple(-pool.var("y", offset + m, n, s)
                             for s in sorted(struct.initial)))
    return clauses


def dag_literals(pool: VarPool, dag: SyntaxDag) -> list[int]:
    """Defining literals of a DAG: labels always, children per arity."""
    lits = []
    for i, node in dag:
        lits.append(pool.var("x", i, node.label))
        if node.left is not None:
            lits.append(pool.var("l", i, node.left))
        if node.right is not None:
            lits.append(pool.var("r", i, node.right))
    return lits


def build_block(pool: VarPool, n: int,
                blocked: Iterable[SyntaxDag]) -> list[Clause]:
    """One clause per blocked DAG of size exactly n; smaller DAGs emit
    nothing at this budget."""
    clauses: list[Clause] = []
    for dag in blocked:
        if dag.size == n:
            clauses.append(tuple(-lit for lit in dag_literals(pool, dag)))
    return clauses


def build_instance(n: int, positives: Sequence[KripkeStructure],
                   negatives: Sequence[KripkeStructure] = (),
                   blocked: Iterable[SyntaxDag] = ()) -> EncodingInstance:
    if n < 1:
        raise ValueError("size budget must be at least 1")
    structures = tuple(positives) + tuple(negatives)
    if not structures:
        raise ValueError("sample must contain at least one structure")
    alphabet = structures[0].alphabet
    for struct in structures:
        if struct.alphabet != alphabet:
            raise ValueError("sample structures must share one alphabet")
    pool = VarPool()
    _allocate(pool, n, alphabet, structures)
    blocked = tuple(blocked)
    clauses = build_structural(pool, n, alphabet)
    clauses += build_semantic(pool, n, structures)
    clauses += build_consistency(pool, n, tuple(positives), tuple(negatives))
    clauses += build_block(pool, n, blocked)
    return EncodingInstance(
        size_budget=n, alphabet=alphabet, positives=tuple(positives),
        negatives=tuple(negatives), pool=pool, clauses=clauses,
        blocked=blocked)


def load_backend(instance: EncodingInstance,
                 backend: CdclSolver) -> CdclSolver:
    for clause in instance.clauses:
        backend.add_clause(clause)
    backend.reserve(instance.pool.count)
    return backend


def solve(instance: EncodingInstance, assumptions: Sequence[int] = (),
          backend: CdclSolver | None = None, seed: int | None = None,
          max_conflicts: int | None = None) -> dict[int, bool] | None:
    """One satisfying assignment (total on the pool) or None if UNSAT."""
    if backend is None:
        backend = CdclSolver(seed=seed, max_conflicts=max_conflicts)
        load_backend(instance, backend)
    if not backend.solve(assumptions):
        return None
    return backend.model()


def _true_key(assignment: Mapping[int, bool], pool: VarPool, kind: str,
              i: int, candidates: Iterable) -> object:
    hits = [c for c in candidates if assignment[pool.get(kind, i, c)]]
    if len(hits) != 1:
        raise ValueError(
            f"assignment fixes {len(hits)} choices for {kind}({i})")
    return hits[0]


def decode_with_literals(assignment: Mapping[int, bool],
                         instance: EncodingInstance,
                         ) -> tuple[CtlFormula, list[int]]:
    """Formula rooted at node n plus the defining literals actually read.

    Only nodes reachable from the root matter; negating the returned
    literals excludes every assignment that reproduces this embedding.
    """
    pool = instance.pool
    labels = instance.alphabet + OPERATOR_LABELS
    built: dict[int, CtlFormula] = {}
    lits: list[int] = []

    def build(i: int) -> CtlFormula:
        if i in built:
            return built[i]
        lab = _true_key(assignment, pool, "x", i, labels)
        lits.append(pool.get("x", i, lab))
        if lab not in OPERATOR_LABELS:
            f = ctl.Prop(lab)
        else:
            j = _true_key(assignment, pool, "l", i, range(1, i))
            lits.append(pool.get("l", i, j))
            if lab in BINARY_LABELS:
                j2 = _true_key(assignment, pool, "r", i, range(1, i))
                lits.append(pool.get("r", i, j2))
                ctor = {AND_LABEL: ctl.And, OR_LABEL: ctl.Or,
                        EU_LABEL: ctl.ExistsUntil}[lab]
                f = ctor(build(j), build(j2))
            else:
                ctor = {NOT_LABEL: ctl.Not, EX_LABEL: ctl.ExistsNext,
                        EG_LABEL: ctl.ExistsGlobally}[lab]
                f = ctor(build(j))
        built[i] = f
        return f

    formula = build(instance.size_budget)
    return formula, lits


def decode(assignment: Mapping[int, bool],
           instance: EncodingInstance) -> CtlFormula:
    return decode_with_literals(assignment, instance)[0]


def formula_assumptions(instance: EncodingInstance,
                        f: CtlFormula) -> list[int]:
    """Unit assumptions pinning the instance's DAG to the formula's."""
    dag = ctl.to_dag(f)
    if dag.size != instance.size_budget:
        raise ValueError(
            f"formula has size {dag.size}, instance budget is "
            f"{instance.size_budget}")
    return dag_literals(instance.pool, dag)


def to_dimacs(instance: EncodingInstance) -> str:
    comments = [f"size budget {instance.size_budget}, "
                f"{len(instance.positives)} positive / "
                f"{len(instance.negatives)} negative structures"]
    for key, idx in instance.pool.semantic_items():
        comments.append(" ".join(str(part) for part in key) + f" {idx}")
    return sat.to_dimacs(instance.pool.count, instance.clauses, comments)
