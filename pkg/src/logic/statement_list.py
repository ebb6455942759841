"""Canonical causal statements and their substitute/reduce closure"""
import logging
from collections import deque
from typing import Deque, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from src.errors import ContractViolationError, InconsistentInputError
from src.models.ci_fact import CiFact
from src.models.graph import NodeId
from src.models.statement import (
    SELECTION,
    CausalAtom,
    CausalStatement,
    DerivationTrace,
    SelectionMarker,
    StepKind,
    Target,
    Verdict,
    target_sort_key,
)

logger = logging.getLogger(__name__)

LiveKey = Tuple[NodeId, FrozenSet[Target]]


class StatementList:
    """The list of statements a run has derived, closed on demand.

    ``assert_*`` methods queue statements; ``close`` drains the queue until
    no rule produces anything new. Live positive statements are kept free
    of subsumed ones: a statement whose terms are a superset of another
    live statement with the same subject is retired, trace intact.

    Args:
        keep_wide: Keep substitution results with more than two node targets.
    """

    def __init__(self, keep_wide: bool = False):
        self.keep_wide = keep_wide
        self._queue: Deque[CausalStatement] = deque()
        self._negatives: Dict[Tuple[NodeId, Target], CausalStatement] = {}
        self._neg_by_subject: Dict[NodeId, Dict[Target, None]] = {}
        self._neg_by_target: Dict[Target, Dict[NodeId, None]] = {}
        self._live: Dict[LiveKey, CausalStatement] = {}
        self._by_subject: Dict[NodeId, Dict[LiveKey, None]] = {}
        self._containing: Dict[Target, Dict[LiveKey, None]] = {}
        self._facts: Dict[Tuple[NodeId, Target], CausalStatement] = {}
        self._retired: List[CausalStatement] = []
        self._nodes: Set[NodeId] = set()
        self._fact_leaves: Dict[tuple, DerivationTrace] = {}
        self._destroyer_leaves: Dict[tuple, DerivationTrace] = {}
        self.steps = 0

    # ------------------------------------------------------------------
    # Statement generation
    # ------------------------------------------------------------------

    def assert_from_minimal_independence(self, fact: CiFact) -> List[CausalStatement]:
        """Each node of a minimal separating set causes x, y or selection.

        Raises:
            ContractViolationError: ``fact`` is not a verified minimal independence.
        """
        if not fact.minimal:
            raise ContractViolationError(f"{fact} is not a minimal independence")
        leaf = self._fact_leaf(fact)
        added = [
            CausalStatement.disjunction(z, {fact.x, fact.y}, True, leaf)
            for z in sorted(fact.z)
        ]
        self._enqueue(added)
        return added

    def assert_from_marginal_independence(self, fact: CiFact) -> List[CausalStatement]:
        """With nothing conditioned on, neither endpoint causes the other.

        Raises:
            ContractViolationError: ``fact`` is not an independence given the empty set.
        """
        if not fact.independent or fact.z:
            raise ContractViolationError(f"{fact} is not a marginal independence")
        leaf = self._fact_leaf(fact)
        added = [
            CausalStatement.negation(CausalAtom(fact.x, fact.y), leaf),
            CausalStatement.negation(CausalAtom(fact.y, fact.x), leaf),
        ]
        self._enqueue(added)
        return added

    def assert_from_destroyer(self, fact: CiFact, w: NodeId) -> List[CausalStatement]:
        """A node that destroys an independence causes none of its nodes.

        Raises:
            ContractViolationError: ``w`` is not a recorded destroyer of ``fact``.
        """
        if w not in fact.witness_destroyers:
            raise ContractViolationError(f"{w} is not a recorded destroyer of {fact}")
        key = (fact.query.key, w)
        leaf = self._destroyer_leaves.get(key)
        if leaf is None:
            destroyed = ",".join(n.label for n in sorted(fact.z | {w}))
            leaf = DerivationTrace(
                StepKind.DESTROYER_DEPENDENCE,
                f"dep {fact.x} {fact.y} | {destroyed}",
                fact=fact,
                destroyer=w,
            )
            self._destroyer_leaves[key] = leaf
        targets: List[Target] = [fact.x, fact.y, *sorted(fact.z), SELECTION]
        added = [CausalStatement.negation(CausalAtom(w, t), leaf) for t in targets]
        self._enqueue(added)
        return added

    def assert_inferred_blocking(self, z: NodeId, z_k: NodeId, y: NodeId) -> CausalStatement:
        """An inferred blocking node z causes z_k, y or selection.

        Raises:
            ContractViolationError: The three nodes are not pairwise distinct.
        """
        if len({z, z_k, y}) != 3:
            raise ContractViolationError(
                f"blocking premise ({z}, {z_k}, {y}) needs three distinct nodes"
            )
        leaf = DerivationTrace(
            StepKind.INFERRED_BLOCKING,
            f"{z} blocks {z_k} from {y}",
            blocking=(z, z_k, y),
        )
        statement = CausalStatement.disjunction(z, {z_k, y}, True, leaf)
        self._enqueue([statement])
        return statement

    def assert_premise(self, statement: CausalStatement) -> CausalStatement:
        """Inject an externally supplied statement as a leaf."""
        leaf = DerivationTrace(StepKind.PREMISE, str(statement))
        statement = statement.with_trace(leaf)
        self._enqueue([statement])
        return statement

    # ------------------------------------------------------------------
    # Closure
    # ------------------------------------------------------------------

    def close(self) -> "StatementList":
        """Apply substitute/reduce rules until nothing changes.

        Raises:
            InconsistentInputError: A statement and its negation, or a
                disjunction with every term refuted, were derived.
        """
        while self._queue:
            statement = self._queue.popleft()
            self.steps += 1
            if statement.negative:
                self._insert_negative(statement)
            else:
                self._insert_disjunct(statement)
        return self

    @property
    def pending(self) -> int:
        return len(self._queue)

    # ------------------------------------------------------------------
    # Read-out
    # ------------------------------------------------------------------

    def query(self, atom: CausalAtom) -> Verdict:
        key = (atom.source, atom.target)
        if key in self._facts:
            return Verdict.ESTABLISHED
        if key in self._negatives:
            return Verdict.REFUTED
        return Verdict.UNKNOWN

    def statement_for(self, atom: CausalAtom) -> Optional[CausalStatement]:
        """The fact or negation that settles ``atom``, if any."""
        key = (atom.source, atom.target)
        return self._facts.get(key) or self._negatives.get(key)

    def tail_statement(self, x: NodeId, y: NodeId) -> Optional[CausalStatement]:
        """A live statement no weaker than ``x => y or x => S``, if any."""
        allowed = {y, SELECTION}
        for key in self._by_subject.get(x, ()):
            if self._live[key].terms <= allowed:
                return self._live[key]
        return None

    def entails_tail(self, x: NodeId, y: NodeId) -> bool:
        return self.tail_statement(x, y) is not None

    def facts(self) -> List[CausalStatement]:
        return self._sorted(self._facts.values())

    def negatives(self) -> List[CausalStatement]:
        return self._sorted(self._negatives.values())

    def disjunctions(self) -> List[CausalStatement]:
        """Open statements with more than one term."""
        return self._sorted(s for s in self._live.values() if not s.is_fact)

    @property
    def retired(self) -> List[CausalStatement]:
        return list(self._retired)

    def statement_log(self) -> List[str]:
        """Facts, then negations, then open disjunctions, one line each."""
        return [str(s) for s in self.facts() + self.negatives() + self.disjunctions()]

    def summary(self) -> Dict[str, int]:
        return {
            "facts": len(self._facts),
            "negatives": len(self._negatives),
            "disjunctions": len(self._live) - len(self._facts),
            "retired": len(self._retired),
            "steps": self.steps,
        }

    def __len__(self) -> int:
        return len(self._live) + len(self._negatives)

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    def _enqueue(self, statements: Iterable[CausalStatement]) -> None:
        for statement in statements:
            self._nodes.add(statement.subject)
            self._nodes.update(statement.targets)
            self._queue.append(statement)

    def _fact_leaf(self, fact: CiFact) -> DerivationTrace:
        leaf = self._fact_leaves.get(fact.query.key)
        if leaf is None:
            leaf = DerivationTrace(StepKind.MINIMAL_INDEPENDENCE, str(fact), fact=fact)
            self._fact_leaves[fact.query.key] = leaf
        return leaf

    @staticmethod
    def _sorted(statements: Iterable[CausalStatement]) -> List[CausalStatement]:
        return sorted(
            statements,
            key=lambda s: (s.subject, sorted(target_sort_key(t) for t in s.terms)),
        )

    def _refuted(self, subject: NodeId, target: Target) -> bool:
        return target == subject or (subject, target) in self._negatives

    def _negate(self, source: NodeId, target: Target, kind: StepKind, premises) -> None:
        if source == target or (source, target) in self._negatives:
            return
        atom = CausalAtom(source, target)
        trace = DerivationTrace(kind, f"neg {atom}", tuple(premises))
        self._enqueue([CausalStatement.negation(atom, trace)])

    def _eliminate(self, subject: NodeId, terms: FrozenSet[Target], trace: DerivationTrace):
        """Drop refuted terms; returns the remaining terms and the wrapped trace."""
        refuted = sorted(
            (t for t in terms if (subject, t) in self._negatives), key=target_sort_key
        )
        if not refuted:
            return terms, trace
        remaining = terms - set(refuted)
        negations = [self._negatives[(subject, t)] for t in refuted]
        if not remaining:
            raise InconsistentInputError(
                f"every term of {_describe(subject, terms)} is refuted by "
                + "; ".join(str(n) for n in negations),
                [trace] + [n.trace for n in negations],
            )
        wrapped = DerivationTrace(
            StepKind.REDUCE_ELIMINATE,
            _describe(subject, remaining),
            (trace, *(n.trace for n in negations)),
        )
        return remaining, wrapped

    def _insert_negative(self, negation: CausalStatement) -> None:
        atom = negation.atom
        subject, target = atom.source, atom.target
        key = (subject, target)
        if key in self._negatives:
            return
        if key in self._facts:
            fact = self._facts[key]
            raise InconsistentInputError(
                f"{fact} contradicts {negation}", [fact.trace, negation.trace]
            )
        self._negatives[key] = negation
        self._neg_by_subject.setdefault(subject, {})[target] = None
        self._neg_by_target.setdefault(target, {})[subject] = None
        logger.debug("Added %s", negation)

        for live_key in list(self._by_subject.get(subject, ())):
            statement = self._live[live_key]
            if target in statement.terms:
                remaining, trace = self._eliminate(subject, statement.terms, statement.trace)
                self._enqueue([_statement(subject, remaining, trace)])

        # x => y and not x => t: y cannot cause t either.
        for fact_target in list(self._facts_of(subject)):
            if isinstance(fact_target, NodeId) and fact_target != target:
                self._negate(
                    fact_target,
                    target,
                    StepKind.REDUCE_TRANSITIVE,
                    (self._facts[(subject, fact_target)].trace, negation.trace),
                )

        for live_key in list(self._containing.get(target, ())):
            statement = self._live[live_key]
            if statement.subject != subject:
                self._modus_tollens(subject, statement)

    def _insert_disjunct(self, statement: CausalStatement) -> None:
        subject = statement.subject
        terms, trace = self._eliminate(subject, statement.terms, statement.trace)
        if trace is not statement.trace:
            statement = _statement(subject, terms, trace)

        superseded = []
        for live_key in self._by_subject.get(subject, ()):
            existing = self._live[live_key]
            if existing.terms <= terms:
                return
            if terms < existing.terms:
                superseded.append(live_key)
        for live_key in superseded:
            self._retire(live_key)

        key = (subject, terms)
        self._live[key] = statement
        self._by_subject.setdefault(subject, {})[key] = None
        for term in terms:
            self._containing.setdefault(term, {})[key] = None
        logger.debug("Added %s", statement)

        if statement.is_fact:
            self._on_fact(statement)

        for b in sorted(statement.targets):
            for live_key in list(self._by_subject.get(b, ())):
                self._substitute(statement, b, self._live[live_key])
        for live_key in list(self._containing.get(subject, ())):
            other = self._live.get(live_key)
            if other is not None and other is not statement:
                self._substitute(other, subject, statement)

        for a in sorted(self._nodes):
            if a != subject:
                self._modus_tollens(a, statement)

    def _on_fact(self, fact: CausalStatement) -> None:
        subject, target = fact.atom.source, fact.atom.target
        self._facts[(subject, target)] = fact
        if isinstance(target, NodeId):
            self._negate(target, subject, StepKind.REDUCE_ACYCLIC, (fact.trace,))
            # not y => c given x => y: nothing x causes reaches c
            for c in list(self._neg_by_subject.get(subject, ())):
                if c != target:
                    self._negate(
                        target,
                        c,
                        StepKind.REDUCE_TRANSITIVE,
                        (fact.trace, self._negatives[(subject, c)].trace),
                    )
        for c in list(self._neg_by_target.get(target, ())):
            if c != subject:
                self._negate(
                    c,
                    subject,
                    StepKind.REDUCE_TRANSITIVE,
                    (fact.trace, self._negatives[(c, target)].trace),
                )

    def _facts_of(self, subject: NodeId) -> List[Target]:
        return [
            self._live[key].atom.target
            for key in self._by_subject.get(subject, ())
            if self._live[key].is_fact
        ]

    def _substitute(self, d1: CausalStatement, b: NodeId, d2: CausalStatement) -> None:
        """Replace the term ``a => b`` of d1 by the terms of d2 (subject b)."""
        a = d1.subject
        kind = StepKind.REDUCE_TRANSITIVE if d1.is_fact and d2.is_fact else StepKind.SUBSTITUTE
        combined = (d1.terms - {b}) | d2.terms
        trace = DerivationTrace(kind, _describe(a, combined), (d1.trace, d2.trace))
        if a in combined:
            combined = combined - {a}
            if not combined:
                raise InconsistentInputError(
                    f"{d1} and {d2} form a causal cycle", [d1.trace, d2.trace]
                )
            trace = DerivationTrace(
                StepKind.REDUCE_IRREFLEXIVE, _describe(a, combined), (trace,)
            )
        terms, trace = self._eliminate(a, combined, trace)
        n_nodes = sum(1 for t in terms if isinstance(t, NodeId))
        if n_nodes > 2 and not self.keep_wide:
            logger.debug("Discarded wide result %s", _describe(a, terms))
            return
        self._enqueue([_statement(a, terms, trace)])

    def _modus_tollens(self, a: NodeId, statement: CausalStatement) -> None:
        """If a refutes every consequence of ``b => ...``, then not a => b."""
        b = statement.subject
        if (a, b) in self._negatives:
            return
        if all(self._refuted(a, t) for t in statement.terms):
            premises = [statement.trace] + [
                self._negatives[(a, t)].trace for t in statement.terms if t != a
            ]
            kind = StepKind.REDUCE_ACYCLIC if statement.terms == {a} else StepKind.REDUCE_TRANSITIVE
            self._negate(a, b, kind, premises)

    def _retire(self, key: LiveKey) -> None:
        statement = self._live.pop(key)
        del self._by_subject[key[0]][key]
        for term in key[1]:
            del self._containing[term][key]
        self._retired.append(statement)
        logger.debug("Retired %s", statement)


def _statement(subject: NodeId, terms: FrozenSet[Target], trace: DerivationTrace) -> CausalStatement:
    targets = frozenset(t for t in terms if isinstance(t, NodeId))
    return CausalStatement.disjunction(subject, targets, SELECTION in terms, trace)


def _describe(subject: NodeId, terms: Iterable[Target]) -> str:
    """Render a term set as a statement line even when it is not canonical."""
    terms = sorted(terms, key=target_sort_key)
    if len(terms) == 1:
        return f"fact {subject} => {terms[0]}"
    nodes = ",".join(str(t) for t in terms if not isinstance(t, SelectionMarker))
    text = f"disj {subject} => {{{nodes}}}"
    if SELECTION in terms:
        text += " + S"
    return text
