"""Augmented FCI: skeleton search and orientation rules R0a-R10.

Used as the reference the logical pipeline is checked against, so the
rules follow their graphical definitions literally and every mark change
is logged.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from src.discovery.paths import (
    find_discriminating_path,
    find_uncovered_circle_path,
    find_uncovered_pd_path,
)
from src.errors import RuleConflictError
from src.graphs.text_format import format_edge
from src.models.graph import EndMark, MixedGraph, NodeId, Path
from src.oracles.base_oracle import IndependenceOracle
from src.oracles.caching_oracle import CachingOracle
from src.oracles.search import find_minimal_independence

logger = logging.getLogger(__name__)

PHASE_SKELETON = 0
PHASE_ARROWHEADS = 1
PHASE_CIRCLE_PATHS = 2
PHASE_SELECTION_TAILS = 3
PHASE_TAILS = 4

COVERAGE_GROUPS = ("R0b", "R1", "R2", "R3", "R4a", "R4b", "R5", "R6", "R7", "R8", "R9", "R10")
LOG_EXCERPT = 10

Change = Tuple[NodeId, NodeId, EndMark]


class SepsetTable:
    """Separating set recorded for each separated unordered pair."""

    def __init__(self):
        self._sets: Dict[FrozenSet[NodeId], FrozenSet[NodeId]] = {}

    def record(self, x: NodeId, y: NodeId, z: Iterable[NodeId]) -> None:
        self._sets[frozenset((x, y))] = frozenset(z)

    def get(self, x: NodeId, y: NodeId) -> Optional[FrozenSet[NodeId]]:
        return self._sets.get(frozenset((x, y)))

    def separated(self, x: NodeId, y: NodeId) -> bool:
        return frozenset((x, y)) in self._sets

    def items(self) -> List[Tuple[Tuple[NodeId, NodeId], FrozenSet[NodeId]]]:
        return sorted((tuple(sorted(pair)), z) for pair, z in self._sets.items())

    def __len__(self) -> int:
        return len(self._sets)


@dataclass(frozen=True)
class RuleApplication:
    """One logged rule firing."""

    rule: str
    phase: int
    text: str
    edge: Tuple[NodeId, NodeId]
    path: Optional[Path] = None

    def __str__(self) -> str:
        return self.text


@dataclass
class FciState:
    """Working PAG; marks only ever move from circle to tail or arrowhead."""

    graph: MixedGraph
    sepsets: SepsetTable
    log: List[RuleApplication] = field(default_factory=list)
    phase: int = PHASE_SKELETON

    def apply(
        self,
        rule: str,
        changes: Sequence[Change],
        edge: Tuple[NodeId, NodeId],
        path: Optional[Path] = None,
    ) -> bool:
        """Set every mark in ``changes``; log once if anything changed.

        Raises:
            RuleConflictError: A committed (non-circle) mark would be overwritten.
        """
        pending = []
        for at, other, mark in changes:
            current = self.graph.mark(at, other)
            if current is mark:
                continue
            if current is not EndMark.CIRCLE:
                raise RuleConflictError(
                    f"{rule} tried to set {mark.name.lower()} at {at} on "
                    f"{self.describe(*edge)}, which already has {current.name.lower()}",
                    [str(entry) for entry in self.log[-LOG_EXCERPT:]],
                )
            pending.append((at, other, mark))
        if not pending:
            return False
        for at, other, mark in pending:
            self.graph = self.graph.with_mark(at, other, mark)
        text = f"{rule}: orient {self.describe(*edge)}"
        if path is not None:
            text += f" (path {path})"
        self.log.append(RuleApplication(rule, self.phase, text, edge, path))
        logger.debug(text)
        return True

    def describe(self, a: NodeId, b: NodeId) -> str:
        return format_edge(a, b, self.graph.mark(a, b), self.graph.mark(b, a))

    def circle(self, at: NodeId, other: NodeId) -> bool:
        return self.graph.mark(at, other) is EndMark.CIRCLE

    def arrow(self, at: NodeId, other: NodeId) -> bool:
        return self.graph.mark(at, other) is EndMark.ARROW

    def tail(self, at: NodeId, other: NodeId) -> bool:
        return self.graph.mark(at, other) is EndMark.TAIL


@dataclass
class FciResult:
    pag: MixedGraph
    sepsets: SepsetTable
    log: List[RuleApplication]
    oracle_query_count: int = 0

    def log_lines(self) -> List[str]:
        return [str(entry) for entry in self.log]


def run_fci(
    oracle: IndependenceOracle,
    max_cond: Optional[int] = None,
    shuffle_seed: Optional[int] = None,
) -> FciResult:
    """Skeleton by minimum-cardinality search, then the orientation phases.

    Args:
        oracle: Any independence oracle.
        max_cond: Largest separating set searched.
        shuffle_seed: Permute edge order inside every sweep; the output PAG
            must not depend on it.

    Raises:
        RuleConflictError: A rule contradicted an earlier orientation.
    """
    cache = oracle if isinstance(oracle, CachingOracle) else CachingOracle(oracle)
    observed = tuple(cache.observed)
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    logger.info("FCI over %d variables (%s)", len(observed), cache.source_name())

    sepsets = SepsetTable()
    complete = [(a, b, EndMark.CIRCLE, EndMark.CIRCLE) for a, b in combinations(observed, 2)]
    state = FciState(MixedGraph(observed, complete), sepsets)

    for x, y in combinations(observed, 2):
        fact = find_minimal_independence(cache, x, y, max_cond)
        if fact is None:
            continue
        sepsets.record(x, y, fact.z)
        state.graph = state.graph.without_edge(x, y)
        separator = ",".join(n.label for n in sorted(fact.z))
        text = f"R0a: remove {x} - {y} (sepset {{{separator}}})"
        state.log.append(RuleApplication("R0a", PHASE_SKELETON, text, (x, y)))

    engine = _RuleEngine(state, rng)
    engine.orient_unshielded_colliders()
    engine.fixpoint(PHASE_ARROWHEADS, (engine.r1, engine.r2, engine.r3, engine.r4))
    engine.fixpoint(PHASE_CIRCLE_PATHS, (engine.r5,))
    engine.fixpoint(PHASE_SELECTION_TAILS, (engine.r6, engine.r7))
    engine.fixpoint(PHASE_TAILS, (engine.r8, engine.r9, engine.r10))

    logger.info(
        "FCI done: %d sepsets, %d rule applications, %d oracle queries",
        len(sepsets),
        len(state.log),
        cache.query_count,
    )
    return FciResult(state.graph, sepsets, state.log, cache.query_count)


def rule_coverage(logs: Iterable[Sequence[RuleApplication]]) -> Dict[str, int]:
    """Count firings per coverage group; R2a/R2b fold into R2, R8a/R8b into R8."""
    counts = {group: 0 for group in COVERAGE_GROUPS}
    for log in logs:
        for entry in log:
            group = entry.rule
            if group in ("R2a", "R2b", "R8a", "R8b"):
                group = group[:-1]
            if group in counts:
                counts[group] += 1
    return counts


# ----------------------------------------------------------------------
# Internal helpers
# ----------------------------------------------------------------------


class _RuleEngine:
    """Table-order rule sweeps over the working state.

    Each rule method looks at one ordered pair (the edge it may orient)
    and re-reads marks from the current graph.
    """

    def __init__(self, state: FciState, rng: Optional[random.Random]):
        self.state = state
        self.rng = rng

    @property
    def g(self) -> MixedGraph:
        return self.state.graph

    def ordered_pairs(self) -> List[Tuple[NodeId, NodeId]]:
        pairs = []
        for a, b, _, _ in self.g.edges():
            pairs.extend(((a, b), (b, a)))
        if self.rng is not None:
            self.rng.shuffle(pairs)
        return pairs

    def fixpoint(self, phase: int, rules) -> None:
        self.state.phase = phase
        changed = True
        while changed:
            changed = False
            for rule in rules:
                for a, b in self.ordered_pairs():
                    changed |= rule(a, b)

    def orient_unshielded_colliders(self) -> None:
        """R0b: X *-> Z <-* Y for unshielded X *-* Z *-* Y with Z outside Sep(X, Y)."""
        self.state.phase = PHASE_ARROWHEADS
        for x, y in combinations(self.g.nodes, 2):
            if self.g.adjacent(x, y):
                continue
            sepset = self.state.sepsets.get(x, y) or frozenset()
            for z in sorted(set(self.g.neighbors(x)) & set(self.g.neighbors(y))):
                if z in sepset:
                    continue
                triple = Path((x, z, y))
                self.state.apply("R0b", [(z, x, EndMark.ARROW)], (x, z), triple)
                self.state.apply("R0b", [(z, y, EndMark.ARROW)], (y, z), triple)

    # -- arrowhead rules -------------------------------------------------

    def r1(self, beta: NodeId, gamma: NodeId) -> bool:
        """alpha *-> beta o-* gamma, alpha and gamma nonadjacent: beta -> gamma."""
        s, g = self.state, self.g
        if not s.circle(beta, gamma):
            return False
        for alpha in g.neighbors(beta):
            if alpha == gamma or not s.arrow(beta, alpha) or g.adjacent(alpha, gamma):
                continue
            return s.apply(
                "R1",
                [(beta, gamma, EndMark.TAIL), (gamma, beta, EndMark.ARROW)],
                (beta, gamma),
                Path((alpha, beta, gamma)),
            )
        return False

    def r2(self, alpha: NodeId, gamma: NodeId) -> bool:
        """alpha -> beta *-> gamma or alpha *-> beta -> gamma, alpha *-o gamma: alpha *-> gamma."""
        s, g = self.state, self.g
        if not s.circle(gamma, alpha):
            return False
        for beta in g.neighbors(alpha):
            if beta == gamma or not g.adjacent(beta, gamma):
                continue
            if g.is_directed(alpha, beta) and s.arrow(gamma, beta):
                rule = "R2a"
            elif s.arrow(beta, alpha) and g.is_directed(beta, gamma):
                rule = "R2b"
            else:
                continue
            return s.apply(
                rule, [(gamma, alpha, EndMark.ARROW)], (alpha, gamma), Path((alpha, beta, gamma))
            )
        return False

    def r3(self, theta: NodeId, beta: NodeId) -> bool:
        """alpha *-> beta <-* gamma, alpha *-o theta o-* gamma, theta *-o beta: theta *-> beta."""
        s, g = self.state, self.g
        if not s.circle(beta, theta):
            return False
        candidates = [
            n
            for n in g.neighbors(beta)
            if n != theta and g.adjacent(n, theta) and s.arrow(beta, n) and s.circle(theta, n)
        ]
        for alpha, gamma in combinations(candidates, 2):
            if g.adjacent(alpha, gamma):
                continue
            return s.apply(
                "R3", [(beta, theta, EndMark.ARROW)], (theta, beta), Path((alpha, theta, gamma))
            )
        return False

    def r4(self, beta: NodeId, gamma: NodeId) -> bool:
        """Discriminating path <theta, ..., alpha, beta, gamma> for beta, beta o-* gamma."""
        s = self.state
        if not s.circle(beta, gamma):
            return False
        path = find_discriminating_path(self.g, beta, gamma)
        if path is None:
            return False
        theta, alpha = path.nodes[0], path.nodes[-3]
        if beta in (s.sepsets.get(theta, gamma) or frozenset()):
            return s.apply(
                "R4a",
                [(beta, gamma, EndMark.TAIL), (gamma, beta, EndMark.ARROW)],
                (beta, gamma),
                path,
            )
        changed = s.apply("R4b", [(beta, alpha, EndMark.ARROW)], (alpha, beta), path)
        changed |= s.apply(
            "R4b",
            [(beta, gamma, EndMark.ARROW), (gamma, beta, EndMark.ARROW)],
            (beta, gamma),
            path,
        )
        return changed

    # -- selection rules -------------------------------------------------

    def r5(self, alpha: NodeId, beta: NodeId) -> bool:
        """alpha o-o beta closing an uncovered circle path: every edge becomes undirected."""
        s = self.state
        if alpha > beta or not (s.circle(alpha, beta) and s.circle(beta, alpha)):
            return False
        path = find_uncovered_circle_path(self.g, (alpha, beta))
        if path is None:
            return False
        changes = [(alpha, beta, EndMark.TAIL), (beta, alpha, EndMark.TAIL)]
        for a, b in zip(path.nodes, path.nodes[1:]):
            changes.extend(((a, b, EndMark.TAIL), (b, a, EndMark.TAIL)))
        return s.apply("R5", changes, (alpha, beta), path)

    def r6(self, beta: NodeId, gamma: NodeId) -> bool:
        """alpha -- beta o-* gamma: beta -* gamma."""
        s, g = self.state, self.g
        if not s.circle(beta, gamma):
            return False
        for alpha in g.neighbors(beta):
            if alpha != gamma and s.tail(alpha, beta) and s.tail(beta, alpha):
                return s.apply(
                    "R6", [(beta, gamma, EndMark.TAIL)], (beta, gamma), Path((alpha, beta, gamma))
                )
        return False

    def r7(self, beta: NodeId, gamma: NodeId) -> bool:
        """alpha -o beta o-* gamma, alpha and gamma nonadjacent: beta -* gamma."""
        s, g = self.state, self.g
        if not s.circle(beta, gamma):
            return False
        for alpha in g.neighbors(beta):
            if alpha == gamma or g.adjacent(alpha, gamma):
                continue
            if s.tail(alpha, beta) and s.circle(beta, alpha):
                return s.apply(
                    "R7", [(beta, gamma, EndMark.TAIL)], (beta, gamma), Path((alpha, beta, gamma))
                )
        return False

    # -- tail rules ------------------------------------------------------

    def _circle_arrow(self, alpha: NodeId, gamma: NodeId) -> bool:
        return self.state.circle(alpha, gamma) and self.state.arrow(gamma, alpha)

    def r8(self, alpha: NodeId, gamma: NodeId) -> bool:
        """alpha -> beta -> gamma or alpha -o beta -> gamma, alpha o-> gamma: alpha -> gamma."""
        s, g = self.state, self.g
        if not self._circle_arrow(alpha, gamma):
            return False
        for beta in g.neighbors(alpha):
            if beta == gamma or not g.is_directed(beta, gamma):
                continue
            if g.is_directed(alpha, beta):
                rule = "R8a"
            elif s.tail(alpha, beta) and s.circle(beta, alpha):
                rule = "R8b"
            else:
                continue
            return s.apply(
                rule, [(alpha, gamma, EndMark.TAIL)], (alpha, gamma), Path((alpha, beta, gamma))
            )
        return False

    def r9(self, alpha: NodeId, gamma: NodeId) -> bool:
        """alpha o-> gamma and an uncovered p.d. path <alpha, beta, ..., gamma>, beta and gamma nonadjacent."""
        g = self.g
        if not self._circle_arrow(alpha, gamma):
            return False
        for beta in g.neighbors(alpha):
            if beta == gamma or g.adjacent(beta, gamma):
                continue
            path = find_uncovered_pd_path(g, alpha, gamma, first=beta)
            if path is not None:
                return self.state.apply("R9", [(alpha, gamma, EndMark.TAIL)], (alpha, gamma), path)
        return False

    def r10(self, alpha: NodeId, gamma: NodeId) -> bool:
        """alpha o-> gamma <- beta, theta -> gamma, with p.d. paths to beta and theta
        leaving alpha through distinct nonadjacent nodes."""
        g = self.g
        if not self._circle_arrow(alpha, gamma):
            return False
        parents = [n for n in g.neighbors(gamma) if n != alpha and g.is_directed(n, gamma)]
        if len(parents) < 2:
            return False
        starts = [n for n in g.neighbors(alpha) if n != gamma]
        reach: Dict[NodeId, List[Tuple[NodeId, Path]]] = {p: [] for p in parents}
        for p in parents:
            for first in starts:
                path = find_uncovered_pd_path(g, alpha, p, first=first)
                if path is not None:
                    reach[p].append((first, path))
        for beta, theta in combinations(parents, 2):
            for mu, p1 in reach[beta]:
                for omega, p2 in reach[theta]:
                    if mu != omega and not g.adjacent(mu, omega):
                        return self.state.apply(
                            "R10", [(alpha, gamma, EndMark.TAIL)], (alpha, gamma), p1
                        )
        return False
