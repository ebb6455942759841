"""DAG to MAG projection over the observed nodes"""
import logging
from itertools import combinations

from src.errors import InvalidArgumentError
from src.graphs.separation import ancestors, ancestors_of_set, d_separated
from src.models.graph import CausalDag, EndMark, MixedGraph

logger = logging.getLogger(__name__)


def project_to_mag(dag: CausalDag) -> MixedGraph:
    """Marginalize latent nodes and condition on selection nodes.

    Two observed nodes are adjacent iff no set of other observed nodes,
    together with the selection nodes, d-separates them. The mark at X on
    X-Y is a tail iff X is an ancestor of Y or of a selection node.

    Raises:
        InvalidArgumentError: Observed nodes do not hold indices 0..m-1.
    """
    observed = dag.observed
    if [n.index for n in observed] != list(range(len(observed))):
        raise InvalidArgumentError("observed nodes must carry the lowest indices")
    selection = frozenset(dag.selection)
    anc_selection = ancestors_of_set(dag, selection)

    edges = []
    for x, y in combinations(observed, 2):
        if _separable(dag, x, y, selection):
            continue
        mark_x = _mark(dag, x, y, anc_selection)
        mark_y = _mark(dag, y, x, anc_selection)
        edges.append((x, y, mark_x, mark_y))

    logger.debug(
        "Projected %d observed nodes (%d latent, %d selection) to %d MAG edges",
        len(observed), len(dag.latent), len(selection), len(edges),
    )
    return MixedGraph(observed, edges)


def _separable(dag, x, y, selection) -> bool:
    others = [n for n in dag.observed if n not in (x, y)]
    for size in range(len(others) + 1):
        for z in combinations(others, size):
            if d_separated(dag, x, y, selection.union(z)):
                return True
    return False


def _mark(dag, at, other, anc_selection) -> EndMark:
    if at in anc_selection or at in ancestors(dag, other):
        return EndMark.TAIL
    return EndMark.ARROW
