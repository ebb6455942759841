"""Seeded random causal DAGs with latent confounders and selection nodes"""
import random
from dataclasses import dataclass

from src.errors import InvalidArgumentError
from src.models.graph import CausalDag


@dataclass(frozen=True)
class DagSpec:
    """Shape of one random DAG.

    Fields:
        n_observed: Observed variables, labelled X0, X1, ...
        n_latent: Latent variables, labelled L0, L1, ...
        n_selection: Selection variables, labelled Sel0, Sel1, ...
        edge_probability: Chance of each forward edge between ordinary nodes.
        latent_child_boost: Added to the edge chance out of a latent node, so
            latents tend to have two or more children and actually confound.
        selection_sinks: Selection nodes get parents only. With ``False`` a
            selection node may also have observed children.
    """

    n_observed: int
    n_latent: int = 0
    n_selection: int = 0
    edge_probability: float = 0.35
    latent_child_boost: float = 0.3
    selection_sinks: bool = True

    def __post_init__(self):
        if self.n_observed < 1:
            raise InvalidArgumentError("a DAG needs at least one observed node")
        if self.n_latent < 0 or self.n_selection < 0:
            raise InvalidArgumentError("node counts must be non-negative")
        if not 0.0 <= self.edge_probability <= 1.0:
            raise InvalidArgumentError(
                f"edge_probability must lie in [0, 1], got {self.edge_probability}"
            )


def random_dag(spec: DagSpec, seed: int) -> CausalDag:
    """Draw a DAG; the same (spec, seed) always gives the same graph.

    Observed and latent nodes are placed in one random topological order and
    edges only run forward in it, so the result is acyclic by construction.
    Each selection node draws its parents from all ordinary nodes and gets at
    least one.
    """
    rng = random.Random(seed)
    observed = [f"X{i}" for i in range(spec.n_observed)]
    latent = [f"L{i}" for i in range(spec.n_latent)]
    selection = [f"Sel{i}" for i in range(spec.n_selection)]

    order = list(observed)
    for label in latent:
        order.insert(rng.randint(0, len(order)), label)
    latent_set = set(latent)

    edges = []
    for i, parent in enumerate(order):
        chance = spec.edge_probability
        if parent in latent_set:
            chance = min(1.0, chance + spec.latent_child_boost)
        for child in order[i + 1:]:
            if rng.random() < chance:
                edges.append((parent, child))

    for sel in selection:
        parents = [n for n in order if rng.random() < spec.edge_probability]
        if not parents:
            parents = [rng.choice(order)]
        edges.extend((p, sel) for p in parents)
        if not spec.selection_sinks:
            # children only among observed nodes that are not its ancestors
            ancestors = _ancestor_labels(edges, sel)
            for child in observed:
                if child not in ancestors and rng.random() < spec.edge_probability:
                    edges.append((sel, child))

    return CausalDag.build(observed, latent, selection, edges)


def _ancestor_labels(edges, node):
    parents = {}
    for a, b in edges:
        parents.setdefault(b, []).append(a)
    seen, stack = set(), [node]
    while stack:
        for p in parents.get(stack.pop(), ()):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen
