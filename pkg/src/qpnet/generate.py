"""Seeded random binary Bayesian networks for fixtures and property suites."""
from __future__ import annotations

import itertools
import random
import string
from typing import Optional

from .errors import QpnError
from .oracle import BinaryBayesNet, influence_sign
from .signs import AMBIGUOUS

MAX_GENERATED_NODES = 12

# CPT probabilities stay away from 0 and 1 so that no evidence combination has
# zero probability and conditional queries are always well defined.
_P_LOW, _P_HIGH = 0.05, 0.95


def random_bayes_net(
    seed: int,
    node_count: int,
    *,
    edge_probability: float = 0.45,
    force_nonmonotone: bool = False,
    max_attempts: int = 500,
) -> BinaryBayesNet:
    """Deterministic random DAG with random CPTs over `node_count` binary nodes.

    With `force_nonmonotone`, rejection-sample until at least one arc has a
    non-monotonic influence.
    """
    if node_count < 1 or node_count > MAX_GENERATED_NODES:
        raise QpnError(
            f"node count must be between 1 and {MAX_GENERATED_NODES}, got {node_count}"
        )
    rng = random.Random(seed)
    for _ in range(max_attempts):
        bn = _sample(rng, node_count, edge_probability)
        if not force_nonmonotone or _has_nonmonotone_arc(bn):
            return bn
    raise QpnError(
        f"no non-monotonic influence found in {max_attempts} samples for seed {seed}"
    )


def _sample(rng: random.Random, node_count: int, edge_probability: float) -> BinaryBayesNet:
    names = list(string.ascii_uppercase[:node_count])
    order = list(names)
    rng.shuffle(order)
    parents: dict[str, list[str]] = {n: [] for n in names}
    for i, j in itertools.combinations(range(node_count), 2):
        if rng.random() < edge_probability:
            parents[order[j]].append(order[i])
    cpts = {}
    for node in names:
        parents[node].sort()
        rows = {
            values: rng.uniform(_P_LOW, _P_HIGH)
            for values in itertools.product((False, True), repeat=len(parents[node]))
        }
        cpts[node] = rows
    return BinaryBayesNet(parents, cpts)


def _has_nonmonotone_arc(bn: BinaryBayesNet) -> bool:
    return any(
        influence_sign(bn, tail, head) is AMBIGUOUS
        for head in bn.nodes
        for tail in bn.parents[head]
    )
