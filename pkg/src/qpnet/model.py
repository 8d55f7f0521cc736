"""Qualitative network data model: DAG, per-arc influences, additive synergies.

Node identifiers are plain non-empty strings; wherever iteration order is
observable the nodes are visited in lexicographic order so that runs are
reproducible.
"""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .errors import ArcError
from .signs import AMBIGUOUS, Sign

NodeId = str
Arc = tuple[NodeId, NodeId]


@dataclass(frozen=True)
class RegularInfluence:
    """A fixed qualitative influence along an arc."""

    sign: Sign


@dataclass(frozen=True)
class SituationalInfluence:
    """A non-monotonic influence annotated with its sign in the current network state.

    `current` is the sign valid for the present distribution over the arc's
    co-parents.  `provokers` are the co-parents whose observation reduces the
    influence to a fixed monotonic one; an empty declaration means "default",
    i.e. all co-parents.  Once `reduced` is set it permanently takes over the
    arc's role in propagation.
    """

    current: Sign
    provokers: frozenset[NodeId] = frozenset()
    reduced: Optional[Sign] = None


Influence = RegularInfluence | SituationalInfluence


@dataclass(frozen=True)
class AdditiveSynergy:
    """Sign of the interaction of an unordered parent pair on a common child."""

    pair: frozenset[NodeId]
    child: NodeId
    sign: Sign


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


class QpnNetwork:
    """A qualitative probabilistic network over binary variables.

    Immutable after construction; inference runs copy the influence table they
    may rewrite and build a new network via `with_arcs`.
    """

    def __init__(
        self,
        nodes: Iterable[NodeId],
        arcs: Mapping[Arc, Influence],
        synergies: Iterable[AdditiveSynergy] = (),
    ) -> None:
        self.nodes: tuple[NodeId, ...] = tuple(sorted(set(nodes)))
        self.arcs: dict[Arc, Influence] = dict(arcs)
        self.synergies: tuple[AdditiveSynergy, ...] = tuple(synergies)
        self._parents: dict[NodeId, list[NodeId]] = {n: [] for n in self.nodes}
        self._children: dict[NodeId, list[NodeId]] = {n: [] for n in self.nodes}
        for tail, head in sorted(self.arcs):
            if head in self._parents:
                self._parents[head].append(tail)
            if tail in self._children:
                self._children[tail].append(head)
        for lst in self._parents.values():
            lst.sort()
        for lst in self._children.values():
            lst.sort()
        self._synergy_index: dict[tuple[frozenset[NodeId], NodeId], Sign] = {}
        for syn in self.synergies:
            key = (syn.pair, syn.child)
            self._synergy_index.setdefault(key, syn.sign)

    def with_arcs(self, arcs: Mapping[Arc, Influence]) -> "QpnNetwork":
        return QpnNetwork(self.nodes, arcs, self.synergies)

    def parents(self, node: NodeId) -> list[NodeId]:
        return list(self._parents.get(node, []))

    def children(self, node: NodeId) -> list[NodeId]:
        return list(self._children.get(node, []))

    def neighbours(self, node: NodeId) -> list[NodeId]:
        return sorted(set(self._parents.get(node, [])) | set(self._children.get(node, [])))

    def has_arc(self, arc: Arc) -> bool:
        return arc in self.arcs

    def influence(self, arc: Arc) -> Influence:
        try:
            return self.arcs[arc]
        except KeyError:
            raise ArcError(f"no arc {arc[0]}->{arc[1]}") from None

    def effective_link_sign(self, arc: Arc) -> Sign:
        """The plain sign an arc currently contributes to propagation.

        Regular arcs return their sign; situational arcs return the reduced
        sign once fixed, else the current situational sign.
        """
        influence = self.influence(arc)
        if isinstance(influence, RegularInfluence):
            return influence.sign
        if influence.reduced is not None:
            return influence.reduced
        return influence.current

    def co_parents(self, arc: Arc) -> list[NodeId]:
        """All parents of the arc's head except its tail, sorted."""
        tail, head = arc
        if not self.has_arc(arc):
            raise ArcError(f"no arc {tail}->{head}")
        return [p for p in self._parents[head] if p != tail]

    def provokers_of(self, arc: Arc) -> list[NodeId]:
        """Declared provoker set of a situational arc, defaulting to all co-parents."""
        influence = self.influence(arc)
        if not isinstance(influence, SituationalInfluence):
            raise ArcError(f"arc {arc[0]}->{arc[1]} is not situational")
        if influence.provokers:
            return sorted(influence.provokers)
        return self.co_parents(arc)

    def synergy_sign(self, pair: frozenset[NodeId], child: NodeId) -> Sign:
        """Declared synergy sign for a parent pair on a child; absent means ambiguous."""
        return self._synergy_index.get((pair, child), AMBIGUOUS)

    def situational_arcs(self) -> list[Arc]:
        """Arcs still carrying an unreduced situational influence, sorted."""
        return sorted(
            arc
            for arc, inf in self.arcs.items()
            if isinstance(inf, SituationalInfluence) and inf.reduced is None
        )


def validate(net: QpnNetwork) -> ValidationReport:
    """Structural validation: acyclicity, reference integrity, provoker and synergy shape."""
    report = ValidationReport()
    known = set(net.nodes)
    for node in net.nodes:
        if not node:
            report.problems.append("empty node identifier")
    for (tail, head) in sorted(net.arcs):
        if tail not in known:
            report.problems.append(f"arc {tail}->{head}: unknown tail node {tail!r}")
        if head not in known:
            report.problems.append(f"arc {tail}->{head}: unknown head node {head!r}")
        if tail == head:
            report.problems.append(f"arc {tail}->{head}: self loop")

    sorter = graphlib.TopologicalSorter({n: [] for n in net.nodes})
    for (tail, head) in net.arcs:
        if tail in known and head in known:
            sorter.add(head, tail)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        report.problems.append("cycle: " + " -> ".join(cycle))

    for (tail, head), influence in sorted(net.arcs.items()):
        if not isinstance(influence, SituationalInfluence):
            continue
        if tail not in known or head not in known:
            continue
        co = set(net.co_parents((tail, head)))
        extra = influence.provokers - co
        if extra:
            report.problems.append(
                f"arc {tail}->{head}: provokers not co-parents: {', '.join(sorted(extra))}"
            )

    seen_synergies: set[tuple[frozenset[NodeId], NodeId]] = set()
    for syn in net.synergies:
        names = sorted(syn.pair)
        label = f"synergy {{{', '.join(names)}}} on {syn.child}"
        if len(syn.pair) != 2:
            report.problems.append(f"{label}: pair must have exactly two nodes")
            continue
        missing = [n for n in [*names, syn.child] if n not in known]
        if missing:
            report.problems.append(f"{label}: unknown node {', '.join(missing)}")
            continue
        parents = set(net.parents(syn.child))
        if not syn.pair <= parents:
            report.problems.append(f"{label}: pair members are not both parents of {syn.child}")
        key = (syn.pair, syn.child)
        if key in seen_synergies:
            report.problems.append(f"{label}: duplicate")
        seen_synergies.add(key)

    return report
