"""Sign propagation with situational-sign verification, restarts, and provoker reduction.

One observation is processed at a time.  Before propagating, every situational
arc whose provokers are all observed is reduced to a regular arc.  During
propagation, whenever the node sign of a situational arc's co-parent changes,
the arc's current sign is re-verified against the co-parent signs and the
additive synergies; if it changes, the whole propagation restarts on the
adapted network.  Node signs always refer to the newest observation only.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ArcError, InvariantViolation, ObservationError
from .model import Arc, Influence, NodeId, QpnNetwork, RegularInfluence, SituationalInfluence
from .signs import AMBIGUOUS, MINUS, PLUS, ZERO, Sign, add, add_all, product


@dataclass(frozen=True)
class TraceEvent:
    """One step of the deterministic inference transcript."""

    kind: str  # reduce | msg | node | verify-keep | verify-update | restart
    arc: Optional[Arc] = None
    node: Optional[NodeId] = None
    before: Optional[Sign] = None
    message: Optional[Sign] = None
    after: Optional[Sign] = None
    count: Optional[int] = None

    def line(self) -> str:
        if self.kind == "reduce":
            return f"REDUCE {self.arc[0]}->{self.arc[1]} {self.after}"
        if self.kind == "msg":
            return f"MSG {self.arc[0]}->{self.arc[1]} {self.message}"
        if self.kind == "node":
            return f"NODE {self.node} {self.before}(+){self.message}={self.after}"
        if self.kind == "verify-keep":
            return f"VERIFY {self.arc[0]}->{self.arc[1]} keep {self.before}"
        if self.kind == "verify-update":
            return f"UPDATE {self.arc[0]}->{self.arc[1]} {self.before}->{self.after}"
        if self.kind == "restart":
            return f"RESTART {self.count}"
        raise ValueError(f"unknown trace event kind {self.kind!r}")


@dataclass
class InferenceState:
    """Mutable working set owned by a single observation run."""

    network: QpnNetwork  # structure only; influences live in `arcs`
    arcs: dict[Arc, Influence]
    node_signs: dict[NodeId, Sign]
    old_observations: dict[NodeId, Sign]
    observation: tuple[NodeId, Sign]
    restart_count: int = 0
    trace: list[TraceEvent] = field(default_factory=list)

    def observed(self) -> dict[NodeId, Sign]:
        out = dict(self.old_observations)
        out[self.observation[0]] = self.observation[1]
        return out

    def link_sign(self, arc: Arc) -> Sign:
        influence = self.arcs[arc]
        if isinstance(influence, RegularInfluence):
            return influence.sign
        if influence.reduced is not None:
            return influence.reduced
        return influence.current


@dataclass
class StepResult:
    """Outcome of processing one observation."""

    observed: NodeId
    sign: Sign
    node_signs: dict[NodeId, Sign]
    network: QpnNetwork
    restarts: int
    reductions: list[tuple[Arc, Sign]]
    trace: list[TraceEvent]

    def trace_lines(self) -> list[str]:
        return [event.line() for event in self.trace]


class _RestartSignal(Exception):
    pass


def verify_update(current: Sign, co_parent_effects: Iterable[tuple[Sign, Sign]]) -> Sign:
    """New situational sign after co-parent changes: fold each node sign through
    its synergy sign and absorb into the current sign; '?' means no longer known valid."""
    return add(current, add_all(product(node_sign, synergy) for node_sign, synergy in co_parent_effects))


def _situational_arcs(arcs: Mapping[Arc, Influence]) -> list[Arc]:
    return sorted(
        a
        for a, inf in arcs.items()
        if isinstance(inf, SituationalInfluence) and inf.reduced is None
    )


def _verification_targets(state: InferenceState, node: NodeId) -> list[Arc]:
    # Situational arcs into the children of `node`, exerted by its co-parents:
    # the dependency set of `node` is read as its children, so a change at
    # `node` triggers verification of every situational arc it co-parents.
    children = set(state.network.children(node))
    return [
        (tail, head)
        for (tail, head) in _situational_arcs(state.arcs)
        if head in children and tail != node
    ]


def _co_parent_set(state: InferenceState) -> set[NodeId]:
    out: set[NodeId] = set()
    for tail, head in _situational_arcs(state.arcs):
        out.update(p for p in state.network.parents(head) if p != tail)
    return out


def _reduced_sign(
    state_arcs: Mapping[Arc, Influence],
    network: QpnNetwork,
    arc: Arc,
    observed: Mapping[NodeId, Sign],
) -> Optional[Sign]:
    influence = state_arcs[arc]
    provokers = (
        sorted(influence.provokers) if influence.provokers else network.co_parents(arc)
    )
    if any(p not in observed for p in provokers):
        return None
    tail, head = arc
    return add_all(
        product(observed[p], network.synergy_sign(frozenset((tail, p)), head))
        for p in provokers
    )


def try_reduce(
    net: QpnNetwork, arc: Arc, observations: Mapping[NodeId, Sign]
) -> Optional[tuple[Sign, QpnNetwork]]:
    """Reduce a situational arc to a regular one once all its provokers are observed.

    Returns the fixed sign and the rewritten network, or None when provokers
    are still unobserved.  The fixed sign folds each observed provoker's
    evidence sign through the corresponding synergy.
    """
    influence = net.influence(arc)
    if not isinstance(influence, SituationalInfluence):
        raise ArcError(f"arc {arc[0]}->{arc[1]} is not situational")
    if influence.reduced is not None:
        raise ArcError(f"arc {arc[0]}->{arc[1]} is already reduced")
    sign = _reduced_sign(net.arcs, net, arc, observations)
    if sign is None:
        return None
    arcs = dict(net.arcs)
    arcs[arc] = RegularInfluence(sign)
    return sign, net.with_arcs(arcs)


def _fix_signs(state: InferenceState) -> list[tuple[Arc, Sign]]:
    """Reduce every situational arc whose provokers are now fully observed."""
    observed = state.observed()
    reductions = []
    for arc in _situational_arcs(state.arcs):
        sign = _reduced_sign(state.arcs, state.network, arc, observed)
        if sign is None:
            continue
        state.arcs[arc] = RegularInfluence(sign)
        state.trace.append(TraceEvent("reduce", arc=arc, after=sign))
        reductions.append((arc, sign))
    return reductions


def determine_effect_on(
    state: InferenceState, node: NodeId, delta_log: Optional[dict[Arc, int]] = None
) -> bool:
    """Verify situational arcs co-parented by `node`; returns True when a sign
    changed and propagation must restart on the adapted network."""
    if node not in _co_parent_set(state):
        return False
    changed = False
    for arc in _verification_targets(state, node):
        influence = state.arcs[arc]
        tail, head = arc
        effects = [
            (
                state.node_signs[c],
                state.network.synergy_sign(frozenset((tail, c)), head),
            )
            for c in state.network.co_parents(arc)
        ]
        new = verify_update(influence.current, effects)
        if new is influence.current:
            state.trace.append(TraceEvent("verify-keep", arc=arc, before=influence.current))
            continue
        state.trace.append(
            TraceEvent("verify-update", arc=arc, before=influence.current, after=new)
        )
        state.arcs[arc] = replace(influence, current=new)
        if delta_log is not None:
            delta_log[arc] = delta_log.get(arc, 0) + 1
            if delta_log[arc] > 1:
                raise InvariantViolation(
                    f"situational sign of {tail}->{head} changed twice"
                )
        changed = True
    return changed


def _ancestors_of_observed(state: InferenceState) -> set[NodeId]:
    seen: set[NodeId] = set()
    stack = list(state.observed())
    while stack:
        for parent in state.network.parents(stack.pop()):
            if parent not in seen:
                seen.add(parent)
                stack.append(parent)
    return seen


def eligible_neighbours(state: InferenceState, to: NodeId, trail: Sequence[NodeId]) -> list[NodeId]:
    """Neighbours of `to` reachable by extending `trail` with one active step.

    `trail` is the ordered node sequence ending in `to`.  Chains and forks
    through `to` are active (the receiving node is unobserved by
    construction); a head-to-head step at `to` is active only when `to` has an
    observed descendant, the conservative stand-in for intercausal influence.
    Observed nodes never receive messages.
    """
    observed = state.observed()
    prev = trail[-2] if len(trail) >= 2 else None
    arrived_from_parent = prev is not None and (prev, to) in state.arcs
    unblocked = to in _ancestors_of_observed(state)
    result = []
    for child in state.network.children(to):
        if child not in observed and child not in trail:
            result.append(child)
    for parent in state.network.parents(to):
        if parent in observed or parent in trail:
            continue
        if not arrived_from_parent or unblocked:
            result.append(parent)
    return sorted(result)


def _continuations(
    state: InferenceState, trail: tuple[NodeId, ...], to: NodeId
) -> list[tuple[NodeId, Sign, Optional[NodeId]]]:
    """(target, message, via) triples for every active extension of the trail.

    Normal steps carry sign[to] combined with the traversed influence.  A
    head-to-head step, whether at `to` itself or through a child of `to` that
    is observed or has an observed descendant, carries '?' because no synergy
    information signs the induced intercausal influence.
    """
    observed = state.observed()
    prev = trail[-2] if len(trail) >= 2 else None
    arrived_from_parent = prev is not None and (prev, to) in state.arcs
    unblock = _ancestors_of_observed(state)
    sign_to = state.node_signs[to]
    entries: list[tuple[NodeId, Sign, Optional[NodeId]]] = []

    for child in state.network.children(to):
        if child not in trail and child not in observed:
            entries.append((child, product(sign_to, state.link_sign((to, child))), None))
        if child not in trail and (child in observed or child in unblock):
            for other in state.network.parents(child):
                if other == to or other in observed or other in trail:
                    continue
                entries.append((other, AMBIGUOUS, child))

    for parent in state.network.parents(to):
        if parent in observed or parent in trail:
            continue
        if not arrived_from_parent:
            entries.append((parent, product(sign_to, state.link_sign((parent, to))), None))
        elif to in unblock:
            entries.append((parent, AMBIGUOUS, None))

    entries.sort(key=lambda e: (e[0], e[2] or ""))
    return entries


def _propagate(
    state: InferenceState,
    trail: tuple[NodeId, ...],
    to: NodeId,
    message: Sign,
    delta_log: Optional[dict[Arc, int]],
) -> None:
    old = state.node_signs[to]
    new = add(old, message)
    state.node_signs[to] = new
    state.trace.append(TraceEvent("node", node=to, before=old, message=message, after=new))
    trail = trail + (to,)
    if determine_effect_on(state, to, delta_log):
        raise _RestartSignal
    for target, msg, via in _continuations(state, trail, to):
        current = state.node_signs[target]
        if add(current, msg) is current:
            continue
        state.trace.append(TraceEvent("msg", arc=(to, target), message=msg))
        next_trail = trail + (via,) if via is not None else trail
        _propagate(state, next_trail, target, msg, delta_log)


def process_observation(
    net: QpnNetwork,
    old_obs: Mapping[NodeId, Sign],
    obs: tuple[NodeId, Sign],
    *,
    enable_reduction: bool = True,
    delta_log: Optional[dict[Arc, int]] = None,
) -> StepResult:
    """Enter one observation: reduce what can be reduced, then propagate signs
    until quiescence, restarting from scratch whenever a situational sign updates."""
    node, sign = obs
    if node not in net.nodes:
        raise ObservationError(f"unknown node {node!r}")
    if node in old_obs:
        raise ObservationError(f"node {node} is already observed")
    if sign not in (PLUS, MINUS):
        raise ObservationError(f"evidence sign must be '+' or '-', got {sign}")
    for n, s in old_obs.items():
        if s not in (PLUS, MINUS):
            raise ObservationError(f"evidence sign must be '+' or '-', got {s} on {n}")

    state = InferenceState(
        network=net,
        arcs=dict(net.arcs),
        node_signs={n: ZERO for n in net.nodes},
        old_observations=dict(old_obs),
        observation=obs,
    )
    reductions = _fix_signs(state) if enable_reduction else []
    restart_budget = len(_situational_arcs(state.arcs))
    while True:
        for n in net.nodes:
            state.node_signs[n] = ZERO
        try:
            _propagate(state, (), node, sign, delta_log)
            break
        except _RestartSignal:
            state.restart_count += 1
            if state.restart_count > restart_budget:
                raise InvariantViolation(
                    f"{state.restart_count} restarts exceed the "
                    f"{restart_budget} situational arcs present"
                )
            state.trace.append(TraceEvent("restart", count=state.restart_count))
    return StepResult(
        observed=node,
        sign=sign,
        node_signs=dict(state.node_signs),
        network=net.with_arcs(state.arcs),
        restarts=state.restart_count,
        reductions=reductions,
        trace=state.trace,
    )


def run_sequence(
    net: QpnNetwork,
    observations: Sequence[tuple[NodeId, Sign]],
    *,
    enable_reduction: bool = True,
) -> list[StepResult]:
    """Process observations in order, threading the adapted network and the
    accumulated evidence through every step."""
    results: list[StepResult] = []
    old: dict[NodeId, Sign] = {}
    current = net
    delta_log: dict[Arc, int] = {}
    for node, sign in observations:
        step = process_observation(
            current, old, (node, sign), enable_reduction=enable_reduction, delta_log=delta_log
        )
        results.append(step)
        current = step.network
        old[node] = sign
    return results
