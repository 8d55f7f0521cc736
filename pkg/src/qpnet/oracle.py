"""Exact quantitative ground truth: binary Bayesian networks with brute-force inference.

Everything here favours obvious correctness over speed; enumeration is capped
at 20 nodes because this module is the referee for the qualitative engine, not
the product.
"""
from __future__ import annotations

import graphlib
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import ArcError, EnumerationLimitError, ZeroProbabilityEvidence
from .model import AdditiveSynergy, NodeId, QpnNetwork, RegularInfluence, SituationalInfluence
from .signs import AMBIGUOUS, MINUS, PLUS, ZERO, Sign

SIGN_TOLERANCE = 1e-9
MAX_ENUMERATION_NODES = 20


def classify(differences: Iterable[float]) -> Sign:
    """Sign of a family of differences under the weak-inequality convention.

    '+' tolerates zeros as long as nothing is strictly negative, '0' requires
    all entries to vanish, and mixed strict signs give '?'.
    """
    positive = negative = False
    for d in differences:
        if d > SIGN_TOLERANCE:
            positive = True
        elif d < -SIGN_TOLERANCE:
            negative = True
    if positive and negative:
        return AMBIGUOUS
    if positive:
        return PLUS
    if negative:
        return MINUS
    return ZERO


class BinaryBayesNet:
    """A Bayesian network over binary variables with explicit CPTs.

    `parents` maps each node to its parent list; parents are stored sorted and
    CPT rows are keyed by tuples of booleans aligned with that sorted order.
    Each row holds the probability of the node being true.
    """

    def __init__(
        self,
        parents: Mapping[NodeId, Sequence[NodeId]],
        cpts: Mapping[NodeId, Mapping[tuple[bool, ...], float]],
    ) -> None:
        self.nodes: tuple[NodeId, ...] = tuple(sorted(parents))
        self.parents: dict[NodeId, tuple[NodeId, ...]] = {
            n: tuple(sorted(parents[n])) for n in self.nodes
        }
        self.cpts: dict[NodeId, dict[tuple[bool, ...], float]] = {}
        for node in self.nodes:
            for p in self.parents[node]:
                if p not in self.parents:
                    raise ValueError(f"node {node}: unknown parent {p!r}")
            rows = {tuple(k): float(v) for k, v in cpts[node].items()}
            expected = 2 ** len(self.parents[node])
            if len(rows) != expected or any(len(k) != len(self.parents[node]) for k in rows):
                raise ValueError(f"node {node}: CPT must have one row per parent configuration")
            for key, p in rows.items():
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"node {node}: probability {p} out of range at {key}")
            self.cpts[node] = rows
        sorter = graphlib.TopologicalSorter(
            {n: list(self.parents[n]) for n in self.nodes}
        )
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            raise ValueError("parent structure contains a cycle: " + " -> ".join(exc.args[1]))

    def children(self, node: NodeId) -> list[NodeId]:
        return [n for n in self.nodes if node in self.parents[n]]

    def prob_true(self, node: NodeId, parent_values: Mapping[NodeId, bool]) -> float:
        key = tuple(parent_values[p] for p in self.parents[node])
        return self.cpts[node][key]

    def _check_size(self) -> None:
        if len(self.nodes) > MAX_ENUMERATION_NODES:
            raise EnumerationLimitError(
                f"{len(self.nodes)} nodes exceeds the enumeration cap of {MAX_ENUMERATION_NODES}"
            )


def joint_probability(bn: BinaryBayesNet, assignment: Mapping[NodeId, bool]) -> float:
    """Chain-rule product over all nodes; requires a full assignment."""
    missing = [n for n in bn.nodes if n not in assignment]
    if missing:
        raise ValueError(f"assignment is missing nodes: {', '.join(missing)}")
    p = 1.0
    for node in bn.nodes:
        pt = bn.prob_true(node, assignment)
        p *= pt if assignment[node] else 1.0 - pt
    return p


def _assignments(bn: BinaryBayesNet, fixed: Mapping[NodeId, bool]) -> Iterator[dict[NodeId, bool]]:
    free = [n for n in bn.nodes if n not in fixed]
    base = dict(fixed)
    for values in itertools.product((False, True), repeat=len(free)):
        out = dict(base)
        out.update(zip(free, values))
        yield out


def marginals(bn: BinaryBayesNet, evidence: Mapping[NodeId, bool]) -> dict[NodeId, float]:
    """P(node = true | evidence) for every node, in one enumeration pass."""
    bn._check_size()
    for n in evidence:
        if n not in bn.parents:
            raise ValueError(f"evidence on unknown node {n!r}")
    total = 0.0
    true_mass = {n: 0.0 for n in bn.nodes}
    for assignment in _assignments(bn, evidence):
        p = joint_probability(bn, assignment)
        total += p
        if p:
            for n, v in assignment.items():
                if v:
                    true_mass[n] += p
    if total <= 0.0:
        raise ZeroProbabilityEvidence(f"evidence has zero probability: {dict(evidence)}")
    return {n: true_mass[n] / total for n in bn.nodes}


def query(bn: BinaryBayesNet, target: tuple[NodeId, bool], evidence: Mapping[NodeId, bool]) -> float:
    """Exact P(target | evidence) by enumeration over the joint."""
    node, value = target
    if node in evidence:
        return 1.0 if evidence[node] == value else 0.0
    p_true = marginals(bn, evidence)[node]
    return p_true if value else 1.0 - p_true


def _difference_table(bn: BinaryBayesNet, tail: NodeId, head: NodeId) -> dict[tuple[bool, ...], float]:
    """P(head|tail=1, x) - P(head|tail=0, x) for every co-parent configuration x."""
    if tail not in bn.parents[head]:
        raise ArcError(f"no arc {tail}->{head}")
    others = [p for p in bn.parents[head] if p != tail]
    table = {}
    for values in itertools.product((False, True), repeat=len(others)):
        x = dict(zip(others, values))
        table[values] = bn.prob_true(head, {**x, tail: True}) - bn.prob_true(head, {**x, tail: False})
    return table


def influence_sign(bn: BinaryBayesNet, tail: NodeId, head: NodeId) -> Sign:
    """Sign of the direct influence of `tail` on `head` over all co-parent configurations."""
    return classify(_difference_table(bn, tail, head).values())


def synergy_sign(bn: BinaryBayesNet, pair: frozenset[NodeId], child: NodeId) -> Sign:
    """Sign of the pairwise interaction of two parents on a common child."""
    a, b = sorted(pair)
    if a not in bn.parents[child] or b not in bn.parents[child]:
        raise ArcError(f"{a} and {b} are not both parents of {child}")
    others = [p for p in bn.parents[child] if p not in (a, b)]
    diffs = []
    for values in itertools.product((False, True), repeat=len(others)):
        x = dict(zip(others, values))
        diffs.append(
            bn.prob_true(child, {**x, a: True, b: True})
            + bn.prob_true(child, {**x, a: False, b: False})
            - bn.prob_true(child, {**x, a: False, b: True})
            - bn.prob_true(child, {**x, a: True, b: False})
        )
    return classify(diffs)


def situational_sign(
    bn: BinaryBayesNet,
    tail: NodeId,
    head: NodeId,
    state: Mapping[NodeId, bool],
) -> Sign:
    """Sign of the non-monotonic influence of `tail` on `head` in the given network state."""
    if influence_sign(bn, tail, head) is not AMBIGUOUS:
        raise ArcError(f"influence {tail}->{head} is monotonic, not situational")
    p_tail = marginals(bn, state)[tail]
    if p_tail <= 0.0 or p_tail >= 1.0:
        raise ZeroProbabilityEvidence(
            f"cannot condition on both values of {tail}: P({tail}=true|state) = {p_tail}"
        )
    diff = query(bn, (head, True), {**state, tail: True}) - query(
        bn, (head, True), {**state, tail: False}
    )
    return classify([diff])


def provoker_set(bn: BinaryBayesNet, tail: NodeId, head: NodeId) -> list[NodeId]:
    """Smallest co-parent subset that provokes the non-monotonicity of tail->head.

    A candidate set must (a) flip the difference's sign across some value swap
    of each member, and (b) pin the difference to a single sign once fully
    configured.  Subsets are searched smallest first, lexicographically; the
    full co-parent set is the fallback for degenerate all-tie tables.
    """
    if influence_sign(bn, tail, head) is not AMBIGUOUS:
        raise ArcError(f"influence {tail}->{head} is monotonic, has no provoker set")
    co = [p for p in bn.parents[head] if p != tail]
    table = _difference_table(bn, tail, head)

    def diffs_for(fixed: Mapping[NodeId, bool]) -> list[float]:
        out = []
        for values, d in table.items():
            cfg = dict(zip(co, values))
            if all(cfg[n] == v for n, v in fixed.items()):
                out.append(d)
        return out

    def single_signed(fixed: Mapping[NodeId, bool]) -> bool:
        return classify(diffs_for(fixed)) is not AMBIGUOUS

    def flips(member: NodeId, rest: Sequence[NodeId]) -> bool:
        # a value swap of `member` must move the pinned sign, weakly: one side
        # all-nonnegative, the other all-nonpositive, not both everywhere zero
        for values in itertools.product((False, True), repeat=len(rest)):
            z = dict(zip(rest, values))
            hi = classify(diffs_for({**z, member: True}))
            lo = classify(diffs_for({**z, member: False}))
            if AMBIGUOUS in (hi, lo) or hi is lo:
                continue
            return True
        return False

    for size in range(1, len(co) + 1):
        for candidate in itertools.combinations(co, size):
            if not all(
                single_signed(dict(zip(candidate, values)))
                for values in itertools.product((False, True), repeat=size)
            ):
                continue
            if all(flips(m, [c for c in candidate if c != m]) for m in candidate):
                return list(candidate)
    return list(co)


def abstract(bn: BinaryBayesNet, state: Optional[Mapping[NodeId, bool]] = None) -> QpnNetwork:
    """Qualitative abstraction: same DAG, signed arcs and synergies.

    Non-monotonic arcs get a situational annotation whose current sign holds
    in the given state and whose provokers come from `provoker_set`.
    """
    state = dict(state or {})
    arcs: dict[tuple[NodeId, NodeId], RegularInfluence | SituationalInfluence] = {}
    for head in bn.nodes:
        for tail in bn.parents[head]:
            s = influence_sign(bn, tail, head)
            if s is AMBIGUOUS:
                arcs[(tail, head)] = SituationalInfluence(
                    current=situational_sign(bn, tail, head, state),
                    provokers=frozenset(provoker_set(bn, tail, head)),
                )
            else:
                arcs[(tail, head)] = RegularInfluence(s)
    synergies = []
    for child in bn.nodes:
        for a, b in itertools.combinations(bn.parents[child], 2):
            pair = frozenset((a, b))
            synergies.append(AdditiveSynergy(pair, child, synergy_sign(bn, pair, child)))
    return QpnNetwork(bn.nodes, arcs, synergies)


@dataclass(frozen=True)
class SoundnessViolation:
    step: int
    node: NodeId
    sign: Sign
    prior: float
    posterior: float

    def line(self) -> str:
        return (
            f"ORACLE VIOLATION step {self.step} node {self.node} engine {self.sign} "
            f"prior {self.prior:.9f} posterior {self.posterior:.9f}"
        )


@dataclass
class SoundnessReport:
    violations: list[SoundnessViolation] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def soundness_report(
    bn: BinaryBayesNet,
    observation_sequence: Sequence[tuple[NodeId, bool]],
    engine_outputs: Sequence[Mapping[NodeId, Sign]],
) -> SoundnessReport:
    """Check every propagated node sign against the exact direction of marginal change.

    Step k compares marginals given the first k observations with marginals
    given the first k-1: '+' requires non-decrease, '-' non-increase, '0'
    equality, all within SIGN_TOLERANCE; '?' claims nothing.
    """
    if len(observation_sequence) != len(engine_outputs):
        raise ValueError("one engine output mapping is required per observation")
    report = SoundnessReport()
    evidence: dict[NodeId, bool] = {}
    before = marginals(bn, evidence)
    for step, ((node, value), signs) in enumerate(
        zip(observation_sequence, engine_outputs), start=1
    ):
        evidence[node] = value
        after = marginals(bn, evidence)
        for n in bn.nodes:
            s = signs[n]
            d = after[n] - before[n]
            report.checked += 1
            bad = (
                (s is PLUS and d < -SIGN_TOLERANCE)
                or (s is MINUS and d > SIGN_TOLERANCE)
                or (s is ZERO and abs(d) > SIGN_TOLERANCE)
            )
            if bad:
                report.violations.append(SoundnessViolation(step, n, s, before[n], after[n]))
        before = after
    return report


def example_network() -> BinaryBayesNet:
    """Canonical three-node fixture: roots T and F with child W.

    The influence of T on W is non-monotonic with a negative sign in the
    prior state; F provokes it.  The CPT is the exact solution of the anchor
    constraints P(w|t) = 0.39, P(w|t-false) = 0.51 at P(f) = 0.4, with the
    difference line crossing zero at P(f) = 0.67 and P(w | both false) fixed
    at 0.45.
    """
    gradient = Fraction(12, 100) / Fraction(27, 100)
    w_neither = Fraction(9, 20)
    w_f_only = (Fraction(51, 100) - Fraction(6, 10) * w_neither) / Fraction(4, 10)
    w_t_only = w_neither - Fraction(67, 100) * gradient
    w_both = (Fraction(39, 100) - Fraction(6, 10) * w_t_only) / Fraction(4, 10)
    return BinaryBayesNet(
        parents={"T": [], "F": [], "W": ["F", "T"]},
        cpts={
            "T": {(): 0.5},
            "F": {(): 0.4},
            "W": {
                # keys follow the sorted parent order (F, T)
                (True, True): float(w_both),
                (True, False): float(w_f_only),
                (False, True): float(w_t_only),
                (False, False): float(w_neither),
            },
        },
    )
