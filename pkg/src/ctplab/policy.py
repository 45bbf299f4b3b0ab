"""Policies over belief states and their exact evaluation.

A policy is a deterministic rule mapping each belief (position plus revealed
edge statuses) to an action. This module provides the action vocabulary, an
explicit decision-tree representation with JSON round-tripping, two exact
evaluators (full weather enumeration, and recursion over observation
outcomes that copes with gadget chains far too long to enumerate), a seeded
Monte Carlo simulator, and the library of named reference policies for the
baiting and observation gadgets.

Expected costs are exact rationals throughout; the only floats live in the
simulator's summary statistics.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .gadgets import BaitingHandle, ObservationHandle
from .model import (
    Belief,
    Cost,
    CtpInstance,
    Variant,
    Weather,
    sample_weather,
    trial_stream,
    weather_support,
)


class IllegalActionError(RuntimeError):
    """A policy issued an action that is not legal at the current belief."""


class PolicyLoopError(RuntimeError):
    """A policy walked past the step cap without reaching the target."""


class InfeasibleWeatherError(RuntimeError):
    """A sampled weather was declared infeasible, so no cost can be averaged."""


# ---------------------------------------------------------------------------
# actions

class ActionKind(Enum):
    MOVE = "move"
    SENSE = "sense"
    GIVE_UP = "give_up"
    HALT = "halt"


@dataclass(frozen=True)
class Action:
    """One step: traverse an edge, sense an edge, give up, or stop at t.

    GIVE_UP is a move along a designated always-open edge; it exists so
    policies can mark the bail-out step, and it is checked more strictly
    than MOVE (the edge must be sure).
    """

    kind: ActionKind
    edge: str | None = None

    def __post_init__(self) -> None:
        if self.kind is ActionKind.HALT:
            if self.edge is not None:
                raise ValueError("halt carries no edge")
        elif self.edge is None:
            raise ValueError(f"{self.kind.value} needs an edge id")

    @staticmethod
    def move(edge: str) -> Action:
        return Action(ActionKind.MOVE, edge)

    @staticmethod
    def sense(edge: str) -> Action:
        return Action(ActionKind.SENSE, edge)

    @staticmethod
    def give_up(edge: str) -> Action:
        return Action(ActionKind.GIVE_UP, edge)

    @staticmethod
    def halt() -> Action:
        return Action(ActionKind.HALT)

    def __str__(self) -> str:
        if self.kind is ActionKind.HALT:
            return "halt"
        return f"{self.kind.value}({self.edge})"


def action_to_dict(action: Action | None) -> dict | None:
    if action is None:
        return None
    out: dict = {"kind": action.kind.value}
    if action.edge is not None:
        out["edge"] = action.edge
    return out


def action_from_dict(data: dict | None) -> Action | None:
    if data is None:
        return None
    return Action(ActionKind(data["kind"]), data.get("edge"))


# ---------------------------------------------------------------------------
# policies

def belief_key(belief: Belief) -> str:
    """Canonical string key for a belief, used by decision trees."""
    parts = ",".join(f"{e}={'O' if is_open else 'B'}"
                     for e, is_open in belief.known)
    return f"{belief.position}|{parts}"


def describe_belief(belief: Belief) -> str:
    parts = ", ".join(f"{e} {'open' if is_open else 'blocked'}"
                      for e, is_open in belief.known)
    return f"at {belief.position} knowing [{parts}]" if parts else (
        f"at {belief.position} knowing nothing")


class Policy:
    """Deterministic decision rule.

    `decide` returns the action to take at a belief, or None to declare the
    situation infeasible (the evaluator charges an infinite cost on that
    branch). Policies must be immutable; evaluation never copies them.
    """

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        raise NotImplementedError


@dataclass(frozen=True)
class TreeNode:
    action: Action | None
    children: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class DecisionTreePolicy(Policy):
    """Explicit policy: one recorded action per reachable belief."""

    nodes: Mapping[str, TreeNode]
    root: str | None = None

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        node = self.nodes.get(belief_key(belief))
        if node is None:
            raise IllegalActionError(
                f"decision tree has no action {describe_belief(belief)}")
        return node.action

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "nodes": {
                key: {
                    "action": action_to_dict(node.action),
                    "children": {label: child for label, child in node.children},
                }
                for key, node in sorted(self.nodes.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> DecisionTreePolicy:
        nodes = {}
        for key, raw in data["nodes"].items():
            children = tuple(sorted(raw.get("children", {}).items()))
            nodes[key] = TreeNode(action_from_dict(raw.get("action")), children)
        return cls(nodes, data.get("root"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> DecisionTreePolicy:
        return cls.from_dict(json.loads(text))


def load_policy(path: str | Path) -> DecisionTreePolicy:
    return DecisionTreePolicy.from_json(Path(path).read_text())


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class EvalResult:
    """Exact expected cost plus the per-event decomposition behind it."""

    expected_cost: Cost
    outcome_breakdown: tuple[tuple[str, Fraction, Cost], ...]


def default_step_cap(instance: CtpInstance) -> int:
    return max(64, 16 * len(instance.edges))


def _action_price(instance: CtpInstance, belief: Belief,
                  action: Action) -> Cost:
    """Check legality of `action` at a settled belief; return its price."""
    where = describe_belief(belief)
    pos = belief.position
    if action.kind is ActionKind.HALT:
        if pos != instance.t:
            raise IllegalActionError(f"halt away from the target, {where}")
        return Cost.zero()
    edge = instance.edge_map.get(action.edge or "")
    if edge is None:
        raise IllegalActionError(f"unknown edge {action.edge!r}, {where}")
    if action.kind is ActionKind.SENSE:
        if instance.variant is not Variant.SENSING or instance.sensing is None:
            raise IllegalActionError(
                f"sensing is not available in this variant, {where}")
        fee = instance.sensing.cost(pos, edge.id)
        if fee is None:
            raise IllegalActionError(
                f"no sensing entry for {edge.id} from {pos}, {where}")
        if belief.status(edge.id) is not None:
            raise IllegalActionError(
                f"sensing {edge.id} whose status is already known, {where}")
        return fee
    # MOVE or GIVE_UP
    if edge.cost.is_infinite:
        raise IllegalActionError(
            f"edge {edge.id} is an untraversable anchor, {where}")
    if edge.directed:
        if edge.tail != pos:
            raise IllegalActionError(
                f"directed edge {edge.id} does not leave {pos}, {where}")
    elif pos not in (edge.tail, edge.head):
        raise IllegalActionError(f"edge {edge.id} is not incident, {where}")
    if action.kind is ActionKind.GIVE_UP and edge.uncertain:
        raise IllegalActionError(
            f"give-up edge {edge.id} is not always open, {where}")
    if edge.uncertain and belief.status(edge.id) is not True:
        state = "blocked" if belief.status(edge.id) is False else "unobserved"
        raise IllegalActionError(f"edge {edge.id} is {state}, {where}")
    return edge.cost


def walk_weather(instance: CtpInstance, policy: Policy, weather: Weather,
                 step_cap: int | None = None) -> Cost:
    """Run the policy against one fixed weather; return the realized cost."""
    cap = default_step_cap(instance) if step_cap is None else step_cap
    pos = instance.s
    known: dict[str, bool] = dict(instance.observe(weather, pos))
    total = Cost.zero()
    belief = Belief.make(pos, known)
    for _ in range(cap):
        belief = Belief.make(pos, known)
        action = policy.decide(instance, belief)
        if action is None:
            return Cost.infinite()
        total = total + _action_price(instance, belief, action)
        if action.kind is ActionKind.HALT:
            return total
        if action.kind is ActionKind.SENSE:
            known[action.edge] = weather.is_open(action.edge)
            continue
        pos = instance.edge_map[action.edge].other_end(pos)
        # the trip ends at t, so nothing revealed there can matter
        if pos != instance.t:
            known.update(instance.observe(weather, pos))
    raise PolicyLoopError(
        f"no arrival within {cap} steps; last {describe_belief(belief)}")


def _outcome_label(assignment: Mapping[str, bool]) -> str:
    return ",".join(f"{e}={'open' if v else 'blocked'}"
                    for e, v in sorted(assignment.items()))


class _Frame:
    """One pending branch node of the outcome-recursion evaluator."""

    __slots__ = ("children", "index", "walked", "acc", "labels", "prob",
                 "base")

    def __init__(self, children, walked, labels, prob, base):
        self.children = children    # list of (label, probability, belief)
        self.index = 0
        self.walked = walked        # Fraction spent inside this frame
        self.acc = Cost.zero()      # probability-weighted finished children
        self.labels = labels
        self.prob = prob
        self.base = base


def _trace(instance: CtpInstance, policy: Policy, step_cap: int | None,
           record: dict[str, TreeNode] | None,
           ) -> tuple[Cost, list[tuple[str, Fraction, Cost]]]:
    """Evaluate by recursing over observation outcomes (iteratively).

    Between observations the walk is deterministic, so each frame advances
    until the policy halts, gives up, or triggers a branch: arriving where
    unrevealed edges become visible, or sensing. Branch probabilities come
    from the joint model conditioned on everything revealed so far, which
    makes the recursion exact for dependent instances too.
    """
    cap = default_step_cap(instance) if step_cap is None else step_cap
    joint = instance.joint
    breakdown: list[tuple[str, Fraction, Cost]] = []

    def note(belief: Belief, action: Action | None,
             children: tuple[tuple[str, str], ...] = ()) -> None:
        if record is None:
            return
        key = belief_key(belief)
        seen = record.get(key)
        node = TreeNode(action, children)
        if seen is not None and seen != node:
            merged = dict(seen.children)
            merged.update(children)
            if seen.action != action:
                raise IllegalActionError(
                    f"policy is not a function of the belief at {key}")
            node = TreeNode(action, tuple(sorted(merged.items())))
        record[key] = node

    def branch_children(belief: Belief, position: str,
                        targets: list[str]) -> list[tuple[str, Fraction, Belief]]:
        outcomes = joint.branch(belief.known_map, targets)
        children = []
        for assignment, prob in outcomes:
            grown = dict(belief.known_map)
            grown.update(assignment)
            children.append((_outcome_label(assignment), prob,
                             Belief.make(position, grown)))
        return children

    def advance(belief: Belief):
        """Walk deterministically; stop at a leaf or a branch point."""
        walked = Fraction(0)
        for _ in range(cap):
            action = policy.decide(instance, belief)
            if action is None:
                note(belief, None)
                return "dead", walked, None
            price = _action_price(instance, belief, action)
            if action.kind is ActionKind.HALT:
                note(belief, action)
                return "halt", walked, None
            walked += price.fraction
            if action.kind is ActionKind.SENSE:
                children = branch_children(belief, belief.position,
                                           [action.edge])
                note(belief, action,
                     tuple((label, belief_key(b)) for label, _, b in children))
                return "branch", walked, children
            nxt = instance.edge_map[action.edge].other_end(belief.position)
            # observations at t are moot (and branching on them at a gadget
            # sink with hundreds of incident cut edges would explode)
            fresh = [] if nxt == instance.t else [
                e.id for e in instance.visible_from(nxt)
                if belief.status(e.id) is None]
            if fresh:
                children = branch_children(belief, nxt, fresh)
                note(belief, action,
                     tuple((label, belief_key(b)) for label, _, b in children))
                return "branch", walked, children
            succ = Belief.make(nxt, belief.known_map)
            note(belief, action, (("", belief_key(succ)),))
            belief = succ
        raise PolicyLoopError(
            f"no branch or arrival within {cap} steps; "
            f"last {describe_belief(belief)}")

    def leaf_value(kind: str, walked: Fraction, labels: tuple[str, ...],
                   prob: Fraction, base: Fraction) -> Cost:
        if kind == "halt":
            cost = Cost.of(base + walked)
            value = Cost.of(walked)
        else:
            cost = Cost.infinite()
            value = Cost.infinite()
        breakdown.append((" ; ".join(labels) or "no observations",
                          prob, cost))
        return value

    def open_frame(belief: Belief, labels: tuple[str, ...], prob: Fraction,
                   base: Fraction) -> Cost | None:
        """Push a frame for `belief`, or return its value if it is a leaf."""
        kind, walked, children = advance(belief)
        if kind != "branch":
            return leaf_value(kind, walked, labels, prob, base)
        stack.append(_Frame(children, walked, labels, prob, base))
        return None

    stack: list[_Frame] = []
    start = Belief.make(instance.s, {})
    fresh = [e.id for e in instance.visible_from(instance.s)]
    if fresh:
        children = branch_children(start, instance.s, fresh)
        if record is not None:
            note(start, None,
                 tuple((label, belief_key(b)) for label, _, b in children))
        stack.append(_Frame(children, Fraction(0), (), Fraction(1),
                            Fraction(0)))
        final: Cost | None = None
    else:
        final = open_frame(start, (), Fraction(1), Fraction(0))

    while stack:
        top = stack[-1]
        if top.index == len(top.children):
            value = Cost.of(top.walked) + top.acc
            stack.pop()
            if stack:
                parent = stack[-1]
                prob = parent.children[parent.index - 1][1]
                parent.acc = parent.acc + value.scale(prob)
            else:
                final = value
            continue
        label, prob, child = top.children[top.index]
        top.index += 1
        value = open_frame(child, top.labels + (label,), top.prob * prob,
                           top.base + top.walked)
        if value is not None:
            top.acc = top.acc + value.scale(prob)

    assert final is not None
    total_prob = sum((p for _, p, _ in breakdown), Fraction(0))
    assert total_prob == 1
    flat = Cost.zero()
    for _, prob, cost in breakdown:
        flat = flat + cost.scale(prob)
    assert flat == final
    return final, breakdown


def _support_size(instance: CtpInstance) -> int:
    count = 1
    for comp in instance.joint.components:
        count *= len(comp.rows)
    return count


def evaluate_exact(instance: CtpInstance, policy: Policy,
                   mode: str = "auto", weather_cap: int = 4096,
                   step_cap: int | None = None) -> EvalResult:
    """Exact expected cost of `policy`, with a per-event breakdown.

    mode "weathers" enumerates the full weather support and replays the
    policy against each one; mode "tree" recurses over observation outcomes
    instead and handles instances whose support is astronomically large;
    "auto" picks by support size.
    """
    if mode not in ("auto", "weathers", "tree"):
        raise ValueError(f"unknown evaluation mode {mode!r}")
    if mode == "auto":
        mode = "weathers" if _support_size(instance) <= weather_cap else "tree"
    if mode == "tree":
        expected, breakdown = _trace(instance, policy, step_cap, None)
        return EvalResult(expected, tuple(breakdown))
    support = weather_support(instance)
    breakdown_w: list[tuple[str, Fraction, Cost]] = []
    expected = Cost.zero()
    ids = sorted(e.id for e in instance.uncertain_edges)
    for weather, prob in support:
        cost = walk_weather(instance, policy, weather, step_cap)
        label = ",".join(
            f"{e}={'blocked' if e in weather.blocked else 'open'}"
            for e in ids) or "no observations"
        breakdown_w.append((label, prob, cost))
        expected = expected + cost.scale(prob)
    assert sum((p for _, p, _ in breakdown_w), Fraction(0)) == 1
    return EvalResult(expected, tuple(breakdown_w))


def export_decision_tree(instance: CtpInstance, policy: Policy,
                         step_cap: int | None = None,
                         ) -> tuple[EvalResult, DecisionTreePolicy]:
    """Unfold `policy` over every belief it can reach, as an explicit tree."""
    nodes: dict[str, TreeNode] = {}
    expected, breakdown = _trace(instance, policy, step_cap, nodes)
    start = Belief.make(instance.s, {})
    root = belief_key(start)
    if root not in nodes:
        # the very first observation happens at s before any action
        root = None
        for key in nodes:
            root = key
            break
    tree = DecisionTreePolicy(nodes, root)
    return EvalResult(expected, tuple(breakdown)), tree


def simulate(instance: CtpInstance, policy: Policy, trials: int,
             seed: int, step_cap: int | None = None) -> tuple[float, float]:
    """Average realized cost over seeded weather draws.

    Deterministic given (seed, trials): trial i always consumes the stream
    trial_stream(seed, i) no matter how calls are scheduled.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    samples: list[float] = []
    for trial in range(trials):
        stream = trial_stream(seed, trial)
        weather = sample_weather(instance, stream)
        cost = walk_weather(instance, policy, weather, step_cap)
        if cost.is_infinite:
            raise InfeasibleWeatherError(
                f"trial {trial} hit a weather the policy declares infeasible")
        samples.append(float(cost.fraction))
    mean = math.fsum(samples) / trials
    if trials == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in samples) / (trials - 1)
    return mean, math.sqrt(var / trials)


# ---------------------------------------------------------------------------
# reference policies: baiting gadget

def _forward_through(handle: BaitingHandle, belief: Belief) -> Action | None:
    """Shared corridor rule: take the first open cut edge, else push on."""
    pos = belief.position
    if pos == handle.entry:
        return Action.move(handle.path_edges[0])
    if pos in handle.sections:
        i = handle.sections.index(pos)
        cut = handle.cut_edges[i]
        if belief.status(cut):
            return Action.move(cut)
        return Action.move(handle.path_edges[i + 1])
    return None


@dataclass(frozen=True)
class BaitingForwardPolicy(Policy):
    """Cross the whole corridor, taking any open cut edge to the sink.

    At the gadget exit the policy moves along `terminal`, the edge that
    prices finishing the trip.
    """

    handle: BaitingHandle
    terminal: str

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        if belief.position == instance.t:
            return Action.halt()
        if belief.position == self.handle.exit:
            return Action.move(self.terminal)
        return _forward_through(self.handle, belief)


@dataclass(frozen=True)
class BaitingBailoutPolicy(Policy):
    """Probe the first `rounds` cut edges, then retreat and pay `fallback`.

    Advancing, it behaves like the forward policy; once the cut edge at
    section `rounds` is seen blocked it walks back to the entry and gives
    up along the fallback edge.
    """

    handle: BaitingHandle
    rounds: int
    fallback: str

    def __post_init__(self) -> None:
        if not 1 <= self.rounds <= self.handle.n:
            raise ValueError(
                f"rounds must lie in [1, {self.handle.n}], got {self.rounds}")

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        handle, j = self.handle, self.rounds
        pos = belief.position
        last_cut = handle.cut_edges[j - 1]
        if pos == instance.t:
            return Action.halt()
        if pos == handle.entry:
            if belief.status(last_cut) is False:
                return Action.give_up(self.fallback)
            return Action.move(handle.path_edges[0])
        if pos in handle.sections:
            i = handle.sections.index(pos)
            if i >= j:
                return None
            cut = handle.cut_edges[i]
            if belief.status(cut):
                return Action.move(cut)
            if belief.status(last_cut) is False:
                return Action.move(handle.path_edges[i])
            return Action.move(handle.path_edges[i + 1])
        return None


# ---------------------------------------------------------------------------
# reference policies: observation gadget

@dataclass(frozen=True)
class ObservationForwardPolicy(Policy):
    """Push through the observation gadget the way its analysis intends.

    Cross the first corridor, noting the inner blocker at the gate; cross
    the second; at the far gate bail along its sure exit unless both detour
    blockers are open, in which case loop through the observed vertex, take
    the unit sneak edge and cross the third corridor. Open cut edges are
    always taken.
    """

    handle: ObservationHandle
    terminal: str

    def decide(self, instance: CtpInstance, belief: Belief) -> Action | None:
        h = self.handle
        pos = belief.position
        if pos == instance.t:
            return Action.halt()
        if pos == h.gate:
            if belief.status(h.blocker_out) is None:
                return Action.move(h.second.path_edges[0])
            return Action.move(h.sneak)
        if pos == h.far_gate:
            if belief.status(h.blocker_in) and belief.status(h.blocker_out):
                return Action.move(h.blocker_out)
            return Action.give_up(h.second.exit_shortcut)
        if pos == h.out_post:
            return Action.move(h.spur_out)
        if pos == h.obs:
            return Action.move(h.spur_in)
        if pos == h.in_post:
            return Action.move(h.blocker_in)
        if pos == h.gate2:
            return Action.move(h.third.path_edges[0])
        if pos == h.exit:
            return Action.move(self.terminal)
        for corridor in (h.first, h.second, h.third):
            step = _forward_through(corridor, belief)
            if step is not None:
                return step
        return None


# ---------------------------------------------------------------------------
# registry

_REGISTRY: dict[str, Callable[..., Policy]] = {
    "baiting_pi": BaitingForwardPolicy,
    "baiting_pi_j": BaitingBailoutPolicy,
    "og_pi_g": ObservationForwardPolicy,
}


def reference_policy(name: str, **params) -> Policy:
    """Look up a named reference policy and bind its parameters."""
    factory = _REGISTRY.get(name)
    if factory is None:
        known = ", ".join(sorted(_REGISTRY))
        raise ValueError(f"unknown reference policy {name!r}; known: {known}")
    return factory(**params)


__all__ = [
    "Action",
    "ActionKind",
    "BaitingBailoutPolicy",
    "BaitingForwardPolicy",
    "DecisionTreePolicy",
    "EvalResult",
    "IllegalActionError",
    "InfeasibleWeatherError",
    "ObservationForwardPolicy",
    "Policy",
    "PolicyLoopError",
    "TreeNode",
    "action_from_dict",
    "action_to_dict",
    "belief_key",
    "default_step_cap",
    "describe_belief",
    "evaluate_exact",
    "export_decision_tree",
    "load_policy",
    "reference_policy",
    "simulate",
    "walk_weather",
]
