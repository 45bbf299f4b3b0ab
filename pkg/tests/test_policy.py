"""Policy evaluation tests.

The headline oracles: the baiting forward policy must reproduce the frozen
corridor closed forms in both evaluation modes, and the observation-gadget
forward policy must land exactly on the decomposition assembled from the
independently derived pass/early-exit formulas. That agreement ties the
policy walker, the joint-outcome recursion, and the closed forms together.
"""
from __future__ import annotations

from fractions import Fraction

import pytest

from ctplab.gadgets import (
    baiting_harness,
    bailout_policy_cost,
    decomposed_cost,
    forward_policy_cost,
    observation_early_exit_expectation,
    observation_harness,
    observation_pass_cost,
    observation_pass_probability,
    pass_cost,
    pass_probability,
)
from ctplab.model import Belief, Cost, InstanceBuilder, Variant, Weather
from ctplab.policy import (
    Action,
    ActionKind,
    DecisionTreePolicy,
    IllegalActionError,
    InfeasibleWeatherError,
    Policy,
    PolicyLoopError,
    action_from_dict,
    action_to_dict,
    evaluate_exact,
    export_decision_tree,
    reference_policy,
    simulate,
    walk_weather,
)


def sure_edge_instance(cost=5):
    b = InstanceBuilder(Variant.INDEPENDENT)
    b.set_endpoints("s", "t")
    b.add_edge("s", "t", cost, id="direct")
    return b.build()


def two_path_instance():
    """Cheap single uncertain edge against a sure detour."""
    b = InstanceBuilder(Variant.INDEPENDENT)
    b.set_endpoints("s", "t")
    b.add_edge("s", "t", 1, id="cheap", block_p=Fraction(1, 2))
    b.add_edge("s", "t", 3, id="sure")
    return b.build()


class RulePolicy(Policy):
    """Ad-hoc policy from a plain function, for tests only."""

    def __init__(self, fn):
        self._fn = fn

    def decide(self, instance, belief):
        return self._fn(instance, belief)


def take_cheap_else_sure(instance, belief):
    if belief.position == "t":
        return Action.halt()
    if belief.status("cheap"):
        return Action.move("cheap")
    return Action.move("sure")


class TestActions:
    def test_halt_carries_no_edge(self):
        with pytest.raises(ValueError):
            Action(ActionKind.HALT, "e")

    def test_move_needs_edge(self):
        with pytest.raises(ValueError):
            Action(ActionKind.MOVE)

    def test_round_trip(self):
        for action in (Action.move("e1"), Action.sense("e2"),
                       Action.give_up("e3"), Action.halt(), None):
            assert action_from_dict(action_to_dict(action)) == action

    def test_str(self):
        assert str(Action.move("e1")) == "move(e1)"
        assert str(Action.halt()) == "halt"


class TestLegality:
    def test_halt_away_from_target(self):
        inst = sure_edge_instance()
        policy = RulePolicy(lambda i, b: Action.halt())
        with pytest.raises(IllegalActionError, match="at s"):
            evaluate_exact(inst, policy)

    def test_move_on_blocked_edge(self):
        inst = two_path_instance()
        policy = RulePolicy(lambda i, b: Action.halt()
                            if b.position == "t" else Action.move("cheap"))
        with pytest.raises(IllegalActionError, match="blocked"):
            evaluate_exact(inst, policy, mode="tree")

    def test_move_on_missing_edge(self):
        inst = sure_edge_instance()
        policy = RulePolicy(lambda i, b: Action.move("nope"))
        with pytest.raises(IllegalActionError, match="unknown edge"):
            evaluate_exact(inst, policy)

    def test_sense_outside_sensing_variant(self):
        inst = two_path_instance()
        policy = RulePolicy(lambda i, b: Action.sense("cheap"))
        with pytest.raises(IllegalActionError, match="variant"):
            evaluate_exact(inst, policy, mode="tree")

    def test_give_up_requires_sure_edge(self):
        inst = two_path_instance()
        policy = RulePolicy(lambda i, b: Action.give_up("cheap"))
        with pytest.raises(IllegalActionError, match="always open"):
            evaluate_exact(inst, policy, mode="tree")

    def test_endless_walk_hits_cap(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "m", 1, id="hop")
        b.add_edge("s", "t", 9, id="out")
        inst = b.build()
        policy = RulePolicy(lambda i, b_: Action.move("hop"))
        with pytest.raises(PolicyLoopError):
            evaluate_exact(inst, policy, mode="tree")


class TestEvaluate:
    def test_sure_edge(self):
        inst = sure_edge_instance()
        policy = RulePolicy(lambda i, b: Action.halt()
                            if b.position == "t" else Action.move("direct"))
        for mode in ("weathers", "tree"):
            result = evaluate_exact(inst, policy, mode=mode)
            assert result.expected_cost == Cost.of(5)

    def test_two_paths_expected_two(self):
        inst = two_path_instance()
        policy = RulePolicy(take_cheap_else_sure)
        for mode in ("weathers", "tree"):
            result = evaluate_exact(inst, policy, mode=mode)
            assert result.expected_cost == Cost.of(2)

    def test_breakdown_is_exact_decomposition(self):
        inst = two_path_instance()
        result = evaluate_exact(inst, RulePolicy(take_cheap_else_sure),
                                mode="tree")
        total = sum((p for _, p, _ in result.outcome_breakdown), Fraction(0))
        assert total == 1
        recombined = Cost.zero()
        for _, p, c in result.outcome_breakdown:
            recombined = recombined + c.scale(p)
        assert recombined == result.expected_cost

    def test_declaring_infeasible_costs_infinity(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="only", block_p=Fraction(1, 2))
        inst = b.build()

        def rule(instance, belief):
            if belief.position == "t":
                return Action.halt()
            if belief.status("only"):
                return Action.move("only")
            return None

        result = evaluate_exact(inst, RulePolicy(rule), mode="tree")
        assert result.expected_cost.is_infinite
        labels = {label: cost for label, _, cost in result.outcome_breakdown}
        assert labels["only=blocked"].is_infinite
        assert labels["only=open"] == Cost.of(1)

    def test_modes_agree_on_dependent_instance(self):
        from test_model import xor_net_instance
        inst = xor_net_instance()

        def rule(instance, belief):
            if belief.position == "t":
                return Action.halt()
            if belief.status("e_true"):
                return Action.move("e_true")
            return Action.move("e_false")

        by_weather = evaluate_exact(inst, RulePolicy(rule), mode="weathers")
        by_tree = evaluate_exact(inst, RulePolicy(rule), mode="tree")
        assert by_weather.expected_cost == by_tree.expected_cost

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError, match="mode"):
            evaluate_exact(sure_edge_instance(), RulePolicy(lambda i, b: None),
                           mode="guess")


class TestBaitingPolicies:
    def test_forward_policy_frozen_values(self):
        inst, handle = baiting_harness(2)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        for mode in ("weathers", "tree"):
            result = evaluate_exact(inst, policy, mode=mode)
            assert result.expected_cost == Cost.of(Fraction(263, 512))

    def test_forward_policy_zero_charge(self):
        inst, handle = baiting_harness(2, charge=0)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal="charge")
        result = evaluate_exact(inst, policy, mode="tree")
        assert result.expected_cost == Cost.of(Fraction(255, 512))

    def test_forward_policy_fractional_length(self):
        inst, handle = baiting_harness(Fraction(3, 2))
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        result = evaluate_exact(inst, policy, mode="weathers")
        assert result.expected_cost == Cost.of(Fraction(789, 2048))

    @pytest.mark.parametrize("length", [2, 3, Fraction(5, 2), 24])
    def test_forward_policy_matches_closed_form(self, length):
        inst, handle = baiting_harness(length)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        result = evaluate_exact(inst, policy, mode="tree")
        assert result.expected_cost == Cost.of(
            forward_policy_cost(length, length))

    @pytest.mark.parametrize("rounds", list(range(1, 8)))
    def test_bailout_policy_matches_closed_form(self, rounds):
        inst, handle = baiting_harness(2)
        policy = reference_policy("baiting_pi_j", handle=handle,
                                  rounds=rounds, fallback="fallback")
        result = evaluate_exact(inst, policy, mode="weathers")
        assert result.expected_cost == Cost.of(bailout_policy_cost(2, rounds, 1))

    def test_bailout_policy_frozen_values(self):
        inst, handle = baiting_harness(2)
        frozen = {1: Fraction(7, 8), 3: Fraction(21, 32),
                  7: Fraction(265, 512)}
        for rounds, want in frozen.items():
            policy = reference_policy("baiting_pi_j", handle=handle,
                                      rounds=rounds, fallback="fallback")
            result = evaluate_exact(inst, policy, mode="tree")
            assert result.expected_cost == Cost.of(want)

    def test_forward_policy_decomposition_identity(self):
        result = evaluate_exact(
            *self._forward(2), mode="tree").expected_cost
        assert result == Cost.of(decomposed_cost(
            Fraction(247, 512), pass_probability(2), pass_cost(2),
            Fraction(2)))

    @staticmethod
    def _forward(length):
        inst, handle = baiting_harness(length)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        return inst, policy

    def test_single_weather_replay(self):
        inst, handle = baiting_harness(2)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        # every cut blocked: pay the full corridor plus the exit shortcut
        blocked = frozenset(handle.cut_edges)
        assert walk_weather(inst, policy, Weather(blocked)) == Cost.of(4)
        # first cut open: one section then a free drop to the sink
        open_first = frozenset(handle.cut_edges[1:])
        assert walk_weather(inst, policy, Weather(open_first)) == Cost.of(
            Fraction(1, 4))


class TestObservationPolicy:
    @pytest.mark.parametrize("length", [9, 24])
    def test_two_derivations_agree(self, length):
        """Policy walk equals the independently assembled closed form."""
        inst, handle = observation_harness(length, charge=0)
        policy = reference_policy("og_pi_g", handle=handle, terminal="charge")
        result = evaluate_exact(inst, policy, mode="tree")
        want = decomposed_cost(
            observation_early_exit_expectation(length),
            observation_pass_probability(length),
            observation_pass_cost(length),
            Fraction(0))
        assert result.expected_cost == Cost.of(want)


class TestDecisionTrees:
    def test_export_and_replay(self):
        inst, handle = baiting_harness(Fraction(3, 2))
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        original, tree = export_decision_tree(inst, policy)
        replayed = evaluate_exact(inst, tree, mode="weathers")
        assert replayed.expected_cost == original.expected_cost

    def test_json_round_trip(self):
        inst, handle = baiting_harness(Fraction(3, 2))
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        original, tree = export_decision_tree(inst, policy)
        back = DecisionTreePolicy.from_json(tree.to_json())
        assert back == tree
        replayed = evaluate_exact(inst, back, mode="tree")
        assert replayed.expected_cost == original.expected_cost

    def test_missing_node_names_belief(self):
        inst = two_path_instance()
        tree = DecisionTreePolicy({})
        with pytest.raises(IllegalActionError, match="no action"):
            evaluate_exact(inst, tree, mode="tree")


class TestRegistry:
    def test_unknown_name(self):
        with pytest.raises(ValueError, match="baiting_pi"):
            reference_policy("unheard_of")

    def test_rounds_out_of_range(self):
        _, handle = baiting_harness(2)
        with pytest.raises(ValueError, match="rounds"):
            reference_policy("baiting_pi_j", handle=handle, rounds=8,
                             fallback="fallback")


class TestSimulate:
    def test_sure_edge_statistics(self):
        inst = sure_edge_instance()
        policy = RulePolicy(lambda i, b: Action.halt()
                            if b.position == "t" else Action.move("direct"))
        mean, stderr = simulate(inst, policy, trials=7, seed=1)
        assert mean == 5.0
        assert stderr == 0.0

    def test_deterministic_given_seed(self):
        inst, handle = baiting_harness(2)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        a = simulate(inst, policy, trials=200, seed=11)
        b = simulate(inst, policy, trials=200, seed=11)
        assert a == b

    def test_converges_to_exact_value(self):
        inst, handle = baiting_harness(2)
        policy = reference_policy("baiting_pi", handle=handle,
                                  terminal=handle.exit_shortcut)
        mean, stderr = simulate(inst, policy, trials=20000, seed=7)
        exact = float(Fraction(263, 512))
        assert stderr > 0
        assert abs(mean - exact) < 4 * stderr

    def test_needs_a_trial(self):
        inst = sure_edge_instance()
        with pytest.raises(ValueError):
            simulate(inst, RulePolicy(lambda i, b: None), trials=0, seed=3)

    def test_infeasible_weather_raises(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="only", block_p=Fraction(1, 2))
        inst = b.build()

        def rule(instance, belief):
            if belief.position == "t":
                return Action.halt()
            if belief.status("only"):
                return Action.move("only")
            return None

        with pytest.raises(InfeasibleWeatherError):
            simulate(inst, RulePolicy(rule), trials=60, seed=5)
