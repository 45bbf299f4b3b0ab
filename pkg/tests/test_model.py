"""Model layer: costs, instances, joints, weathers, serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ctplab.model import (
    Belief,
    Cost,
    CtpInstance,
    EnumerationCapError,
    InstanceBuilder,
    InvalidInstanceError,
    SplitMix64,
    Variant,
    Weather,
    as_fraction,
    format_rational,
    instance_from_json,
    instance_to_json,
    merge_vertices,
    parse_cost,
    parse_rational,
    sample_weather,
    trial_stream,
    validate_instance,
    weather_support,
)

HALF = Fraction(1, 2)


class TestRationals:
    def test_parse_and_format(self):
        assert parse_rational("3/4") == Fraction(3, 4)
        assert parse_rational("5") == Fraction(5)
        assert format_rational(Fraction(10, 4)) == "5/2"

    def test_rejects_garbage(self):
        for text in ("", "a/b", "1/0", "1.5", "1 / 2"):
            with pytest.raises(InvalidInstanceError):
                parse_rational(text)

    @given(st.integers(min_value=0, max_value=10**9),
           st.integers(min_value=1, max_value=10**9))
    def test_round_trip(self, num, den):
        q = Fraction(num, den)
        assert parse_rational(format_rational(q)) == q


class TestCost:
    def test_addition_and_order(self):
        assert Cost.of(2) + Cost.of("1/2") == Cost.of(Fraction(5, 2))
        assert Cost.zero() < Cost.of("1/1000000")
        assert Cost.of(10) < Cost.infinite()
        assert not Cost.infinite() < Cost.infinite()

    def test_infinity_absorbs(self):
        top = Cost.infinite() + Cost.of(3)
        assert top.is_infinite
        assert top == Cost.infinite()
        assert top.scale(Fraction(1, 8)).is_infinite

    def test_scale(self):
        assert Cost.of(6).scale(Fraction(1, 3)) == Cost.of(2)
        with pytest.raises(ValueError):
            Cost.of(1).scale(Fraction(0))

    def test_rejects_negative(self):
        with pytest.raises(InvalidInstanceError):
            Cost.of(-1)

    def test_text_forms(self):
        assert parse_cost("inf").is_infinite
        assert str(parse_cost("7/2")) == "7/2"


def two_path_instance() -> CtpInstance:
    """Sure detour of cost 4 against a risky free path."""
    b = InstanceBuilder(Variant.INDEPENDENT)
    b.set_endpoints("s", "t")
    b.add_edge("s", "t", 4, id="direct")
    b.add_edge("s", "x", 2, id="sx")
    b.add_edge("x", "t", 0, id="xt", block_p=HALF)
    return b.build()


class TestBuilderAndValidation:
    def test_builds_and_round_trips(self):
        inst = two_path_instance()
        again = instance_from_json(instance_to_json(inst))
        assert again == inst
        assert instance_to_json(again) == instance_to_json(inst)

    def test_duplicate_edge_id(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.add_edge("a", "b", 1, id="e")
        with pytest.raises(InvalidInstanceError):
            b.add_edge("b", "c", 1, id="e")

    def test_loop_rejected(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        with pytest.raises(InvalidInstanceError):
            b.add_edge("s", "t", 1, id="st")
            b.add_edge("s", "s", 1, id="loop")
            b.build()

    def test_endpoints_required(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.add_edge("a", "b", 1)
        with pytest.raises(InvalidInstanceError):
            b.build()

    def test_uncertain_infinite_rejected(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("a", "b")
        b.add_edge("a", "b", Cost.infinite(), block_p=HALF)
        with pytest.raises(InvalidInstanceError):
            b.build()

    def test_block_p_one_rejected(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("a", "b")
        b.add_edge("a", "b", 1, block_p=1)
        with pytest.raises(InvalidInstanceError):
            b.build()

    def test_multiedges_allowed(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("u", "t")
        b.add_edge("u", "t", 2, id="exit")
        b.add_edge("u", "t", 1, id="fallback")
        inst = b.build()
        assert len(inst.moves_from("u")) == 2

    def test_unknown_json_key_rejected(self):
        text = instance_to_json(two_path_instance())
        broken = text.replace('"variant"', '"flavor"')
        with pytest.raises(InvalidInstanceError):
            instance_from_json(broken)


class TestMerge:
    def test_merge_rewires(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "mid_a", 1, id="left")
        b.add_edge("mid_b", "t", 1, id="right")
        b.merge("mid_a", "mid_b")
        inst = b.build()
        assert "mid_b" not in inst.vertices
        assert inst.edge_map["right"].tail == "mid_a"

    def test_merge_refuses_loop(self):
        inst = two_path_instance()
        with pytest.raises(InvalidInstanceError):
            merge_vertices(inst, "s", "x")

    def test_pure_merge_keeps_original(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "a", 1, id="sa")
        b.add_edge("b", "t", 1, id="bt")
        inst = b.build()
        merged = merge_vertices(inst, "a", "b")
        assert inst.edge_map["bt"].tail == "b"
        assert merged.edge_map["bt"].tail == "a"


class TestObservation:
    def test_undirected_seen_from_both_ends(self):
        inst = two_path_instance()
        wet = Weather(frozenset({"xt"}))
        assert inst.observe(wet, "x") == (("xt", False),)
        assert inst.observe(wet, "t") == (("xt", False),)
        assert inst.observe(wet, "s") == ()

    def test_directed_seen_from_both_ends_traversed_from_tail(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="st")
        b.add_edge("s", "t", 0, id="risky", directed=True, block_p=HALF)
        inst = b.build()
        dry = Weather(frozenset())
        assert inst.observe(dry, "s") == (("risky", True),)
        assert inst.observe(dry, "t") == (("risky", True),)
        assert [e.id for e, _ in inst.moves_from("s")] == ["st", "risky"]
        assert [e.id for e, _ in inst.moves_from("t")] == ["st"]

    def test_belief_lookup(self):
        belief = Belief.make("x", {"b": False, "a": True})
        assert belief.known == (("a", True), ("b", False))
        assert belief.status("a") is True
        assert belief.status("c") is None


def xor_net_instance() -> CtpInstance:
    """Two edges driven by one hidden coin, blocked in opposition."""
    b = InstanceBuilder(Variant.DEPENDENT)
    b.set_endpoints("s", "t")
    b.add_edge("s", "t", 0, id="e_true", block_p=HALF)
    b.add_edge("s", "t", 0, id="e_false", block_p=HALF)
    b.add_edge("s", "t", 1, id="sure")
    b.add_variable("coin", (), [HALF])
    b.add_variable("e_true", ("coin",), [0, 1])
    b.add_variable("e_false", ("coin",), [1, 0])
    return b.build()


class TestDependentJoint:
    def test_marginal_consistency_enforced(self):
        b = InstanceBuilder(Variant.DEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 0, id="e", block_p=Fraction(1, 4))
        b.add_edge("s", "t", 1, id="sure")
        b.add_variable("e", (), [HALF])
        with pytest.raises(InvalidInstanceError):
            b.build()

    def test_branch_conditionals(self):
        inst = xor_net_instance()
        outcomes = inst.joint.branch({}, ["e_true", "e_false"])
        assert len(outcomes) == 2
        assert all(p == HALF for _, p in outcomes)
        for statuses, _ in outcomes:
            assert statuses["e_true"] != statuses["e_false"]

    def test_deduction(self):
        inst = xor_net_instance()
        forced = inst.joint.deduced({"e_true": True})
        assert forced == {"e_false": False}
        assert inst.joint.deduced({}) == {}

    def test_open_probability(self):
        inst = xor_net_instance()
        assert inst.joint.open_probability({}, "e_true") == HALF
        assert inst.joint.open_probability(
            {"e_false": False}, "e_true") == 1

    def test_weather_support_is_exclusive(self):
        inst = xor_net_instance()
        support = weather_support(inst)
        assert sum(p for _, p in support) == 1
        patterns = {tuple(sorted(w.blocked)) for w, _ in support}
        assert patterns == {("e_false",), ("e_true",)}

    def test_parent_order_matters(self):
        b = InstanceBuilder(Variant.DEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="sure")
        b.add_edge("s", "t", 0, id="e", block_p=Fraction(1, 4))
        b.add_variable("a", (), [HALF])
        b.add_variable("b", (), [HALF])
        # Blocked only when a=1 and b=0: rows ordered a + 2b.
        b.add_variable("e", ("a", "b"), [0, 1, 0, 0])
        inst = b.build()
        assert inst.joint.open_probability({}, "e") == Fraction(3, 4)

    def test_in_degree_cap(self):
        b = InstanceBuilder(Variant.DEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="sure")
        b.add_edge("s", "t", 0, id="e", block_p=HALF)
        for name in ("a", "b", "c"):
            b.add_variable(name, (), [HALF])
        b.add_variable("e", ("a", "b", "c"), [0, 0, 0, 1, 1, 1, 0, 1])
        with pytest.raises(InvalidInstanceError):
            b.build()


class TestWeathers:
    def test_support_probabilities(self):
        inst = two_path_instance()
        support = dict(
            (tuple(sorted(w.blocked)), p) for w, p in weather_support(inst))
        assert support == {(): HALF, ("xt",): HALF}

    def test_cap(self):
        b = InstanceBuilder(Variant.INDEPENDENT)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 1, id="sure")
        for i in range(8):
            b.add_edge("s", "t", 0, id=f"u{i}", block_p=HALF)
        inst = b.build()
        with pytest.raises(EnumerationCapError):
            weather_support(inst, cap=100)

    def test_sampling_matches_support(self):
        inst = xor_net_instance()
        legal = {frozenset({"e_true"}), frozenset({"e_false"})}
        stream = SplitMix64(7)
        seen = {sample_weather(inst, stream).blocked for _ in range(64)}
        assert seen == legal

    def test_trial_streams_are_stable(self):
        a = [trial_stream(42, 3).next64() for _ in range(2)]
        b = [trial_stream(42, 3).next64() for _ in range(2)]
        assert a == b
        assert trial_stream(42, 4).next64() != a[0]

    def test_bernoulli_is_exact_for_thirds(self):
        stream = SplitMix64(123)
        hits = sum(stream.bernoulli(Fraction(1, 3)) for _ in range(3000))
        assert 850 < hits < 1150


class TestSensingSection:
    def make(self) -> CtpInstance:
        b = InstanceBuilder(Variant.SENSING)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 4, id="direct")
        b.add_edge("s", "t", 0, id="risky", block_p=HALF)
        b.add_sensing("s", "risky", Fraction(1, 8))
        return b.build()

    def test_lookup(self):
        inst = self.make()
        assert inst.sensing is not None
        assert inst.sensing.cost("s", "risky") == Cost.of("1/8")
        assert inst.sensing.cost("t", "risky") is None

    def test_round_trip(self):
        inst = self.make()
        assert instance_from_json(instance_to_json(inst)) == inst

    def test_sure_edge_target_rejected(self):
        b = InstanceBuilder(Variant.SENSING)
        b.set_endpoints("s", "t")
        b.add_edge("s", "t", 4, id="direct")
        b.add_edge("s", "t", 0, id="risky", block_p=HALF)
        b.add_sensing("s", "direct", 1)
        with pytest.raises(InvalidInstanceError):
            b.build()


@given(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=0,
                max_size=4, unique=True))
def test_belief_known_is_sorted(ids):
    belief = Belief.make("s", {i: True for i in ids})
    assert list(belief.known) == sorted(belief.known)


def test_as_fraction_forms():
    assert as_fraction("2/3") == Fraction(2, 3)
    assert as_fraction(2) == Fraction(2)
    assert as_fraction(Fraction(1, 7)) == Fraction(1, 7)
