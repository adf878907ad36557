"""Low-observer equivalence on values and whole states."""

from rescheck import (
    EMPTY,
    HIGH,
    LOW,
    BoolV,
    ClosV,
    EquivConfig,
    EquivStats,
    FunType,
    IntV,
    LocV,
    RefType,
    State,
    Store,
    UnitV,
    low_equiv,
    parse,
    value_equiv,
)

S0 = Store()


def veq(v1, v2, t, s1=None, s2=None, **kw):
    return value_equiv(v1, s1 or Store(), v2, s2 or Store(), t, **kw)


class TestBaseValues:
    def test_low_is_equality(self):
        assert veq(IntV(3), IntV(3), LOW)
        assert not veq(IntV(3), IntV(7), LOW)
        assert veq(BoolV(True), BoolV(True), LOW)
        assert not veq(BoolV(True), BoolV(False), LOW)
        assert veq(UnitV(), UnitV(), LOW)

    def test_low_distinguishes_shapes(self):
        assert not veq(IntV(0), BoolV(False), LOW)
        assert not veq(IntV(0), UnitV(), LOW)

    def test_high_relates_any_same_shaped_values(self):
        assert veq(IntV(3), IntV(7), HIGH)
        assert veq(BoolV(True), BoolV(False), HIGH)
        assert veq(UnitV(), UnitV(), HIGH)
        assert not veq(IntV(3), BoolV(True), HIGH)


class TestReferences:
    def test_low_refs_compare_contents_not_addresses(self):
        s1 = Store({0: IntV(5)})
        s2 = Store({3: IntV(5)})
        assert veq(LocV(0), LocV(3), RefType(LOW), s1, s2)
        s2.data[3] = IntV(6)
        assert not veq(LocV(0), LocV(3), RefType(LOW), s1, s2)

    def test_high_refs_ignore_contents(self):
        s1 = Store({0: IntV(5)})
        s2 = Store({0: IntV(99)})
        assert veq(LocV(0), LocV(0), RefType(HIGH), s1, s2)

    def test_dangling_low_ref_is_not_equivalent(self):
        s1 = Store({0: IntV(5)})
        assert not veq(LocV(0), LocV(4), RefType(LOW), s1, Store())

    def test_chained_locations_do_not_loop_forever(self):
        # cells that point at each other terminate via the visited set
        s1 = Store({0: LocV(1), 1: LocV(0)})
        s2 = Store({0: LocV(1), 1: LocV(0)})
        assert veq(LocV(0), LocV(0), RefType(LOW), s1, s2)


class TestClosures:
    def test_identical_closures_relate(self):
        c = ClosV(parse("x + 1"), "x", {})
        assert veq(c, c, FunType(LOW, LOW, EMPTY))

    def test_identical_bodies_with_agreeing_captures(self):
        body = parse("x + a")
        c1 = ClosV(body, "x", {"a": IntV(2)})
        c2 = ClosV(body, "x", {"a": IntV(2)})
        assert veq(c1, c2, FunType(LOW, LOW, EMPTY))

    def test_sampling_distinguishes_different_functions(self):
        c1 = ClosV(parse("x"), "x", {})
        c2 = ClosV(parse("x + 1"), "x", {})
        assert not veq(c1, c2, FunType(LOW, LOW, EMPTY))

    def test_extensionally_equal_bodies_relate(self):
        c1 = ClosV(parse("x + 0"), "x", {})
        c2 = ClosV(parse("x"), "x", {})
        assert veq(c1, c2, FunType(LOW, LOW, EMPTY))

    def test_high_to_high_observed_through_related_args(self):
        c1 = ClosV(parse("x + 1"), "x", {})
        c2 = ClosV(parse("x + 2"), "x", {})
        # any int back is fine at a high result
        assert veq(c1, c2, FunType(HIGH, HIGH, EMPTY))
        # but at a low result the outputs must agree pointwise
        assert not veq(c1, c2, FunType(LOW, LOW, EMPTY))

    def test_non_closures_never_relate_at_function_types(self):
        assert not veq(IntV(1), IntV(1), FunType(LOW, LOW, EMPTY))
        assert not veq(ClosV(parse("x"), "x", {}), IntV(1), FunType(LOW, LOW, EMPTY))

    def test_fuel_burning_bodies_count_as_inconclusive(self):
        looping = parse("while true { () }")
        c1 = ClosV(looping, "x", {})
        c2 = ClosV(parse("0"), "x", {})
        stats = EquivStats()
        assert veq(c1, c2, FunType(LOW, LOW, EMPTY), stats=stats)
        assert stats.inconclusive_runs > 0
        assert stats.closure_pairs_sampled == 1

    def test_sampling_is_deterministic_in_the_seed(self):
        c1 = ClosV(parse("x + 1"), "x", {})
        c2 = ClosV(parse("x * 2"), "x", {})
        t = FunType(HIGH, LOW, EMPTY)
        cfg = EquivConfig(rng_seed=5)
        assert veq(c1, c2, t, cfg=cfg) == veq(c1, c2, t, cfg=cfg)


class TestLowEquiv:
    def test_empty_environment_relates_everything(self):
        s1 = State({"x": IntV(1)}, Store())
        s2 = State({}, Store({0: IntV(9)}))
        assert low_equiv({}, s1, s2)

    def test_low_bindings_must_agree(self):
        s1 = State({"l": IntV(3)}, S0)
        s2 = State({"l": IntV(3)}, S0)
        assert low_equiv({"l": LOW}, s1, s2)
        s3 = State({"l": IntV(4)}, S0)
        assert not low_equiv({"l": LOW}, s1, s3)

    def test_high_bindings_are_unconstrained(self):
        s1 = State({"h": IntV(3)}, S0)
        s2 = State({"h": BoolV(True)}, S0)
        assert low_equiv({"h": HIGH}, s1, s2)

    def test_high_bindings_may_be_absent(self):
        s1 = State({"h": IntV(3)}, S0)
        s2 = State({}, S0)
        assert low_equiv({"h": HIGH}, s1, s2)
        assert low_equiv({"h": RefType(HIGH)}, s1, s2)

    def test_constrained_bindings_must_be_present(self):
        s1 = State({"l": IntV(3)}, S0)
        s2 = State({}, S0)
        assert not low_equiv({"l": LOW}, s1, s2)
        assert not low_equiv({"l": LOW}, s2, s1)

    def test_low_refs_compared_through_the_store(self):
        t = {"r": RefType(LOW)}
        s1 = State({"r": LocV(0)}, Store({0: IntV(7)}))
        s2 = State({"r": LocV(5)}, Store({5: IntV(7)}))
        assert low_equiv(t, s1, s2)
        s2.store.data[5] = IntV(8)
        assert not low_equiv(t, s1, s2)

    def test_high_refs_unconstrained(self):
        t = {"r": RefType(HIGH)}
        s1 = State({"r": LocV(0)}, Store({0: IntV(7)}))
        s2 = State({"r": LocV(0)}, Store({0: IntV(999)}))
        assert low_equiv(t, s1, s2)

    def test_function_bindings_are_constrained(self):
        t = {"f": FunType(LOW, LOW, EMPTY)}
        c = ClosV(parse("x"), "x", {})
        s1 = State({"f": c}, S0)
        s2 = State({"f": c}, S0)
        assert low_equiv(t, s1, s2)
        s3 = State({"f": ClosV(parse("x + 1"), "x", {})}, S0)
        assert not low_equiv(t, s1, s3)

    def test_mixed_environment(self):
        tenv = {"l": LOW, "h": HIGH, "r": RefType(LOW)}
        s1 = State({"l": IntV(1), "h": IntV(5), "r": LocV(0)}, Store({0: IntV(2)}))
        s2 = State({"l": IntV(1), "h": IntV(6), "r": LocV(1)}, Store({1: IntV(2)}))
        assert low_equiv(tenv, s1, s2)

    def test_reflexive_and_symmetric(self):
        tenv = {"l": LOW, "r": RefType(LOW), "h": HIGH}
        s1 = State({"l": IntV(1), "r": LocV(0), "h": IntV(4)}, Store({0: IntV(2)}))
        s2 = State({"l": IntV(1), "r": LocV(3), "h": IntV(9)}, Store({3: IntV(2)}))
        assert low_equiv(tenv, s1, s1)
        assert low_equiv(tenv, s1, s2) == low_equiv(tenv, s2, s1)

    def test_transitive_on_first_order_environments(self):
        tenv = {"l": LOW, "r": RefType(LOW)}
        states = [
            State({"l": IntV(1), "r": LocV(i)}, Store({i: IntV(2)})) for i in range(3)
        ]
        a, b, c = states
        assert low_equiv(tenv, a, b) and low_equiv(tenv, b, c)
        assert low_equiv(tenv, a, c)
