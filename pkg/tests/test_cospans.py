import random

import pytest

from opspan.cospans import (
    Cospan,
    CospanError,
    base_change_cospan,
    carrier_slice,
    compose_cospans,
    compose_spans,
    cospan_sigma_act,
    cospans_equivalent,
    dualize,
    span_sigma_act,
    spans_equivalent,
    unit_cospan,
    unit_span,
)
from opspan.finset import FinMap, FinSet, SliceObj, constant, fun_set


POINT = FinSet(["*"])
X = FinSet(["x"])
Z2 = FinSet(["0", "1"])


def rand_cospan(rng, arity, base, carrier, max_fiber=2) -> Cospan:
    elems = {}
    for b in base:
        for k in range(rng.randint(1, max_fiber)):
            elems[f"m.{b}.{k}"] = b
    total = FinSet(elems)
    mid = SliceObj(total, base, FinMap(total, base, elems))
    cs = carrier_slice(carrier, base)

    def leg():
        return FinMap(cs.total, total, {
            el: rng.choice([m for m, b in elems.items()
                            if b == cs.projection(el)])
            for el in cs.total
        })

    return Cospan(base, carrier, arity, mid,
                  tuple(leg() for _ in range(arity)), leg())


def simple_cospan(middle_names, lefts, right, base=POINT, carrier=X) -> Cospan:
    total = FinSet(middle_names)
    mid = SliceObj(total, base, constant(total, base, base.elements[0]))
    cs = carrier_slice(carrier, base)
    el = cs.total.elements[0]
    return Cospan(base, carrier, len(lefts), mid,
                  tuple(FinMap(cs.total, total, {el: l}) for l in lefts),
                  FinMap(cs.total, total, {el: right}))


# -- shape validation ----------------------------------------------------------


def test_legs_must_commute_with_projection():
    base = FinSet(["s", "t"])
    total = FinSet(["m1", "m2"])
    mid = SliceObj(total, base, FinMap(total, base, {"m1": "s", "m2": "t"}))
    cs = carrier_slice(X, base)
    bad_leg = constant(cs.total, total, "m1")
    with pytest.raises(CospanError):
        Cospan(base, X, 1, mid, (bad_leg,), bad_leg)


# -- composition --------------------------------------------------------------


def test_unit_laws_up_to_equivalence():
    rng = random.Random(1)
    c = rand_cospan(rng, 3, POINT, X)
    with_units = compose_cospans((1, 2, 3), c, [unit_cospan(X, POINT)] * 3)
    assert cospans_equivalent(with_units, c) is not None
    under_unit = compose_cospans((1, 1, 1), unit_cospan(X, POINT), [c])
    assert cospans_equivalent(under_unit, c) is not None


def test_worked_gluing_example():
    outer = simple_cospan(["p", "q", "r"], ["p", "q"], "r")
    inner = simple_cospan(["s", "t"], ["s"], "t")
    glued = compose_cospans((1, 2), outer, [inner, unit_cospan(X, POINT)])
    assert len(glued.middle.total) == 4
    assert glued.arity == 2


def test_pushout_collapses_shared_pieces():
    outer = simple_cospan(["p", "q"], ["p", "p"], "q")
    inner = simple_cospan(["s"], ["s"], "s")
    glued = compose_cospans((1, 2), outer, [inner, inner])
    # both inner middles get glued onto the single left image point
    assert len(glued.middle.total) <= 3


def test_associativity_up_to_equivalence():
    rng = random.Random(2)
    for base in (POINT, FinSet(["s", "t"])):
        for _ in range(8):
            outer = rand_cospan(rng, 2, base, X)
            mid1 = rand_cospan(rng, 2, base, X)
            mid2 = rand_cospan(rng, 1, base, X)
            deep = rand_cospan(rng, 1, base, X)
            # ((outer . (mid1, mid2)) . (deep, 1, 1)) vs (outer . (mid1 . deep, mid2))
            once = compose_cospans((1, 1, 2), outer, [mid1, mid2])
            lhs = compose_cospans(
                (1, 2, 3), once,
                [deep, unit_cospan(X, base), unit_cospan(X, base)])
            mid1_deep = compose_cospans((1, 2), mid1, [deep, unit_cospan(X, base)])
            rhs = compose_cospans((1, 1, 2), outer, [mid1_deep, mid2])
            assert cospans_equivalent(lhs, rhs) is not None


def test_equivariance_of_composition():
    rng = random.Random(3)
    outer = rand_cospan(rng, 2, POINT, X)
    i1 = rand_cospan(rng, 1, POINT, X)
    i2 = rand_cospan(rng, 2, POINT, X)
    plain = compose_cospans((1, 2, 2), outer, [i1, i2])
    # permuting the outer's legs and the inner family gives an equivalent result
    swapped_outer = cospan_sigma_act((2, 1), outer)
    swapped = compose_cospans((2, 1, 1), swapped_outer, [i2, i1])
    assert cospans_equivalent(plain, swapped) is not None


def test_base_mismatch_rejected():
    rng = random.Random(4)
    a = rand_cospan(rng, 1, POINT, X)
    b = rand_cospan(rng, 1, FinSet(["s"]), X)
    with pytest.raises(CospanError):
        compose_cospans((1,), a, [b])


# -- spans ---------------------------------------------------------------------


def test_span_unit_law():
    rng = random.Random(5)
    c = rand_cospan(rng, 2, POINT, X)
    s = dualize(Z2, c)
    carrier = fun_set(X, Z2)
    with_units = compose_spans((1, 2), s, [unit_span(carrier, POINT)] * 2)
    assert spans_equivalent(with_units, s) is not None


def test_span_composition_matches_elementwise_pullback():
    rng = random.Random(6)
    outer = dualize(Z2, rand_cospan(rng, 2, POINT, X))
    inner1 = dualize(Z2, rand_cospan(rng, 1, POINT, X))
    inner2 = dualize(Z2, rand_cospan(rng, 1, POINT, X))
    composed = compose_spans((1, 2), outer, [inner1, inner2])
    count = 0
    for b in outer.middle.total:
        for a1 in inner1.middle.total:
            if outer.left_legs[0](b) != inner1.right_leg(a1):
                continue
            for a2 in inner2.middle.total:
                if outer.left_legs[1](b) == inner2.right_leg(a2):
                    count += 1
    assert len(composed.middle.total) == count


def test_span_associativity_up_to_equivalence():
    rng = random.Random(7)
    for _ in range(6):
        outer = dualize(Z2, rand_cospan(rng, 2, POINT, X))
        m1 = dualize(Z2, rand_cospan(rng, 1, POINT, X))
        m2 = dualize(Z2, rand_cospan(rng, 1, POINT, X))
        deep = dualize(Z2, rand_cospan(rng, 1, POINT, X))
        carrier = fun_set(X, Z2)
        once = compose_spans((1, 2), outer, [m1, m2])
        lhs = compose_spans((1, 2), once, [deep, unit_span(carrier, POINT)])
        rhs = compose_spans((1, 2), outer,
                            [compose_spans((1,), m1, [deep]), m2])
        assert spans_equivalent(lhs, rhs) is not None


# -- duality -------------------------------------------------------------------


def test_dual_of_unit_is_unit():
    got = dualize(Z2, unit_cospan(X, POINT))
    want = unit_span(fun_set(X, Z2), POINT)
    assert spans_equivalent(got, want) is not None


def test_dual_middle_size():
    c = simple_cospan(["a", "b", "c"], ["a"], "c")
    assert len(dualize(Z2, c).middle.total) == 8


def test_duality_intertwines_composition():
    rng = random.Random(8)
    for base in (POINT, FinSet(["s", "t"])):
        for _ in range(10):
            outer = rand_cospan(rng, 2, base, X, max_fiber=3)
            i1 = rand_cospan(rng, 1, base, X)
            i2 = rand_cospan(rng, 2, base, X)
            u = (1, 2, 2)
            lhs = dualize(Z2, compose_cospans(u, outer, [i1, i2]))
            rhs = compose_spans(u, dualize(Z2, outer),
                                [dualize(Z2, i1), dualize(Z2, i2)])
            assert spans_equivalent(lhs, rhs) is not None


def test_duality_respects_leg_permutation():
    rng = random.Random(9)
    c = rand_cospan(rng, 3, POINT, X)
    sigma = (2, 3, 1)
    lhs = dualize(Z2, cospan_sigma_act(sigma, c))
    rhs = span_sigma_act(sigma, dualize(Z2, c))
    assert spans_equivalent(lhs, rhs) is not None


# -- base change ---------------------------------------------------------------


def test_base_change_fibers():
    rng = random.Random(10)
    base = FinSet(["s", "t"])
    c = rand_cospan(rng, 2, base, X, max_fiber=3)
    y = FinSet(["y1", "y2", "y3"])
    h = FinMap(y, base, {"y1": "s", "y2": "s", "y3": "t"})
    pulled = base_change_cospan(c, h)
    assert pulled.base == y
    for point in y:
        assert len(pulled.middle.fiber(point)) == len(c.middle.fiber(h(point)))
