import json
import math

import pytest

from opspan.adjoint import (
    AdjointError,
    adjoint_equivariant,
    adjoint_family,
    alpha_for_word,
    alpha_step,
    build_adjoint_corolla,
    check_lax_cocycle,
    coadjoint_build,
    config_type_check,
    config_type_wrt_check,
    forget_last,
    segal_alpha_bijective,
    transition_alpha,
)
from opspan.cospans import cospans_equivalent, dualize, spans_equivalent, unit_cospan, unit_span
from opspan.finset import FinSet, fun_set, pair_name
from opspan.omega import automorphism_mor, degeneracy, inner_face, star_inclusion
from opspan.operads import builtin_operad, eval_on_tree, with_mutated_compose
from opspan.trees import automorphisms, corolla, parse_tree


X1 = FinSet(["p"])
X2 = FinSet(["p", "q"])


# -- independent oracle for the comparison square ------------------------------


def config_square_oracle(o, n, m):
    """Enumerate both sides of the grafting square from first principles."""
    o0 = o.obs[0].elements[0]

    def forget(k, w):
        return o.compose(k + 1, 0, k + 1, w, o0)

    # the glued side: tagged pairs identified along the binary overlap
    left_side = [("A", w, b) for w in o.obs[n + 1] for b in o.obs[m]]
    right_side = [("B", a, w) for a in o.obs[n] for w in o.obs[m + 1]]
    from opspan.operads import cycle_to_last

    tau_b = cycle_to_last(2, m + 1)
    glue = {}
    for k in o.obs[2]:
        for a in o.obs[n]:
            for b in o.obs[m]:
                la = ("A", o.compose(2, n, 1, k, a), b)
                lb = ("B", a, o.act(m + 1, tau_b, o.compose(m, 2, 1, b, k)))
                glue.setdefault(la, set()).add(lb)
                glue.setdefault(lb, set()).add(la)
    classes = []
    seen = set()
    for node in left_side + right_side:
        if node in seen:
            continue
        stack, cls = [node], set()
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            cls.add(cur)
            stack.extend(glue.get(cur, ()))
        classes.append(frozenset(cls))

    tau_a = cycle_to_last(n + 1, n + m)

    def to_corner(member):
        if member[0] == "A":
            _, w, b = member
            return (o.act(n + m, tau_a, o.compose(m, n + 1, 1, b, w)),
                    forget(n, w), b)
        _, a, w = member
        return (o.compose(m + 1, n, 1, w, a), a, forget(m, w))

    images = set()
    for cls in classes:
        corner_values = {to_corner(x) for x in cls}
        if len(corner_values) != 1:
            return None  # square does not even commute
        images.add(next(iter(corner_values)))
    if len(images) != len(classes):
        return False  # comparison not injective
    # the target: pairs (w in O(n+m), (a, b)) with matching projections
    target = {
        (w, a, b)
        for w in o.obs[n + m] for a in o.obs[n] for b in o.obs[m]
        if forget(n + m - 1, w) == o.compose(m, n, 1, b, a)
    }
    return images == target


# -- corolla cospans ------------------------------------------------------------


def test_middle_sizes_are_factorials(assoc5):
    for n in range(5):
        c = build_adjoint_corolla(assoc5, n)
        assert len(c.middle.total) == math.factorial(n + 1)


def test_commutative_corollas_are_singletons(commut5):
    for n in range(5):
        c = build_adjoint_corolla(commut5, n)
        assert len(c.middle.total) == 1


def test_projection_deletes_last_strand(assoc5):
    c = build_adjoint_corolla(assoc5, 3)
    for w in assoc5.obs[4]:
        assert c.middle.projection(w) == w.replace("4", "")


def test_left_side_size(assoc5):
    c = build_adjoint_corolla(assoc5, 2)
    assert len(c.middle.total) == 6
    assert len(c.base) == 2
    # two legs from a 2x2x... carrier slice: the coproduct of leg sources
    assert c.arity == 2
    assert len(c.left_legs[0].src) == 4  # O(2) x O(2)


def test_corollas_equivariant(assoc5, commut5):
    for n in range(5):
        assert adjoint_equivariant(assoc5, n)
        assert adjoint_equivariant(commut5, n)


def test_unit_arity_is_identity_cospan(assoc5):
    c = build_adjoint_corolla(assoc5, 1)
    assert cospans_equivalent(c, unit_cospan(assoc5.obs[2], assoc5.obs[1])) \
        is not None


def test_pointedness_required():
    bad = builtin_operad("associative", 3)
    bad = with_mutated_compose(bad, (1, 1, 1), ("1", "1"), "1")  # still pointed
    # build a two-element unary part by hand: reuse associative tables but
    # claim a fake nullary set
    import dataclasses

    from opspan.finset import FinSet as FS

    weird = dataclasses.replace  # not a dataclass; construct manually
    from opspan.operads import SetOperad

    op = builtin_operad("associative", 3)
    fat = SetOperad(op.name, op.n_max,
                    [FS(["x", "y"])] + op.obs[1:], op.unit, op.comp, op.sym)
    with pytest.raises(AdjointError):
        build_adjoint_corolla(fat, 2)


def test_arity_overflow(assoc3):
    with pytest.raises(AdjointError):
        build_adjoint_corolla(assoc3, 3)


# -- transitions -----------------------------------------------------------------


def test_outer_face_transition_is_bijection(assoc4):
    t = parse_tree("(v (v 1 2) 3)")
    step = star_inclusion(t, (0,))
    a = transition_alpha(assoc4, step)
    assert a.is_isomorphism()


def test_automorphism_transition_is_bijection(assoc4):
    t = corolla(3)
    for aut in automorphisms(t):
        a = transition_alpha(assoc4, automorphism_mor(t, aut))
        assert a.is_isomorphism()


def test_degeneracy_transition_is_bijection(assoc4):
    t = parse_tree("(v 1 2)")
    a = transition_alpha(assoc4, degeneracy(t, (0,)))
    assert a.is_isomorphism()


def test_commutative_segal_transition_trivial(commut4):
    assert segal_alpha_bijective(commut4, 2, 2)


def test_word_transition_source_matches_family(assoc4):
    t = parse_tree("(v (v 1 2) 3)")
    step = inner_face(t, (0,))
    src, tgt, maps = alpha_for_word(assoc4, t, [step])
    astep = transition_alpha(assoc4, step)
    assert set(src) == set(astep.source)
    for v in src:
        assert maps[v] == astep.maps[v]


# -- configuration type -----------------------------------------------------------


def test_commutative_always_configuration_type(commut6):
    for n in range(2, 5):
        for m in range(2, 5):
            if n + m > 6:
                continue
            v = config_type_check(commut6, n, m)
            assert v.strict_pullback and v.pushout_legs_injective


def test_associative_small_pairs(assoc6):
    for (n, m) in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        v = config_type_check(assoc6, n, m)
        assert v.strict_pullback, (n, m, v.counterexample)
        assert v.pushout_legs_injective


def test_oracle_agrees(assoc6, commut6):
    for (n, m) in [(2, 2), (2, 3)]:
        for o in (assoc6, commut6):
            expected = config_square_oracle(o, n, m)
            got = config_type_check(o, n, m).strict_pullback
            assert expected is True and got is True


def test_mutated_operad_fails_with_witness(assoc4):
    mutated = with_mutated_compose(assoc4, (2, 2, 1), ("12", "12"), "132")
    v = config_type_check(mutated, 2, 2)
    assert not v.strict_pullback
    assert v.counterexample


def test_verdict_preconditions(assoc4):
    with pytest.raises(AdjointError):
        config_type_check(assoc4, 1, 2)
    with pytest.raises(AdjointError):
        config_type_check(assoc4, 2, 3)  # needs arity 5 > 4


# -- the cocycle condition ---------------------------------------------------------


def test_lax_cocycle_two_vertices(assoc4):
    report = check_lax_cocycle(assoc4, 2, 3)
    assert report.ok, report.witness
    assert report.pairs_checked > 500


def test_lax_cocycle_commutative(commut4):
    report = check_lax_cocycle(commut4, 2, 3)
    assert report.ok, report.witness


def test_cocycle_detects_mutation(assoc4):
    mutated = with_mutated_compose(assoc4, (2, 2, 1), ("12", "12"), "132")
    report = check_lax_cocycle(mutated, 2, 3)
    assert not report.ok
    assert report.witness


# -- the dual story -----------------------------------------------------------------


def test_coadjoint_is_dualized_adjoint_table_exact(assoc4, commut4):
    for o in (assoc4, commut4):
        for n in range(0, 4):
            for x in (X1, X2):
                assert coadjoint_build(o, x, n) == dualize(
                    x, build_adjoint_corolla(o, n))


def test_coadjoint_unit_case(assoc4):
    s = coadjoint_build(assoc4, X2, 1)
    want = unit_span(fun_set(assoc4.obs[2], X2), assoc4.obs[1])
    assert spans_equivalent(s, want) is not None


def test_wrt_singleton_always_passes(assoc4):
    v = config_type_wrt_check(assoc4, X1, 2, 2)
    assert v.strict_pullback


def test_wrt_commutative_passes(commut4):
    for x in (X1, X2):
        v = config_type_wrt_check(commut4, x, 2, 2)
        assert v.strict_pullback


def test_wrt_agrees_with_plain_when_legs_injective(assoc4, commut4, assoc6):
    cases = [(assoc4, 2, 2), (commut4, 2, 2), (assoc6, 2, 3), (assoc6, 3, 2)]
    for o, n, m in cases:
        plain = config_type_check(o, n, m)
        if not plain.pushout_legs_injective:
            continue
        dual = config_type_wrt_check(o, X2, n, m)
        assert dual.strict_pullback == plain.strict_pullback


# -- family plumbing ------------------------------------------------------------------


def test_family_components_are_base_changed_corollas(assoc4):
    t = parse_tree("(v (v 1 2) 3)")
    fam = adjoint_family(assoc4, t)
    ev = eval_on_tree(assoc4, t)
    assert fam.base == ev
    for v in t.vertices():
        comp = fam.components[v]
        n_v = t.arity(v)
        assert len(comp.middle.total) == len(ev) * math.factorial(n_v + 1) // \
            math.factorial(n_v)


def test_forget_last_composes_to_nullary(assoc4):
    f3 = forget_last(assoc4, 3)
    f2 = forget_last(assoc4, 2)
    for w in assoc4.obs[4]:
        assert f2(f3(w)) == w.replace("4", "").replace("3", "")
