import json
import random

import pytest

from opspan.omega import all_morphisms, compose_morphisms, inner_face
from opspan.operads import (
    OperadError,
    act_on_generator,
    act_on_morphism,
    all_perms,
    block_perm,
    builtin_operad,
    compose_perm,
    cycle_to_last,
    eval_on_tree,
    inverse_perm,
    validate_operad,
    with_mutated_compose,
    with_mutated_sym,
)
from opspan.trees import enumerate_trees, eta, parse_tree


# -- independent oracle: block substitution on orderings -----------------------


def oracle_block_substitution(wa, wb, i):
    """Substitute the word wb into letter i of wa, relabeling by offsets."""
    m = len(wb)
    out = []
    for x in wa:
        if x < i:
            out.append(x)
        elif x == i:
            out.extend(y + i - 1 for y in wb)
        else:
            out.append(x + m - 1)
    return tuple(out)


def word_of(name):
    return () if name == "e" else tuple(int(c) for c in name)


def name_of(word):
    return "".join(str(x) for x in word) if word else "e"


# -- permutation helpers ------------------------------------------------------


def test_perm_algebra():
    s, t = (2, 3, 1), (1, 3, 2)
    assert compose_perm(s, inverse_perm(s)) == (1, 2, 3)
    assert compose_perm(s, t) == (2, 1, 3)


def test_cycle_to_last():
    assert cycle_to_last(2, 4) == (1, 4, 2, 3)
    assert cycle_to_last(4, 4) == (1, 2, 3, 4)
    assert cycle_to_last(3, 4) == (1, 2, 4, 3)


def test_block_perm_blocks_move_together():
    # two blocks of sizes 2 and 1 swapped
    assert block_perm((2, 1), [2, 1]) == (2, 3, 1)


# -- builtins -----------------------------------------------------------------


def test_commutative_sizes(commut5):
    for n in range(6):
        assert len(commut5.elements(n)) == 1


def test_associative_sizes(assoc4):
    assert len(assoc4.elements(3)) == 6
    assert len(assoc4.elements(0)) == 1
    assert assoc4.is_pointed_01()


def test_associative_unit_composition(assoc4):
    assert assoc4.compose(2, 2, 1, "12", "12") == "123"
    assert assoc4.compose(2, 2, 2, "12", "12") == "123"


def test_associative_composition_matches_oracle(assoc4):
    rng = random.Random(3)
    for _ in range(200):
        n, m = rng.randint(1, 3), rng.randint(0, 3)
        if n + m - 1 > 4:
            continue
        i = rng.randint(1, n)
        a = rng.choice(assoc4.elements(n).elements)
        b = rng.choice(assoc4.elements(m).elements)
        got = assoc4.compose(n, m, i, a, b)
        assert word_of(got) == oracle_block_substitution(word_of(a), word_of(b), i)


def test_validate_builtins(assoc4, commut5):
    assert validate_operad(assoc4).ok
    assert validate_operad(commut5).ok


def test_mutation_detected_with_witness(assoc3):
    mutated = with_mutated_compose(assoc3, (2, 2, 1), ("12", "21"), "123")
    verdict = validate_operad(mutated)
    assert not verdict.ok
    assert verdict.witness


def test_sym_mutation_detected(assoc3):
    mutated = with_mutated_sym(assoc3, 2, (2, 1), "12", "12")
    verdict = validate_operad(mutated)
    assert not verdict.ok


# -- evaluation on trees ------------------------------------------------------


def test_eval_unit_tree_singleton(assoc4, commut5):
    assert len(eval_on_tree(assoc4, eta())) == 1
    assert len(eval_on_tree(commut5, parse_tree("(v (v 1 2) 3)"))) == 1


def test_eval_product_sizes(assoc4):
    t = parse_tree("(v (v 1 2) 3 4)")  # valencies 3 and 2
    assert len(eval_on_tree(assoc4, t)) == 6 * 2
    for t in enumerate_trees(3, 3):
        if any(t.arity(v) > 4 for t_v in [t] for v in t.vertices()):
            continue
        expected = 1
        for v in t.vertices():
            expected *= len(assoc4.elements(t.arity(v)))
        assert len(eval_on_tree(assoc4, t)) == expected


def test_eval_arity_overflow(assoc3):
    with pytest.raises(OperadError):
        eval_on_tree(assoc3, parse_tree("(v 1 2 3 4)"))


# -- the contravariant action -------------------------------------------------


def test_inner_face_action_units_law(assoc4):
    t = parse_tree("(v (v 1 2) 3)")
    g = inner_face(t, (0,))
    act = act_on_generator(assoc4, g)
    assert act(json.dumps(["12", "12"], separators=(",", ":"))) == \
        json.dumps(["123"], separators=(",", ":"))


def test_inner_face_action_matches_block_oracle(assoc4):
    t = parse_tree("(v (v 1 2) 3)")
    g = inner_face(t, (0,))
    act = act_on_generator(assoc4, g)
    # vertex order: root () first, inner vertex (0,) second
    for root_el in assoc4.elements(2):
        for inner_el in assoc4.elements(2):
            got = json.loads(act(json.dumps([root_el, inner_el],
                                            separators=(",", ":"))))[0]
            expected = oracle_block_substitution(
                word_of(root_el), word_of(inner_el), 1)
            assert word_of(got) == expected


def test_commutative_action_always_singleton(commut4):
    t = parse_tree("(v (v 1 2) 3)")
    for e in t.inner_edges():
        act = act_on_generator(commut4, inner_face(t, e))
        assert len(act.dst) == 1


def test_action_strategy_independent(assoc3):
    universe = [
        t for t in enumerate_trees(2, 3)
        if all(t.arity(v) <= 3 for v in t.vertices())
    ]
    for src in universe:
        for dst in universe:
            for m in all_morphisms(src, dst):
                assert act_on_morphism(assoc3, m) == \
                    act_on_morphism(assoc3, m, "revlex")


def test_action_functorial_on_samples(assoc3):
    universe = [
        t for t in enumerate_trees(2, 2)
        if all(t.arity(v) <= 3 for v in t.vertices())
    ]
    rng = random.Random(9)
    checked = 0
    for src in universe:
        for mid in universe:
            ms1 = all_morphisms(src, mid)
            if not ms1:
                continue
            for dst in universe:
                ms2 = all_morphisms(mid, dst)
                if not ms2:
                    continue
                m1 = rng.choice(ms1)
                m2 = rng.choice(ms2)
                comp = compose_morphisms(m2, m1)
                lhs = act_on_morphism(assoc3, comp)
                rhs = act_on_morphism(assoc3, m2).then(act_on_morphism(assoc3, m1))
                assert lhs == rhs
                checked += 1
    assert checked > 50


def test_equivariance_of_inner_face_action(assoc4):
    """Relabeling before or after contracting gives the same composite map."""
    from opspan.omega import automorphism_mor
    from opspan.trees import automorphisms

    t = parse_tree("(v (v 1 2) 3)")
    g = inner_face(t, (0,))
    for aut in automorphisms(t):
        sigma = automorphism_mor(t, aut)
        left = act_on_morphism(assoc4, compose_morphisms(sigma.mor, g.mor))
        right = act_on_morphism(assoc4, sigma.mor).then(
            act_on_morphism(assoc4, g.mor))
        assert left == right


def test_action_strategy_independent_three_vertices(assoc5):
    """Word independence over all pairs of trees with up to three vertices."""
    from opspan.operads import OperadError

    universe = [
        t for t in enumerate_trees(3, 3)
        if all(t.arity(v) <= 3 for v in t.vertices())
    ]
    checked = skipped = 0
    for src in universe:
        for dst in universe:
            for m in all_morphisms(src, dst):
                try:
                    lhs = act_on_morphism(assoc5, m)
                    rhs = act_on_morphism(assoc5, m, "revlex")
                except OperadError:
                    skipped += 1
                    continue
                assert lhs == rhs
                checked += 1
    assert checked > 19000
    assert skipped == 0
