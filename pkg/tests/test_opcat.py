import json

import pytest

from opspan.omega import all_morphisms, inner_face, star_inclusion
from opspan.opcat import (
    OpCatError,
    as_discrete_opcat,
    check_rectified_coherence,
    discrete_cat,
    mutate_mu,
    mutate_phi,
    product_cat,
    rectify_generator,
    rectify_morphism,
    rectify_tree,
    sigma_u_elements,
    tree_generators,
    validate_fincat,
    validate_opcat,
)
from opspan.operads import act_on_generator, act_on_morphism, builtin_operad, eval_on_tree
from opspan.finset import FinSet
from opspan.trees import corolla, enumerate_trees, eta, parse_tree


@pytest.fixture(scope="module")
def cat_assoc2():
    return as_discrete_opcat(builtin_operad("associative", 2))


@pytest.fixture(scope="module")
def cat_assoc3(assoc3):
    return as_discrete_opcat(assoc3)


@pytest.fixture(scope="module")
def cat_commut3(commut3):
    return as_discrete_opcat(commut3)


# -- finite categories --------------------------------------------------------


def test_discrete_cat_valid():
    c = discrete_cat(FinSet(["a", "b"]))
    ok, why = validate_fincat(c)
    assert ok, why


def test_product_cat_object_count():
    c1 = discrete_cat(FinSet(["a", "b"]))
    c2 = discrete_cat(FinSet(["x", "y", "z"]))
    p = product_cat([c1, c2])
    assert len(p.objects) == 6
    ok, why = validate_fincat(p)
    assert ok, why


def test_empty_product_is_terminal():
    p = product_cat([])
    assert len(p.objects) == 1


# -- symmetry groups of maps --------------------------------------------------


def test_sigma_u_respects_fiber_sizes():
    u = (1, 1, 2)  # fibers of sizes 2 and 1: no target swap allowed
    elements = list(sigma_u_elements(u, 2))
    assert all(sj == (1, 2) for sj, _, _ in elements)
    assert len(elements) == 2  # only the fiber of size two moves


def test_sigma_u_full_product_when_sizes_match():
    u = (1, 1, 2, 2)
    elements = list(sigma_u_elements(u, 2))
    assert len(elements) == 2 * 2 * 2  # swap targets x two fiber groups


# -- validation ---------------------------------------------------------------


def test_commutative_opcat_valid(cat_commut3):
    assert validate_opcat(cat_commut3).ok


def test_associative_opcat_valid_full_small(cat_assoc2):
    assert validate_opcat(cat_assoc2).ok


def test_associative_opcat_valid_pairs(cat_assoc3):
    assert validate_opcat(cat_assoc3, check_triples=False).ok


def test_mu_mutation_detected(cat_assoc2):
    key = (2, (1, 2))
    entry = ("21", "1", "1")
    mutated = mutate_mu(cat_assoc2, key, entry, "12")
    verdict = validate_opcat(mutated, check_triples=False)
    assert not verdict.ok
    assert verdict.witness


def test_phi_mutation_detected(cat_assoc2):
    mutated = mutate_phi(cat_assoc2, ("u", "v", "obj"), "not-an-identity")
    verdict = validate_opcat(mutated, check_triples=False)
    assert not verdict.ok
    assert verdict.law == "coherence-component"


# -- rectification ------------------------------------------------------------


def test_rectify_unit_tree_is_terminal(cat_assoc3):
    assert len(rectify_tree(cat_assoc3, eta()).objects) == 1


def test_rectify_corolla_is_the_arity_category(cat_assoc3, assoc3):
    cat = rectify_tree(cat_assoc3, corolla(3))
    assert len(cat.objects) == len(assoc3.obs[3])


def test_rectify_product_sizes(cat_assoc3, assoc3):
    t = parse_tree("(v (v 1 2) 3 4)")  # valencies 3, 2
    cat = rectify_tree(cat_assoc3, t)
    assert len(cat.objects) == 6 * 2


def test_rectify_arity_overflow(cat_assoc2):
    with pytest.raises(OpCatError):
        rectify_tree(cat_assoc2, corolla(3))


def test_rectify_respects_segal_cores(cat_assoc3):
    """The tree value is the product over the star pieces by construction."""
    from opspan.trees import segal_core

    for t in enumerate_trees(3, 3):
        if t == eta() or any(t.arity(v) > 3 for v in t.vertices()):
            continue
        core = segal_core(t)
        product_size = 1
        for piece in core.pieces:
            product_size *= len(
                rectify_tree(cat_assoc3, piece.corolla).objects)
        assert len(rectify_tree(cat_assoc3, t).objects) == product_size


def test_degeneracy_inserts_unit(cat_assoc3):
    from opspan.omega import degeneracy

    t = corolla(2)
    d = degeneracy(t, (0,))
    table = rectify_generator(cat_assoc3, d)
    for src_name, dst_name in table.items():
        parts = json.loads(dst_name)
        assert cat_assoc3.unit_ob in parts


def test_outer_face_is_projection(cat_assoc3):
    t = parse_tree("(v (v 1 2) 3)")
    g = star_inclusion(t, (0,))
    table = rectify_generator(cat_assoc3, g)
    for src_name, dst_name in table.items():
        assert json.loads(dst_name) == [json.loads(src_name)[1]]


def test_inner_face_uses_composition(cat_assoc3, assoc3):
    t = parse_tree("(v (v 1 2) 3)")
    g = inner_face(t, (0,))
    table = rectify_generator(cat_assoc3, g)
    act = act_on_generator(assoc3, g)
    assert table == dict(act.pairs)


def test_rectified_action_equals_operad_action(cat_assoc3, assoc3):
    """Functor equality, not just isomorphism, against the direct action."""
    universe = [
        t for t in enumerate_trees(3, 3)
        if all(t.arity(v) <= 3 for v in t.vertices())
    ]
    allowed = set(universe)
    pairs_checked = 0
    for t in universe[:18]:
        for src in universe[:18]:
            for m in all_morphisms(src, t)[:4]:
                try:
                    table = rectify_morphism(cat_assoc3, m)
                except OpCatError:
                    continue
                assert table == dict(act_on_morphism(assoc3, m).pairs)
                pairs_checked += 1
    assert pairs_checked > 100


# -- coherence ----------------------------------------------------------------


def test_coherence_small_commutative(cat_commut3):
    report = check_rectified_coherence(cat_commut3, 3, 3)
    assert report.ok, report.witness
    assert report.pairs_checked > 1000


def test_coherence_small_associative(cat_assoc3):
    report = check_rectified_coherence(cat_assoc3, 3, 3)
    assert report.ok, report.witness


def test_coherence_detects_mu_mutation(cat_assoc3, assoc3):
    key = (2, (1, 1, 2))
    entry = next(iter(cat_assoc3.mu[key]))
    current = cat_assoc3.mu[key][entry]
    other = next(x for x in assoc3.obs[3] if x != current)
    mutated = mutate_mu(cat_assoc3, key, entry, other)
    report = check_rectified_coherence(mutated, 3, 3)
    assert not report.ok
    assert report.witness


def test_coherence_detects_phi_mutation(cat_assoc3):
    mutated = mutate_phi(cat_assoc3, ("some", "component"), "broken")
    report = check_rectified_coherence(mutated, 3, 3)
    assert not report.ok


def test_rectified_action_four_vertex_samples(cat_assoc3, assoc3):
    """Sampled functor-equality checks on trees with up to four vertices."""
    import random

    from opspan.operads import act_on_morphism

    rng = random.Random(41)
    universe = [
        t for t in enumerate_trees(4, 3)
        if all(t.arity(v) <= 3 for v in t.vertices())
        and t.vertex_count() >= 3
    ]
    checked = 0
    while checked < 60:
        src = rng.choice(universe)
        dst = rng.choice(universe)
        ms = all_morphisms(src, dst)
        if not ms:
            continue
        m = rng.choice(ms)
        try:
            table = rectify_morphism(cat_assoc3, m)
        except OpCatError:
            continue
        assert table == dict(act_on_morphism(assoc3, m).pairs)
        checked += 1
