from itertools import permutations

import pytest

from opspan.trees import (
    Leaf,
    Node,
    Tree,
    TreeError,
    automorphisms,
    canonicalize,
    corolla,
    enumerate_trees,
    eta,
    leaf_permutation,
    parse_tree,
    segal_core,
    star,
)


# -- independent oracles ------------------------------------------------------


def iso_oracle(t1: Tree, t2: Tree) -> bool:
    """Label-preserving isomorphism by brute force over edge matchings."""
    e1, e2 = t1.edges(), t2.edges()
    if len(e1) != len(e2):
        return False

    def match(p, q) -> bool:
        a, b = t1.edge_at(p), t2.edge_at(q)
        if isinstance(a, Leaf) != isinstance(b, Leaf):
            return False
        if isinstance(a, Leaf):
            return a.label == b.label
        if len(a.children) != len(b.children):
            return False
        kids1 = [p + (k,) for k in range(len(a.children))]
        kids2 = [q + (k,) for k in range(len(b.children))]
        for perm in permutations(range(len(kids2))):
            if all(match(kids1[i], kids2[perm[i]]) for i in range(len(kids1))):
                return True
        return False

    return match((), ())


def aut_count_oracle(t: Tree) -> int:
    """Count incidence- and root-preserving edge bijections by brute force."""

    def count(p, q) -> int:
        a, b = t.edge_at(p), t.edge_at(q)
        if isinstance(a, Leaf) != isinstance(b, Leaf):
            return 0
        if isinstance(a, Leaf):
            return 1
        if len(a.children) != len(b.children):
            return 0
        k = len(a.children)
        total = 0
        for perm in permutations(range(k)):
            prod = 1
            for i in range(k):
                prod *= count(p + (i,), q + (perm[i],))
                if prod == 0:
                    break
            total += prod
        return total

    return count((), ())


# -- parsing ------------------------------------------------------------------


def test_parse_corolla():
    t = parse_tree("(v 1 2)")
    assert t.vertex_count() == 1
    assert t.leaf_count() == 2


def test_parse_unit_tree():
    t = parse_tree("@")
    assert t.vertex_count() == 0
    assert t.leaf_count() == 1


def test_parse_two_vertex():
    t = parse_tree("(v (v 1 2) 3)")
    assert t.vertex_count() == 2
    assert t.inner_edges() == [(0,)]


def test_parse_nullary_vertex_is_not_unit():
    assert parse_tree("(v)") != parse_tree("@")
    assert parse_tree("(v)").vertex_count() == 1


@pytest.mark.parametrize("bad", ["", "(v 1 3)", "(v 1 1)", "(v 1 2", "(w 1)",
                                 "(v 0)", "7", "@ @"])
def test_parse_rejects(bad):
    with pytest.raises(TreeError):
        parse_tree(bad)


# -- canonical form -----------------------------------------------------------


def test_canonical_child_order_irrelevant():
    assert canonicalize(parse_tree("(v 1 2)")) == canonicalize(parse_tree("(v 2 1)"))
    assert canonicalize(parse_tree("(v (v 1 2) 3)")) == canonicalize(
        parse_tree("(v 3 (v 1 2))"))


def test_canonical_distinguishes_labelings():
    assert canonicalize(parse_tree("(v (v 1 2) 3)")) != canonicalize(
        parse_tree("(v (v 1 3) 2)"))


def test_canonicalize_matches_iso_oracle_exhaustively():
    universe = enumerate_trees(4, 3)
    for t1 in universe:
        for t2 in universe:
            assert (canonicalize(t1) == canonicalize(t2)) == iso_oracle(t1, t2), (
                t1.text(), t2.text())


# -- stars and Segal cores ----------------------------------------------------


def test_star_shapes():
    t = parse_tree("(v (v 1 2) 3)")
    assert star(t, ()).corolla == corolla(2)
    assert star(t, (0,)).corolla == corolla(2)
    t0 = parse_tree("(v)")
    assert star(t0, ()).corolla == parse_tree("(v)")


def test_star_unknown_vertex():
    with pytest.raises(TreeError):
        star(parse_tree("(v 1)"), (5,))


def test_segal_core_corolla_is_single_piece():
    core = segal_core(corolla(3))
    assert len(core.pieces) == 1
    assert core.gluings == ()


def test_segal_core_two_vertices_glued_on_inner_edge():
    t = parse_tree("(v (v 1 2) 3)")
    core = segal_core(t)
    assert len(core.pieces) == 2
    assert [p.corolla for p in core.pieces] == [corolla(2), corolla(2)]
    assert core.gluings == (((0,), (), (0,)),)


def test_segal_core_linear_tree():
    t = parse_tree("(v (v 1))")
    core = segal_core(t)
    assert [p.corolla for p in core.pieces] == [corolla(1), corolla(1)]
    assert len(core.gluings) == 1


def test_segal_core_unit_tree():
    core = segal_core(eta())
    assert len(core.pieces) == 1
    assert core.pieces[0].corolla == eta()


def test_segal_core_counts_and_valencies():
    for t in enumerate_trees(4, 3):
        if t == eta():
            continue
        core = segal_core(t)
        assert len(core.pieces) == t.vertex_count()
        assert sorted(p.corolla.leaf_count() for p in core.pieces) == sorted(
            t.arity(v) for v in t.vertices())
        assert len(core.gluings) == len(t.inner_edges())


# -- automorphisms ------------------------------------------------------------


@pytest.mark.parametrize("n,expected", [(0, 1), (1, 1), (2, 2), (3, 6), (4, 24),
                                        (5, 120)])
def test_corolla_automorphism_count(n, expected):
    assert len(automorphisms(corolla(n))) == expected


def test_unit_tree_has_only_identity():
    assert automorphisms(eta()) == [{(): ()}]


def test_twin_subtrees_automorphisms_cross_checked():
    t = parse_tree("(v (v 1 2) (v 3 4))")
    auts = automorphisms(t)
    assert len(auts) == aut_count_oracle(t) == 8


def test_automorphism_counts_match_oracle():
    for t in enumerate_trees(3, 4):
        assert len(automorphisms(t)) == aut_count_oracle(t), t.text()


def test_automorphisms_are_label_permutations():
    t = corolla(3)
    perms = {tuple(sorted(leaf_permutation(t, a).items())) for a in automorphisms(t)}
    assert len(perms) == 6


# -- enumeration --------------------------------------------------------------


def test_enumerate_zero_vertices():
    assert enumerate_trees(0, 5) == [eta()]


def test_enumerate_one_vertex_two_leaves():
    got = {t.text() for t in enumerate_trees(1, 2)}
    assert got == {"@", "(v)", "(v 1)", "(v 1 2)"}


def test_enumeration_monotone():
    for mv in range(0, 3):
        for ml in range(0, 3):
            here = set(enumerate_trees(mv, ml))
            assert here <= set(enumerate_trees(mv + 1, ml))
            assert here <= set(enumerate_trees(mv, ml + 1))


def test_enumeration_unique_and_within_bounds():
    trees = enumerate_trees(3, 3)
    assert len({canonicalize(t) for t in trees}) == len(trees)
    for t in trees:
        assert t.vertex_count() <= 3
        assert t == eta() or t.leaf_count() <= 3
