"""Morphisms of the tree category as maps of free operads.

A morphism ``src -> dst`` is an edge map together with, for every vertex of
the source, an image subtree of the target whose root is the image of the
vertex's outgoing edge and whose leaves are the images of its ingoing edges.
A subtree is recorded as a root edge plus the set of its vertices; the empty
vertex set is the bare edge, i.e. the identity operation (this matters for
targets with nullary vertices, where an edge set alone would be ambiguous).

Generator constructors build the four standard classes (isomorphisms, inner
faces, outer faces as subtree inclusions, degeneracies); ``decompose`` factors
an arbitrary morphism into such letters and ``compose_word`` re-multiplies
them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .trees import (
    Edge,
    Leaf,
    Node,
    Path,
    Tree,
    eta,
    is_eta,
    normalize_with_map,
)


class MorphismError(ValueError):
    pass


# ---------------------------------------------------------------------------
# subtrees: (root edge, vertex set)

Subtree = tuple[Path, frozenset[Path]]


def subtree(root: Path, vertices=()) -> Subtree:
    return (root, frozenset(vertices))


def validate_subtree(t: Tree, img: Subtree) -> None:
    root, verts = img
    all_edges = set(t.edges())
    if root not in all_edges:
        raise MorphismError(f"no edge {root} in the target")
    if not verts:
        return
    all_verts = set(t.vertices())
    if not verts <= all_verts:
        raise MorphismError("subtree vertices must be vertices of the target")
    if root not in verts:
        raise MorphismError("subtree root edge must carry its top vertex")
    for v in verts:
        if v != root and (len(v) == 0 or v[:-1] not in verts):
            raise MorphismError(f"subtree vertex {v} is disconnected from the root")


def subtree_edges(t: Tree, img: Subtree) -> frozenset[Path]:
    root, verts = img
    out = {root}
    for v in verts:
        out.add(v)
        out.update(t.in_edges(v))
    return frozenset(out)


def subtree_leaves(t: Tree, img: Subtree) -> list[Path]:
    """Input edges of the subtree in path order; a bare edge is its own leaf."""
    root, verts = img
    if not verts:
        return [root]
    return sorted(
        p for v in verts for p in t.in_edges(v) if p not in verts
    )


def subtrees_rooted_at(t: Tree, r: Path) -> list[Subtree]:
    """All subtrees of ``t`` with root edge ``r``, bare edge included."""
    result = [subtree(r)]
    if isinstance(t.edge_at(r), Node):
        kid_options = [subtrees_rooted_at(t, k) for k in t.in_edges(r)]

        def combine(i: int, acc: frozenset[Path]):
            if i == len(kid_options):
                result.append((r, acc))
                return
            for _, kverts in kid_options[i]:
                combine(i + 1, acc | kverts)

        combine(0, frozenset([r]))
    return result


# ---------------------------------------------------------------------------
# the morphism type


@dataclass(frozen=True)
class OmegaMor:
    src: Tree
    dst: Tree
    edge_pairs: tuple[tuple[Path, Path], ...]
    image_pairs: tuple[tuple[Path, tuple[Path, tuple[Path, ...]]], ...]

    def edge(self, p: Path) -> Path:
        return self._edge_d[p]

    def image(self, v: Path) -> Subtree:
        return self._image_d[v]

    @property
    def _edge_d(self) -> dict[Path, Path]:
        d = self.__dict__.get("_edge_cache")
        if d is None:
            d = dict(self.edge_pairs)
            self.__dict__["_edge_cache"] = d
        return d

    @property
    def _image_d(self) -> dict[Path, Subtree]:
        d = self.__dict__.get("_image_cache")
        if d is None:
            d = {v: (root, frozenset(verts)) for v, (root, verts) in self.image_pairs}
            self.__dict__["_image_cache"] = d
        return d

    def __repr__(self) -> str:
        return f"OmegaMor({self.src.text()} -> {self.dst.text()})"


def make_morphism(src: Tree, dst: Tree, edge_map: dict[Path, Path],
                  vertex_images: dict[Path, Subtree]) -> OmegaMor:
    return OmegaMor(
        src=src,
        dst=dst,
        edge_pairs=tuple(sorted(edge_map.items())),
        image_pairs=tuple(
            (v, (root, tuple(sorted(verts))))
            for v, (root, verts) in sorted(vertex_images.items())
        ),
    )


def validate_morphism(m: OmegaMor) -> tuple[bool, str]:
    """Check the defining conditions; returns (verdict, reason)."""
    src_edges = set(m.src.edges())
    dst_edges = set(m.dst.edges())
    if set(m._edge_d) != src_edges:
        return False, "edge map is not total on the source edges"
    if not set(m._edge_d.values()) <= dst_edges:
        return False, "edge map leaves the target"
    if set(m._image_d) != set(m.src.vertices()):
        return False, "vertex images are not total on the source vertices"
    for v in m.src.vertices():
        img = m.image(v)
        try:
            validate_subtree(m.dst, img)
        except MorphismError as exc:
            return False, f"image of vertex {v} is not a subtree: {exc}"
        if img[0] != m.edge(v):
            return False, f"image of vertex {v} has the wrong root edge"
        ins = m.src.in_edges(v)
        mapped = [m.edge(p) for p in ins]
        if len(set(mapped)) != len(mapped):
            return False, f"edge map is not injective on the star of {v}"
        if sorted(mapped) != subtree_leaves(m.dst, img):
            return False, f"image of vertex {v} has the wrong leaves"
    return True, "ok"


def identity_mor(t: Tree) -> OmegaMor:
    return make_morphism(
        t, t,
        {p: p for p in t.edges()},
        {v: subtree(v, [v]) for v in t.vertices()},
    )


def compose_morphisms(g: OmegaMor, f: OmegaMor) -> OmegaMor:
    """The composite ``g . f`` (f applied first)."""
    if f.dst != g.src:
        raise MorphismError("non-matching boundary trees")
    edge_map = {p: g.edge(q) for p, q in f.edge_pairs}

    def push(img: Subtree) -> Subtree:
        root, verts = img
        if not verts:
            return subtree(g.edge(root))
        out: set[Path] = set()
        for w in verts:
            out |= g.image(w)[1]
        return (g.edge(root), frozenset(out))

    images = {v: push(f.image(v)) for v in f.src.vertices()}
    return make_morphism(f.src, g.dst, edge_map, images)


def compose_word(letters: list["GenStep"]) -> OmegaMor:
    """Multiply a generator word, first letter applied first."""
    if not letters:
        raise MorphismError("empty word has no boundary")
    m = letters[0].mor
    for step in letters[1:]:
        m = compose_morphisms(step.mor, m)
    return m


# ---------------------------------------------------------------------------
# raw-tree surgery with provenance tracking


def _copy_with_origin(t: Tree, p: Path, out: dict[Path, Path], raw: Path) -> Edge:
    """Copy the subtree of ``t`` at ``p``; record raw-path -> original-path."""
    out[raw] = p
    e = t.edge_at(p)
    if isinstance(e, Leaf):
        return e
    return Node(tuple(
        _copy_with_origin(t, p + (k,), out, raw + (k,))
        for k in range(len(e.children))
    ))


def _finish(raw_root: Edge, origin: dict[Path, Path]) -> tuple[Tree, dict[Path, Path]]:
    """Normalize a raw tree; return it with the map canonical-path -> original-path."""
    tree, relocation = normalize_with_map(raw_root)
    canon_origin = {}
    for raw, canon in relocation.items():
        if raw in origin:
            canon_origin[canon] = origin[raw]
    return tree, canon_origin


def _star_images(edge_map: dict[Path, Path], src: Tree) -> dict[Path, Subtree]:
    """Vertex images for a vertex-faithful morphism: each vertex to its star."""
    return {v: subtree(edge_map[v], [edge_map[v]]) for v in src.vertices()}


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GenStep:
    kind: str  # "iso" | "inner" | "outer" | "degeneracy"
    mor: OmegaMor
    datum: tuple

    def __repr__(self) -> str:
        return f"GenStep({self.kind}, {self.mor!r})"


def iso_mor(src: Tree, dst: Tree, bij: dict[Path, Path]) -> GenStep:
    """An isomorphism given by an incidence- and root-preserving edge bijection."""
    if sorted(bij) != sorted(src.edges()) or sorted(bij.values()) != sorted(dst.edges()):
        raise MorphismError("bijection must match the edge sets")
    if bij[()] != ():
        raise MorphismError("bijection must preserve the root edge")
    for v in src.vertices():
        w = bij[v]
        if not isinstance(dst.edge_at(w), Node):
            raise MorphismError(f"vertex {v} maps to a non-vertex edge")
        if sorted(bij[p] for p in src.in_edges(v)) != sorted(dst.in_edges(w)):
            raise MorphismError(f"bijection breaks incidence at {v}")
    mor = make_morphism(src, dst, dict(bij), _star_images(dict(bij), src))
    return GenStep("iso", mor, tuple(sorted(bij.items())))


def automorphism_mor(t: Tree, aut: dict[Path, Path]) -> GenStep:
    return iso_mor(t, t, aut)


def inner_face(t: Tree, e: Path) -> GenStep:
    """The contraction ``t/e -> t`` of an inner edge ``e``."""
    if not t.is_inner_edge(e):
        raise MorphismError(f"edge {e} is not inner")
    v1, v0 = e[:-1], e
    origin: dict[Path, Path] = {}

    def build(p: Path, raw: Path) -> Edge:
        # p lies on the path from the root edge to e (p != e)
        origin[raw] = p
        node = t.edge_at(p)
        assert isinstance(node, Node)
        kids: list[Edge] = []
        slot = 0
        for k in range(len(node.children)):
            child = p + (k,)
            if child == e:
                # splice the contracted vertex's children in place
                inner_node = t.edge_at(e)
                assert isinstance(inner_node, Node)
                for j in range(len(inner_node.children)):
                    kids.append(_copy_with_origin(t, e + (j,), origin, raw + (slot,)))
                    slot += 1
            elif child == e[:len(child)]:
                kids.append(build(child, raw + (slot,)))
                slot += 1
            else:
                kids.append(_copy_with_origin(t, child, origin, raw + (slot,)))
                slot += 1
        return Node(tuple(kids))

    raw_root = build((), ())
    src, canon_origin = _finish(raw_root, origin)
    edge_map = canon_origin
    x = next(q for q, orig in canon_origin.items()
             if orig == v1 and isinstance(src.edge_at(q), Node))
    images: dict[Path, Subtree] = {}
    for v in src.vertices():
        if v == x:
            images[v] = subtree(v1, [v1, v0])
        else:
            w = edge_map[v]
            images[v] = subtree(w, [w])
    mor = make_morphism(src, t, edge_map, images)
    return GenStep("inner", mor, (e, x, v1, v0))


def subtree_inclusion(t: Tree, vertex_set: frozenset[Path]) -> GenStep:
    """The outer face including the subtree spanned by a connected vertex set."""
    verts = frozenset(vertex_set)
    all_verts = set(t.vertices())
    if not verts or not verts <= all_verts:
        raise MorphismError("vertex set must be a nonempty subset of the vertices")
    minimal = [v for v in verts if v == () or v[:-1] not in verts]
    if len(minimal) != 1:
        raise MorphismError("vertex set is not connected")
    root_v = minimal[0]

    origin: dict[Path, Path] = {}
    next_label = [0]

    def build(p: Path, raw: Path) -> Edge:
        origin[raw] = p
        node = t.edge_at(p)
        assert isinstance(node, Node)
        kids = []
        for k in range(len(node.children)):
            child = p + (k,)
            if child in verts:
                kids.append(build(child, raw + (k,)))
            else:
                origin[raw + (k,)] = child
                next_label[0] += 1
                kids.append(Leaf(next_label[0]))
        return Node(tuple(kids))

    raw_root = build(root_v, ())
    src, canon_origin = _finish(raw_root, origin)
    mor = make_morphism(src, t, canon_origin, _star_images(canon_origin, src))
    return GenStep("outer", mor, tuple(sorted(verts)))


def eta_inclusion(t: Tree, edge: Path) -> GenStep:
    if edge not in set(t.edges()):
        raise MorphismError(f"no edge {edge} in the target")
    mor = make_morphism(eta(), t, {(): edge}, {})
    return GenStep("outer", mor, (edge,))


def star_inclusion(t: Tree, v: Path) -> GenStep:
    return subtree_inclusion(t, frozenset([v]))


def outer_face_drop(t: Tree, v: Path) -> GenStep:
    """The face deleting an outermost vertex (all ingoing edges are leaves)."""
    if v not in set(t.vertices()):
        raise MorphismError(f"no vertex {v}")
    if any(isinstance(t.edge_at(p), Node) for p in t.in_edges(v)):
        raise MorphismError(f"vertex {v} has non-leaf ingoing edges")
    rest = frozenset(set(t.vertices()) - {v})
    if not rest:
        return eta_inclusion(t, ())
    return subtree_inclusion(t, rest)


def degeneracy(t: Tree, e: Path) -> GenStep:
    """The degeneracy ``t+e -> t`` replacing edge ``e`` by a unary vertex."""
    if e not in set(t.edges()):
        raise MorphismError(f"no edge {e}")
    origin: dict[Path, Path] = {}

    def build(p: Path, raw: Path) -> Edge:
        if p == e:
            origin[raw] = e
            inner = _copy_with_origin(t, e, origin, raw + (0,))
            return Node((inner,))
        origin[raw] = p
        node = t.edge_at(p)
        if isinstance(node, Leaf):
            return node
        return Node(tuple(
            build(p + (k,), raw + (k,)) for k in range(len(node.children))
        ))

    raw_root = build((), ())
    src, canon_origin = _finish(raw_root, origin)
    edge_map = canon_origin
    # the inserted unary vertex: a Node edge mapping to e whose child also maps to e
    x = next(
        q for q in src.vertices()
        if edge_map[q] == e and edge_map[q + (0,)] == e and src.arity(q) == 1
    )
    images: dict[Path, Subtree] = {}
    for v in src.vertices():
        if v == x:
            images[v] = subtree(e)
        else:
            w = edge_map[v]
            images[v] = subtree(w, [w])
    mor = make_morphism(src, t, edge_map, images)
    return GenStep("degeneracy", mor, (e, x))


def make_generator(kind: str, t: Tree, datum) -> GenStep:
    """Dispatching constructor for the four generator classes."""
    if kind == "auto":
        return automorphism_mor(t, dict(datum))
    if kind == "inner_face":
        return inner_face(t, tuple(datum))
    if kind == "outer_face":
        return outer_face_drop(t, tuple(datum))
    if kind == "star_inclusion":
        return star_inclusion(t, tuple(datum))
    if kind == "subtree":
        return subtree_inclusion(t, frozenset(tuple(p) for p in datum))
    if kind == "degeneracy":
        return degeneracy(t, tuple(datum))
    raise MorphismError(f"unknown generator kind {kind!r}")


# ---------------------------------------------------------------------------
# isomorphism search


def enumerate_isos(src: Tree, dst: Tree) -> list[dict[Path, Path]]:
    """All incidence- and root-preserving edge bijections src -> dst."""
    from .trees import _shape_key  # shared shape signature

    def recurse(e: Edge, f: Edge, pe: Path, pf: Path) -> list[dict[Path, Path]]:
        if isinstance(e, Leaf) != isinstance(f, Leaf):
            return []
        if isinstance(e, Leaf):
            return [{pe: pf}]
        assert isinstance(f, Node)
        if len(e.children) != len(f.children):
            return []
        out: list[dict[Path, Path]] = []
        keys_f = [_shape_key(c) for c in f.children]

        def assign(k: int, used: frozenset[int], acc: dict[Path, Path]):
            if k == len(e.children):
                out.append(dict(acc))
                return
            key = _shape_key(e.children[k])
            for j in range(len(f.children)):
                if j in used or keys_f[j] != key:
                    continue
                for sub in recurse(e.children[k], f.children[j], pe + (k,), pf + (j,)):
                    assign(k + 1, used | {j}, {**acc, **sub})

        assign(0, frozenset(), {pe: pf})
        return out

    return recurse(src.root, dst.root, (), ())


def trees_isomorphic_labeled(t1: Tree, t2: Tree) -> bool:
    """Brute-force search for a label-preserving structural bijection."""
    for bij in enumerate_isos(t1, t2):
        if all(
            t1.leaf_label(p) == t2.leaf_label(q)
            for p, q in bij.items()
            if isinstance(t1.edge_at(p), Leaf)
        ):
            return True
    return False


# ---------------------------------------------------------------------------
# decomposition into generator letters


def decompose(m: OmegaMor, strategy: str = "lex", check: bool = True) -> list[GenStep]:
    """Factor a valid morphism into generator letters.

    The word reads first-applied first: degeneracies (innermost first), one
    optional isomorphism, inner faces, then the outer subtree inclusion.  The
    strategy picks the deterministic order inside each class; ``revlex``
    gives an alternative factorization of the same morphism.  ``check=False``
    skips input validation and the recomposition assertion in hot loops.
    """
    if check:
        ok, why = validate_morphism(m)
        if not ok:
            raise MorphismError(f"cannot decompose an invalid morphism: {why}")
    if m == identity_mor(m.src):
        return []
    rev = strategy == "revlex"
    letters: list[GenStep] = []

    # 1. collapse vertices with bare images, deepest first
    cur_src = m.src
    cur = m
    while True:
        bare = [v for v in cur_src.vertices() if not cur.image(v)[1]]
        if not bare:
            break
        bare.sort(key=lambda p: (len(p), p), reverse=not rev)
        v = bare[0]
        step, cur = _collapse_step(cur, v)
        letters.append(step)
        cur_src = cur.src

    # 2. the image region in the target
    if is_eta(cur_src):
        letters.append(eta_inclusion(m.dst, cur.edge(())))
        if check:
            _check_recomposition(letters, m)
        return letters

    region_vertices: set[Path] = set()
    for v in cur_src.vertices():
        region_vertices |= cur.image(v)[1]

    # 3. contraction chain down from the included subtree
    if region_vertices == set(m.dst.vertices()):
        chain_target = m.dst
        chain: dict[Path, Path] = {p: p for p in m.dst.edges()}
        outer_step = None
    else:
        outer_step = subtree_inclusion(m.dst, frozenset(region_vertices))
        chain_target = outer_step.mor.src
        chain = {p: q for p, q in outer_step.mor.edge_pairs}

    contracted: set[Path] = set()
    for v in cur_src.vertices():
        root, verts = cur.image(v)
        contracted |= verts - {root}

    face_steps: list[GenStep] = []
    cur_tree = chain_target
    for e_dst in sorted(contracted, reverse=rev):
        inv = {q: p for p, q in chain.items()}
        step = inner_face(cur_tree, inv[e_dst])
        face_steps.insert(0, step)
        chain = {p: chain[q] for p, q in step.mor.edge_pairs}
        cur_tree = step.mor.src

    # 4. the connecting isomorphism
    inv_chain = {q: p for p, q in chain.items()}
    bij = {p: inv_chain[cur.edge(p)] for p in cur_src.edges()}
    if cur_src != cur_tree or any(p != q for p, q in bij.items()):
        letters.append(iso_mor(cur_src, cur_tree, bij))
    letters.extend(face_steps)
    if outer_step is not None:
        letters.append(outer_step)
    if check:
        _check_recomposition(letters, m)
    return letters


def _collapse_step(m: OmegaMor, v: Path) -> tuple[GenStep, OmegaMor]:
    """One degeneracy letter collapsing the unary vertex ``v`` of ``m.src``."""
    t = m.src
    if t.arity(v) != 1:
        raise MorphismError(f"vertex {v} is not unary")
    origin: dict[Path, Path] = {}

    def build(p: Path, raw: Path) -> Edge:
        if p == v:
            # drop the vertex, keep its unique child subtree on this edge
            return build_kept(v + (0,), raw)
        return build_kept(p, raw)

    def build_kept(p: Path, raw: Path) -> Edge:
        origin[raw] = p
        node = t.edge_at(p)
        if isinstance(node, Leaf):
            return node
        return Node(tuple(
            build(p + (k,), raw + (k,)) for k in range(len(node.children))
        ))

    raw_root = build((), ())
    quotient, canon_origin = _finish(raw_root, origin)

    # the letter: t -> quotient, a degeneracy instance
    inv = {orig: q for q, orig in canon_origin.items()}
    to_quotient_edge = {
        p: (inv[v + (0,)] if p == v else inv[p]) for p in t.edges()
    }
    images: dict[Path, Subtree] = {}
    for w in t.vertices():
        if w == v:
            images[w] = subtree(to_quotient_edge[v])
        else:
            q = to_quotient_edge[w]
            images[w] = subtree(q, [q])
    letter_mor = make_morphism(t, quotient, to_quotient_edge, images)
    step = GenStep("degeneracy", letter_mor, (to_quotient_edge[v], v))

    # the residual morphism quotient -> m.dst
    res_edge = {q: m.edge(orig) for q, orig in canon_origin.items()}
    res_images = {
        q: m.image(orig)
        for q, orig in canon_origin.items()
        if isinstance(quotient.edge_at(q), Node)
    }
    residual = make_morphism(quotient, m.dst, res_edge, res_images)
    return step, residual


def _check_recomposition(letters: list[GenStep], m: OmegaMor) -> None:
    got = compose_word(letters) if letters else identity_mor(m.src)
    if got != m:
        raise MorphismError("internal error: decomposition does not recompose")


# ---------------------------------------------------------------------------
# exhaustive morphism and letter enumeration (used by tests and validators)


def all_morphisms(src: Tree, dst: Tree) -> list[OmegaMor]:
    """Every valid morphism src -> dst, by exhaustive assignment."""
    if is_eta(src):
        return [
            make_morphism(src, dst, {(): e}, {}) for e in sorted(dst.edges())
        ]
    results: list[OmegaMor] = []

    def assign(vs: list[Path], edge_map: dict[Path, Path],
               images: dict[Path, Subtree]):
        if not vs:
            results.append(make_morphism(src, dst, dict(edge_map), dict(images)))
            return
        v, rest = vs[0], vs[1:]
        root_img = edge_map[v]
        ins = src.in_edges(v)
        for sub in subtrees_rooted_at(dst, root_img):
            leaves = subtree_leaves(dst, sub)
            if len(leaves) != len(ins):
                continue
            for perm in permutations(leaves):
                new_edges = dict(edge_map)
                for p, q in zip(ins, perm):
                    new_edges[p] = q
                assign(rest, new_edges, {**images, v: sub})

    for root_target in sorted(dst.edges()):
        assign(list(src.vertices()), {(): root_target}, {})

    out = []
    seen = set()
    for m in results:
        if m in seen:
            continue
        seen.add(m)
        if validate_morphism(m)[0]:
            out.append(m)
    return sorted(out, key=lambda m: (m.edge_pairs, m.image_pairs))


def generator_letters(src: Tree, dst: Tree) -> list[GenStep]:
    """All generator-type morphisms src -> dst (iso composites included)."""
    out: dict[OmegaMor, GenStep] = {}

    def add(step: GenStep):
        out.setdefault(step.mor, step)

    for bij in enumerate_isos(src, dst):
        add(iso_mor(src, dst, bij))
    candidates: list[GenStep] = []
    for e in dst.inner_edges():
        candidates.append(inner_face(dst, e))
    for vset in _connected_vertex_sets(dst):
        candidates.append(subtree_inclusion(dst, vset))
    for e in sorted(dst.edges()):
        candidates.append(eta_inclusion(dst, e))
        candidates.append(degeneracy(dst, e))
    for cand in candidates:
        for bij in enumerate_isos(src, cand.mor.src):
            pre = iso_mor(src, cand.mor.src, bij)
            add(GenStep(cand.kind, compose_morphisms(cand.mor, pre.mor), cand.datum))
    return [out[m] for m in sorted(out, key=lambda m: (m.edge_pairs, m.image_pairs))]


def _connected_vertex_sets(t: Tree) -> list[frozenset[Path]]:
    sets: list[frozenset[Path]] = []
    for root_v in t.vertices():
        def grow(done: frozenset[Path], frontier: list[Path]):
            if not frontier:
                sets.append(done)
                return
            head, rest = frontier[0], frontier[1:]
            grow(done, rest)
            kids = [p for p in t.in_edges(head) if isinstance(t.edge_at(p), Node)]
            grow(done | {head}, rest + kids)

        kids = [p for p in t.in_edges(root_v) if isinstance(t.edge_at(p), Node)]
        grow(frozenset([root_v]), kids)
    seen = set()
    out = []
    for s in sets:
        if s not in seen and s:
            seen.add(s)
            out.append(s)
    return sorted(out)
