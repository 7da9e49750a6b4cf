"""Non-planar rooted trees with labeled leaves.

A tree is a nested structure of edges: an edge is either a leaf carrying a
positive integer label or a node whose children form a multiset of edges.
The unit tree (written ``@``) is a single edge that is both root and leaf; the
node with zero children ``(v)`` is a different tree.  Children are stored in a
canonical sorted order, so structural equality of ``Tree`` values is equality
of non-planar labeled trees.

Edges are addressed by their path from the root: the root edge is ``()`` and
the k-th child edge of the vertex under path ``p`` is ``p + (k,)``.  A vertex
is addressed by the path of its outgoing edge.  Slot ``i`` of a vertex (the
operadic input numbering) is its ``i``-th child in canonical order, 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from itertools import permutations
from typing import Iterator

Path = tuple[int, ...]


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Node:
    children: tuple["Edge", ...]


Edge = Leaf | Node


def _sort_key(e: Edge):
    if isinstance(e, Leaf):
        return (1, e.label)
    return (0, tuple(_sort_key(c) for c in e.children))


def _normalize(e: Edge) -> Edge:
    if isinstance(e, Leaf):
        return e
    return Node(tuple(sorted((_normalize(c) for c in e.children), key=_sort_key)))


def _render(e: Edge) -> str:
    if isinstance(e, Leaf):
        return str(e.label)
    if not e.children:
        return "(v)"
    return "(v " + " ".join(_render(c) for c in e.children) + ")"


@dataclass(frozen=True)
class Tree:
    root: Edge

    def __repr__(self) -> str:
        return f"Tree({self.text()!r})"

    def text(self) -> str:
        if isinstance(self.root, Leaf):
            return "@"
        return _render(self.root)

    def edge_at(self, path: Path) -> Edge:
        e = self.root
        for k in path:
            if isinstance(e, Leaf) or not 0 <= k < len(e.children):
                raise TreeError(f"no edge at path {path}")
            e = e.children[k]
        return e

    def edges(self) -> list[Path]:
        out: list[Path] = []

        def walk(e: Edge, p: Path):
            out.append(p)
            if isinstance(e, Node):
                for k, c in enumerate(e.children):
                    walk(c, p + (k,))

        walk(self.root, ())
        return out

    def vertices(self) -> list[Path]:
        return [p for p in self.edges() if isinstance(self.edge_at(p), Node)]

    def in_edges(self, v: Path) -> list[Path]:
        node = self.edge_at(v)
        if not isinstance(node, Node):
            raise TreeError(f"no vertex at {v}")
        return [v + (k,) for k in range(len(node.children))]

    def arity(self, v: Path) -> int:
        return len(self.in_edges(v))

    def leaf_paths(self) -> list[Path]:
        return [p for p in self.edges() if isinstance(self.edge_at(p), Leaf)]

    def leaf_label(self, p: Path) -> int:
        e = self.edge_at(p)
        if not isinstance(e, Leaf):
            raise TreeError(f"edge {p} is not a leaf")
        return e.label

    def leaf_count(self) -> int:
        return len(self.leaf_paths())

    def vertex_count(self) -> int:
        return len(self.vertices())

    def is_inner_edge(self, p: Path) -> bool:
        return p != () and isinstance(self.edge_at(p), Node)

    def inner_edges(self) -> list[Path]:
        return [p for p in self.edges() if self.is_inner_edge(p)]


def make_tree(root: Edge) -> Tree:
    """Normalize child order and validate the leaf labeling."""
    root = _normalize(root)
    t = Tree(root)
    labels = sorted(t.leaf_label(p) for p in t.leaf_paths())
    if labels != list(range(1, len(labels) + 1)):
        raise TreeError(f"leaf labels must be exactly 1..n, got {labels}")
    return t


def eta() -> Tree:
    return Tree(Leaf(1))


def corolla(n: int) -> Tree:
    return make_tree(Node(tuple(Leaf(i) for i in range(1, n + 1))))


def is_eta(t: Tree) -> bool:
    return isinstance(t.root, Leaf)


# ---------------------------------------------------------------------------
# parsing


def parse_tree(text: str) -> Tree:
    """Parse ``@`` | ``(v ...)`` | bare label expressions."""
    toks = text.replace("(", " ( ").replace(")", " ) ").split()
    if not toks:
        raise TreeError("empty tree expression")
    if toks == ["@"]:
        return eta()
    pos = 0

    def parse_edge() -> Edge:
        nonlocal pos
        if pos >= len(toks):
            raise TreeError("unexpected end of expression")
        tok = toks[pos]
        if tok == "(":
            pos += 1
            if pos >= len(toks) or toks[pos] != "v":
                raise TreeError("expected 'v' after '('")
            pos += 1
            children = []
            while pos < len(toks) and toks[pos] != ")":
                children.append(parse_edge())
            if pos >= len(toks):
                raise TreeError("missing ')'")
            pos += 1
            return Node(tuple(children))
        if tok.isdigit() and int(tok) > 0:
            pos += 1
            return Leaf(int(tok))
        raise TreeError(f"unexpected token {tok!r}")

    root = parse_edge()
    if pos != len(toks):
        raise TreeError(f"trailing input from token {toks[pos]!r}")
    if isinstance(root, Leaf):
        raise TreeError("a bare label is not a tree; use '@' for the unit tree")
    return make_tree(root)


# ---------------------------------------------------------------------------
# canonical form


@dataclass(frozen=True)
class CanonicalTree:
    encoding: str
    leaf_count: int
    vertex_count: int


def canonicalize(t: Tree) -> CanonicalTree:
    return CanonicalTree(t.text(), t.leaf_count(), t.vertex_count())


# ---------------------------------------------------------------------------
# stars and Segal cores


@dataclass(frozen=True)
class StarPiece:
    """A one-vertex subtree, relabeled as a corolla.

    ``leaf_edges[i]`` is the ambient edge matched with corolla leaf ``i+1``
    and ``root_edge`` the ambient edge matched with the corolla root.  The
    piece for the unit tree has no vertex and an empty correspondence.
    """

    vertex: Path | None
    corolla: Tree
    leaf_edges: tuple[Path, ...]
    root_edge: Path


def star(t: Tree, v: Path) -> StarPiece:
    ins = t.in_edges(v)
    return StarPiece(vertex=v, corolla=corolla(len(ins)),
                     leaf_edges=tuple(ins), root_edge=v)


@dataclass(frozen=True)
class SegalCore:
    pieces: tuple[StarPiece, ...]
    gluings: tuple[tuple[Path, Path, Path], ...]  # (inner edge, lower vertex, upper vertex)


def segal_core(t: Tree) -> SegalCore:
    """One star per vertex plus the inner-edge overlaps; the unit tree is its
    own single piece."""
    if is_eta(t):
        piece = StarPiece(vertex=None, corolla=eta(), leaf_edges=(), root_edge=())
        return SegalCore(pieces=(piece,), gluings=())
    pieces = tuple(star(t, v) for v in t.vertices())
    gluings = tuple(
        (e, e[:-1], e) for e in t.inner_edges()
    )
    return SegalCore(pieces=pieces, gluings=gluings)


# ---------------------------------------------------------------------------
# automorphisms

EdgeBij = tuple[tuple[Path, Path], ...]


def _shape_key(e: Edge):
    if isinstance(e, Leaf):
        return (1,)
    return (0, tuple(sorted(_shape_key(c) for c in e.children)))


def automorphisms(t: Tree) -> list[dict[Path, Path]]:
    """All incidence- and root-preserving edge bijections of ``t``.

    Leaf labels move freely, so the group is the structural symmetry group of
    the underlying shape; for a corolla with n leaves it has order n!.
    """

    def recurse(e: Edge, p: Path) -> list[dict[Path, Path]]:
        if isinstance(e, Leaf):
            return [{p: p}]
        by_shape: dict[tuple, list[int]] = {}
        for k, c in enumerate(e.children):
            by_shape.setdefault(_shape_key(c), []).append(k)
        child_maps = [recurse(c, p + (k,)) for k, c in enumerate(e.children)]
        results: list[dict[Path, Path]] = []

        groups = sorted(by_shape.values())

        def assemble(gi: int, acc_perm: dict[int, int]):
            if gi == len(groups):
                # combine child automorphisms under the chosen slot permutation
                def combine(ci: int, acc: dict[Path, Path]):
                    if ci == len(e.children):
                        results.append(dict(acc))
                        return
                    tgt = acc_perm[ci]
                    for m in child_maps[ci]:
                        shifted = {
                            src: (p + (tgt,)) + dst[len(p) + 1:]
                            for src, dst in m.items()
                        }
                        combine(ci + 1, {**acc, **shifted})

                combine(0, {p: p})
                return
            group = groups[gi]
            for perm in permutations(group):
                assemble(gi + 1, {**acc_perm, **dict(zip(group, perm))})

        assemble(0, {})
        return results

    return sorted(recurse(t.root, ()), key=lambda m: sorted(m.items()))


def leaf_permutation(t: Tree, aut: dict[Path, Path]) -> dict[int, int]:
    """The label permutation induced by an edge bijection of ``t``."""
    return {
        t.leaf_label(p): t.leaf_label(aut[p])
        for p in t.leaf_paths()
    }


# ---------------------------------------------------------------------------
# enumeration


@cache
def _leafless(v_budget: int) -> tuple[Edge, ...]:
    """All leafless subtree shapes using at least one and at most v_budget vertices."""
    if v_budget <= 0:
        return ()
    out: set[Edge] = set()
    for forest in _leafless_forests(v_budget - 1):
        out.add(_normalize(Node(forest)))
    return tuple(sorted(out, key=_sort_key))


def _count_vertices(e: Edge) -> int:
    if isinstance(e, Leaf):
        return 0
    return 1 + sum(_count_vertices(c) for c in e.children)


def _partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    """All set partitions of items into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for k in range(len(part)):
            yield part[:k] + [part[k] + (first,)] + part[k + 1:]
        yield part + [(first,)]


@cache
def _edges_with_labels(labels: tuple[int, ...], v_budget: int) -> frozenset[Edge]:
    """All edges whose leaf label set is exactly ``labels``, within budget."""
    out: set[Edge] = set()
    if len(labels) == 1:
        out.add(Leaf(labels[0]))
    if v_budget < 1:
        return out
    # a node: partition labels among leaf-bearing children, optionally add
    # leafless children, spend remaining vertex budget
    for part in _partitions(labels):
        blocks = [tuple(sorted(b)) for b in part]

        def fill(bi: int, budget: int, acc: tuple[Edge, ...]):
            if bi == len(blocks):
                # optionally append leafless children with the leftover budget
                for extra in _leafless_forests(budget):
                    out.add(_normalize(Node(acc + extra)))
                return
            for c in _edges_with_labels(blocks[bi], budget):
                used = _count_vertices(c)
                if used <= budget:
                    fill(bi + 1, budget - used, acc + (c,))

        fill(0, v_budget - 1, ())
    return frozenset(out)


@cache
def _leafless_forests(v_budget: int) -> tuple[tuple[Edge, ...], ...]:
    """All multisets (as sorted tuples) of leafless subtrees within budget."""
    out: set[tuple[Edge, ...]] = {()}
    for first_budget in range(1, v_budget + 1):
        for tree in _leafless(first_budget):
            used = _count_vertices(tree)
            for rest in _leafless_forests(v_budget - used):
                out.add(tuple(sorted((tree,) + rest, key=_sort_key)))
    return tuple(sorted(out, key=lambda f: tuple(_sort_key(e) for e in f)))


def enumerate_trees(max_vertices: int, max_leaves: int) -> list[Tree]:
    """All distinct labeled trees within the bounds, sorted by encoding.

    The unit tree is always present (it has no vertex); other trees need at
    least one vertex.
    """
    if max_vertices < 0 or max_leaves < 0:
        raise TreeError("bounds must be nonnegative")
    found: set[Tree] = {eta()}
    for n in range(0, max_leaves + 1):
        labels = tuple(range(1, n + 1))
        for e in _edges_with_labels(labels, max_vertices):
            if isinstance(e, Leaf):
                continue
            found.add(make_tree(e))
    return sorted(found, key=lambda t: t.text())


# ---------------------------------------------------------------------------
# plumbing shared by tree surgery in other modules


def normalize_with_map(raw_root: Edge) -> tuple[Tree, dict[Path, Path]]:
    """Normalize a raw edge, returning the path relocation map raw -> canonical."""

    def walk(e: Edge, raw: Path, canon: Path, out: dict[Path, Path]) -> Edge:
        out[raw] = canon
        if isinstance(e, Leaf):
            return e
        order = sorted(range(len(e.children)),
                       key=lambda k: _sort_key(_normalize(e.children[k])))
        new_children = []
        for new_k, old_k in enumerate(order):
            new_children.append(
                walk(e.children[old_k], raw + (old_k,), canon + (new_k,), out)
            )
        return Node(tuple(new_children))

    relocation: dict[Path, Path] = {}
    root = walk(raw_root, (), (), relocation)
    t = Tree(root)
    labels = sorted(t.leaf_label(p) for p in t.leaf_paths())
    if labels != list(range(1, len(labels) + 1)):
        raise TreeError(f"leaf labels must be exactly 1..n, got {labels}")
    return t, relocation


def path_str(p: Path) -> str:
    return "r" if not p else "r." + ".".join(str(k) for k in p)


def path_from_str(s: str) -> Path:
    if s == "r":
        return ()
    if not s.startswith("r."):
        raise TreeError(f"bad edge id {s!r}")
    return tuple(int(x) for x in s[2:].split("."))
