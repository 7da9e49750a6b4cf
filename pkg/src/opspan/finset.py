"""Finite sets, maps and slice objects, with exact (co)limits.

Everything here is literal: sets are sorted tuples of name strings, maps are
total assignments, and pushouts / pullbacks / exponentials are computed
elementwise with deterministic element naming so that repeated runs produce
byte-identical output.  Composite element names are JSON-encoded structures,
which keeps nested constructions unambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product as iproduct
from typing import Iterable, Iterator


class FinSetError(ValueError):
    pass


def _name(*parts) -> str:
    """Canonical composite element name."""
    return json.dumps(list(parts), separators=(",", ":"))


@dataclass(frozen=True)
class FinSet:
    """A finite set of atom names, stored sorted and duplicate-free."""

    elements: tuple[str, ...]

    def __init__(self, elements: Iterable[str]):
        elems = tuple(sorted(elements))
        if len(set(elems)) != len(elems):
            raise FinSetError("duplicate element names")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @cached_property
    def _index(self) -> frozenset[str]:
        return frozenset(self.elements)


EMPTY = FinSet(())
POINT = FinSet(("*",))


@dataclass(frozen=True)
class FinMap:
    """A total map of finite sets, stored as a sorted assignment."""

    src: FinSet
    dst: FinSet
    pairs: tuple[tuple[str, str], ...]

    def __init__(self, src: FinSet, dst: FinSet, assignment):
        d = dict(assignment)
        if set(d) != set(src.elements):
            raise FinSetError("assignment is not total on the source")
        bad = [v for v in d.values() if v not in dst]
        if bad:
            raise FinSetError(f"assignment leaves the target: {bad[0]!r}")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "dst", dst)
        object.__setattr__(self, "pairs", tuple(sorted(d.items())))

    @cached_property
    def _d(self) -> dict[str, str]:
        return dict(self.pairs)

    def __call__(self, x: str) -> str:
        return self._d[x]

    def then(self, g: "FinMap") -> "FinMap":
        """Composite ``g . self`` (apply self first)."""
        if g.src != self.dst:
            raise FinSetError("non-composable maps")
        return FinMap(self.src, g.dst, {x: g(y) for x, y in self.pairs})

    @cached_property
    def image(self) -> FinSet:
        return FinSet(set(self._d.values()))

    def is_injective(self) -> bool:
        return len(set(self._d.values())) == len(self.pairs)

    def is_surjective(self) -> bool:
        return set(self._d.values()) == set(self.dst.elements)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "FinMap":
        if not self.is_bijective():
            raise FinSetError("map is not invertible")
        return FinMap(self.dst, self.src, {v: k for k, v in self.pairs})


def identity(s: FinSet) -> FinMap:
    return FinMap(s, s, {x: x for x in s})


def constant(src: FinSet, dst: FinSet, value: str) -> FinMap:
    return FinMap(src, dst, {x: value for x in src})


def terminal_map(s: FinSet) -> FinMap:
    return constant(s, POINT, "*")


# ---------------------------------------------------------------------------
# products and coproducts


@lru_cache(maxsize=1 << 20)
def pair_name(a: str, b: str) -> str:
    return _name(a, b)


def product(a: FinSet, b: FinSet) -> tuple[FinSet, FinMap, FinMap]:
    """Binary product with projections; elements named as JSON pairs."""
    elems = {pair_name(x, y): (x, y) for x in a for y in b}
    p = FinSet(elems)
    pa = FinMap(p, a, {n: xy[0] for n, xy in elems.items()})
    pb = FinMap(p, b, {n: xy[1] for n, xy in elems.items()})
    return p, pa, pb


def product_many(sets: list[FinSet]) -> tuple[FinSet, list[FinMap]]:
    """n-ary product; elements are JSON tuples, one projection per factor."""
    combos = list(iproduct(*[s.elements for s in sets])) if sets else [()]
    elems = {_name(*combo): combo for combo in combos}
    p = FinSet(elems)
    projs = [
        FinMap(p, s, {n: combo[k] for n, combo in elems.items()})
        for k, s in enumerate(sets)
    ]
    return p, projs


def coproduct(sets: list[FinSet], tags: list[str] | None = None) -> tuple[FinSet, list[FinMap]]:
    """Disjoint union with injections; elements tagged by index (or given tags)."""
    tags = tags if tags is not None else [str(k) for k in range(len(sets))]
    elems = {}
    for tag, s in zip(tags, sets):
        for x in s:
            elems[_name(tag, x)] = None
    c = FinSet(elems)
    injs = [
        FinMap(s, c, {x: _name(tag, x) for x in s})
        for tag, s in zip(tags, sets)
    ]
    return c, injs


# ---------------------------------------------------------------------------
# pushout and pullback


def pushout(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """Pushout of ``A <-f- C -g-> B``.

    Computed as the coequalizer of the two leg maps into A + B via
    union-find, so non-injective legs are handled correctly.  Each class is
    named by its lexicographically least member tag.
    """
    if f.src != g.src:
        raise FinSetError("pushout legs must share their source")
    tags = {}
    for x in f.dst:
        tags[("L", x)] = _name("L", x)
    for y in g.dst:
        tags[("R", y)] = _name("R", y)
    parent = {t: t for t in tags.values()}

    def find(t):
        while parent[t] != t:
            parent[t] = parent[parent[t]]
            t = parent[t]
        return t

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep the smaller name as representative for determinism
            lo, hi = sorted((ra, rb))
            parent[hi] = lo

    for c in f.src:
        union(tags[("L", f(c))], tags[("R", g(c))])

    classes: dict[str, list[str]] = {}
    for t in tags.values():
        classes.setdefault(find(t), None)
    p = FinSet(classes)
    ia = FinMap(f.dst, p, {x: find(tags[("L", x)]) for x in f.dst})
    ib = FinMap(g.dst, p, {y: find(tags[("R", y)]) for y in g.dst})
    return p, ia, ib


def pushout_induced(ia: FinMap, ib: FinMap, ha: FinMap, hb: FinMap) -> FinMap:
    """The mediating map out of a pushout, given a commuting cocone.

    Values are forced since every class meets A or B; raises if the cocone is
    inconsistent on some class.
    """
    vals: dict[str, str] = {}
    for x in ha.src:
        vals.setdefault(ia(x), ha(x))
        if vals[ia(x)] != ha(x):
            raise FinSetError(f"cocone not constant on class {ia(x)!r}")
    for y in hb.src:
        vals.setdefault(ib(y), hb(y))
        if vals[ib(y)] != hb(y):
            raise FinSetError(f"cocone not constant on class {ib(y)!r}")
    return FinMap(ia.dst, ha.dst, vals)


def pullback(f: FinMap, g: FinMap) -> tuple[FinSet, FinMap, FinMap]:
    """Pullback of ``A -f-> T <-g- B``; elements are JSON pairs ``[a, b]``."""
    if f.dst != g.dst:
        raise FinSetError("pullback legs must share their target")
    elems = {}
    for a in f.src:
        for b in g.src:
            if f(a) == g(b):
                elems[pair_name(a, b)] = (a, b)
    q = FinSet(elems)
    pa = FinMap(q, f.src, {n: ab[0] for n, ab in elems.items()})
    pb = FinMap(q, g.src, {n: ab[1] for n, ab in elems.items()})
    return q, pa, pb


def pullback_induced(pa: FinMap, pb: FinMap, ha: FinMap, hb: FinMap) -> FinMap:
    """The mediating map into a pullback, forced as ``z -> (ha z, hb z)``."""
    q = pa.src
    vals = {}
    for z in ha.src:
        n = pair_name(ha(z), hb(z))
        if n not in q:
            raise FinSetError("cone does not factor through the pullback")
        vals[z] = n
    return FinMap(ha.src, q, vals)


# ---------------------------------------------------------------------------
# slices


@dataclass(frozen=True)
class SliceObj:
    """An object of the slice over ``base``: a total set with its projection."""

    total: FinSet
    base: FinSet
    projection: FinMap

    def __init__(self, total: FinSet, base: FinSet, projection: FinMap):
        if projection.src != total or projection.dst != base:
            raise FinSetError("projection must map total -> base")
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "projection", projection)

    def fiber(self, i: str) -> FinSet:
        return FinSet(x for x in self.total if self.projection(x) == i)


def slice_over_point(s: FinSet) -> SliceObj:
    return SliceObj(s, POINT, terminal_map(s))


def fn_table_name(args: FinSet, values: dict[str, str]) -> str:
    return _name("fn", [[a, values[a]] for a in args])


def slice_exponential(z: SliceObj, f: SliceObj) -> SliceObj:
    """Fiberwise exponential ``z^f`` in the slice over the common base.

    The fiber over ``i`` is the full set of functions fiber_f(i) -> fiber_z(i);
    elements are named by the base point together with the function table.
    """
    if z.base != f.base:
        raise FinSetError("slice exponential requires a common base")
    elems: dict[str, str] = {}
    for i in z.base:
        zf, ff = z.fiber(i), f.fiber(i)
        for combo in iproduct(zf.elements, repeat=len(ff)):
            table = dict(zip(ff.elements, combo))
            elems[_name(i, [[a, table[a]] for a in ff])] = i
    total = FinSet(elems)
    return SliceObj(total, z.base, FinMap(total, z.base, elems))


def slice_exp_element(i: str, table: dict[str, str]) -> str:
    """The canonical name of a slice-exponential element."""
    return _name(i, [[a, table[a]] for a in sorted(table)])


def slice_exp_apply(name: str) -> tuple[str, dict[str, str]]:
    """Decode a slice-exponential element back to (base point, table)."""
    i, rows = json.loads(name)
    return i, {a: v for a, v in rows}


def fun_set(dom: FinSet, cod: FinSet) -> FinSet:
    """The plain set of functions dom -> cod with canonical table names."""
    out = []
    for combo in iproduct(cod.elements, repeat=len(dom)):
        table = dict(zip(dom.elements, combo))
        out.append(_name("fn", [[a, table[a]] for a in dom]))
    return FinSet(out)


def fun_name(table: dict[str, str]) -> str:
    return _name("fn", [[a, table[a]] for a in sorted(table)])


def fun_apply(name: str) -> dict[str, str]:
    _, rows = json.loads(name)
    return {a: v for a, v in rows}


def exponential_duality(
    f: FinMap, g: FinMap, z: FinSet
) -> tuple[FinMap, bool]:
    """The canonical comparison ``z^(A ⊔_C B) -> z^A ×_(z^C) z^B``.

    Restriction along the pushout injections lands in the pullback of the two
    restriction maps to ``z^C``; returns the comparison together with whether
    it is a bijection (it always is, which the tests confirm).
    """
    p, ia, ib = pushout(f, g)
    zp = fun_set(p, z)
    za, zb, zc = fun_set(f.dst, z), fun_set(g.dst, z), fun_set(f.src, z)
    res_a = FinMap(za, zc, {
        n: fun_name({c: fun_apply(n)[f(c)] for c in f.src}) for n in za
    })
    res_b = FinMap(zb, zc, {
        n: fun_name({c: fun_apply(n)[g(c)] for c in g.src}) for n in zb
    })
    q, _, _ = pullback(res_a, res_b)
    cmp = FinMap(zp, q, {
        n: pair_name(
            fun_name({a: fun_apply(n)[ia(a)] for a in f.dst}),
            fun_name({b: fun_apply(n)[ib(b)] for b in g.dst}),
        )
        for n in zp
    })
    return cmp, cmp.is_bijective()
