"""Cospans and spans over a base, composed operadically.

An n-ary cospan over a base x with carrier X is a middle object in the slice
over x together with n legs from the constant family X×x into the middle and
one leg back; composition glues middles by pushout.  Spans are the dual shape
and compose by pullback.  Exponentiating by a fixed set turns one into the
other; ``dualize`` realizes that and the tests check it intertwines the two
compositions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .finset import (
    FinMap,
    FinSet,
    SliceObj,
    coproduct,
    fun_name,
    identity,
    pair_name,
    product,
    pullback,
    pushout,
    pushout_induced,
    slice_exp_apply,
    slice_exponential,
    fun_set,
)


class CospanError(ValueError):
    pass


from functools import lru_cache


@lru_cache(maxsize=4096)
def carrier_slice(carrier: FinSet, base: FinSet) -> SliceObj:
    """The constant family carrier × base over the base."""
    total, _, pb = product(carrier, base)
    return SliceObj(total, base, pb)


@dataclass(frozen=True)
class Cospan:
    base: FinSet
    carrier: FinSet
    arity: int
    middle: SliceObj
    left_legs: tuple[FinMap, ...]
    right_leg: FinMap

    def __post_init__(self):
        if len(self.left_legs) != self.arity:
            raise CospanError("arity and number of left legs disagree")
        cs = carrier_slice(self.carrier, self.base)
        for leg in (*self.left_legs, self.right_leg):
            if leg.src != cs.total or leg.dst != self.middle.total:
                raise CospanError("leg endpoints do not match the cospan shape")
            for el in cs.total:
                if self.middle.projection(leg(el)) != cs.projection(el):
                    raise CospanError("leg does not commute with the projections")

    @property
    def legs(self) -> tuple[FinMap, ...]:
        return (*self.left_legs, self.right_leg)


@dataclass(frozen=True)
class Span:
    base: FinSet
    carrier: FinSet
    arity: int
    middle: SliceObj
    left_legs: tuple[FinMap, ...]
    right_leg: FinMap

    def __post_init__(self):
        if len(self.left_legs) != self.arity:
            raise CospanError("arity and number of left legs disagree")
        cs = carrier_slice(self.carrier, self.base)
        for leg in (*self.left_legs, self.right_leg):
            if leg.src != self.middle.total or leg.dst != cs.total:
                raise CospanError("leg endpoints do not match the span shape")
            for el in self.middle.total:
                if cs.projection(leg(el)) != self.middle.projection(el):
                    raise CospanError("leg does not commute with the projections")

    @property
    def legs(self) -> tuple[FinMap, ...]:
        return (*self.left_legs, self.right_leg)


def unit_cospan(carrier: FinSet, base: FinSet) -> Cospan:
    cs = carrier_slice(carrier, base)
    ident = identity(cs.total)
    return Cospan(base, carrier, 1, cs, (ident,), ident)


def unit_span(carrier: FinSet, base: FinSet) -> Span:
    cs = carrier_slice(carrier, base)
    ident = identity(cs.total)
    return Span(base, carrier, 1, cs, (ident,), ident)


def _check_family(u: tuple[int, ...], m: int, outer, inners, base, carrier):
    if outer.arity != m:
        raise CospanError("outer arity does not match the composition map")
    if len(inners) != m:
        raise CospanError("need one inner per target position")
    fibers = {j: [i for i in range(1, len(u) + 1) if u[i - 1] == j]
              for j in range(1, m + 1)}
    for j in range(1, m + 1):
        if inners[j - 1].arity != len(fibers[j]):
            raise CospanError(f"inner {j} has the wrong arity")
        if inners[j - 1].base != base or inners[j - 1].carrier != carrier:
            raise CospanError("base/carrier mismatch")
    return fibers


def compose_cospans(u: tuple[int, ...], outer: Cospan, inners: list[Cospan]) -> Cospan:
    """Operadic composition along u: glue each inner's right leg onto the
    matching left leg of the outer by one big pushout.

    The i-th left leg of the result goes through inner u(i) at the position
    of i within its fiber (fibers read in increasing order).
    """
    m = outer.arity
    fibers = _check_family(u, m, outer, inners, outer.base, outer.carrier)
    cs = carrier_slice(outer.carrier, outer.base)

    glue, glue_injs = coproduct([cs.total] * m, [f"g{j}" for j in range(1, m + 1)])
    middles, mid_injs = coproduct(
        [c.middle.total for c in inners], [f"i{j}" for j in range(1, m + 1)]
    )
    into_inners = FinMap(glue, middles, {
        glue_injs[j - 1](el): mid_injs[j - 1](inners[j - 1].right_leg(el))
        for j in range(1, m + 1) for el in cs.total
    })
    into_outer = FinMap(glue, outer.middle.total, {
        glue_injs[j - 1](el): outer.left_legs[j - 1](el)
        for j in range(1, m + 1) for el in cs.total
    })
    p, i_inners, i_outer = pushout(into_inners, into_outer)

    proj_inners = FinMap(middles, outer.base, {
        mid_injs[j - 1](el): inners[j - 1].middle.projection(el)
        for j in range(1, m + 1) for el in inners[j - 1].middle.total
    })
    projection = pushout_induced(i_inners, i_outer, proj_inners,
                                 outer.middle.projection)
    middle = SliceObj(p, outer.base, projection)

    left = []
    for i in range(1, len(u) + 1):
        j = u[i - 1]
        pos = fibers[j].index(i)
        inner = inners[j - 1]
        left.append(FinMap(cs.total, p, {
            el: i_inners(mid_injs[j - 1](inner.left_legs[pos](el)))
            for el in cs.total
        }))
    right = FinMap(cs.total, p, {
        el: i_outer(outer.right_leg(el)) for el in cs.total
    })
    return Cospan(outer.base, outer.carrier, len(u), middle, tuple(left), right)


def compose_spans(u: tuple[int, ...], outer: Span, inners: list[Span]) -> Span:
    """Dual composition: match each inner's right leg with the corresponding
    left leg of the outer by iterated pullback.

    Middle elements are nested pairs [[..[b, a_1].. ], a_m] of an outer
    element with one element per inner.
    """
    m = outer.arity
    fibers = _check_family(u, m, outer, inners, outer.base, outer.carrier)
    cur = outer.middle.total
    extract_outer = {el: el for el in cur}
    extract_inner: list[dict[str, str]] = []
    for j in range(1, m + 1):
        leg = FinMap(cur, carrier_slice(outer.carrier, outer.base).total, {
            el: outer.left_legs[j - 1](extract_outer[el]) for el in cur
        })
        q, p_cur, p_inner = pullback(leg, inners[j - 1].right_leg)
        extract_outer = {el: extract_outer[p_cur(el)] for el in q}
        extract_inner = [
            {el: prev[p_cur(el)] for el in q} for prev in extract_inner
        ]
        extract_inner.append({el: p_inner(el) for el in q})
        cur = q

    projection = FinMap(cur, outer.base, {
        el: outer.middle.projection(extract_outer[el]) for el in cur
    })
    middle = SliceObj(cur, outer.base, projection)
    cs = carrier_slice(outer.carrier, outer.base)
    left = []
    for i in range(1, len(u) + 1):
        j = u[i - 1]
        pos = fibers[j].index(i)
        inner = inners[j - 1]
        left.append(FinMap(cur, cs.total, {
            el: inner.left_legs[pos](extract_inner[j - 1][el]) for el in cur
        }))
    right = FinMap(cur, cs.total, {
        el: outer.right_leg(extract_outer[el]) for el in cur
    })
    return Span(outer.base, outer.carrier, len(u), middle, tuple(left), right)


def span_composite_name(b: str, parts: list[str]) -> str:
    """The middle element of a span composite with the given constituents."""
    name = b
    for a in parts:
        name = pair_name(name, a)
    return name


# ---------------------------------------------------------------------------
# symmetric actions and equivalence


def cospan_sigma_act(sigma: tuple[int, ...], c: Cospan) -> Cospan:
    """Permute the left legs: the sigma(i)-th leg of the result is leg i."""
    n = c.arity
    new = [None] * n
    for i in range(1, n + 1):
        new[sigma[i - 1] - 1] = c.left_legs[i - 1]
    return Cospan(c.base, c.carrier, n, c.middle, tuple(new), c.right_leg)


def span_sigma_act(sigma: tuple[int, ...], s: Span) -> Span:
    n = s.arity
    new = [None] * n
    for i in range(1, n + 1):
        new[sigma[i - 1] - 1] = s.left_legs[i - 1]
    return Span(s.base, s.carrier, n, s.middle, tuple(new), s.right_leg)


def cospans_equivalent(c1: Cospan, c2: Cospan) -> dict[str, str] | None:
    """A middle bijection commuting with every leg and the projections.

    Legs force the assignment on their images; leftover elements need only
    match fiberwise, so equivalence reduces to consistency plus counting.
    """
    if (c1.base, c1.carrier, c1.arity) != (c2.base, c2.carrier, c2.arity):
        return None
    cs = carrier_slice(c1.carrier, c1.base)
    forced: dict[str, str] = {}
    for leg1, leg2 in zip(c1.legs, c2.legs):
        for el in cs.total:
            y1, y2 = leg1(el), leg2(el)
            if forced.setdefault(y1, y2) != y2:
                return None
    if len(set(forced.values())) != len(forced):
        return None
    for y1, y2 in forced.items():
        if c1.middle.projection(y1) != c2.middle.projection(y2):
            return None
    rest1 = [y for y in c1.middle.total if y not in forced]
    taken = set(forced.values())
    rest2 = [y for y in c2.middle.total if y not in taken]
    if len(rest1) != len(rest2):
        return None
    by_fiber1: dict[str, list[str]] = {}
    for y in rest1:
        by_fiber1.setdefault(c1.middle.projection(y), []).append(y)
    by_fiber2: dict[str, list[str]] = {}
    for y in rest2:
        by_fiber2.setdefault(c2.middle.projection(y), []).append(y)
    if {k: len(v) for k, v in by_fiber1.items()} != {k: len(v) for k, v in by_fiber2.items()}:
        return None
    out = dict(forced)
    for k in by_fiber1:
        for y1, y2 in zip(sorted(by_fiber1[k]), sorted(by_fiber2[k])):
            out[y1] = y2
    return out


def spans_equivalent(s1: Span, s2: Span) -> dict[str, str] | None:
    """A middle bijection intertwining every leg and the projections.

    Span legs leave the middle, so elements match by their full signature
    (projection plus all leg values); equivalence is signature counting.
    """
    if (s1.base, s1.carrier, s1.arity) != (s2.base, s2.carrier, s2.arity):
        return None

    def signature(s: Span, y: str):
        return (s.middle.projection(y), tuple(leg(y) for leg in s.legs))

    by_sig1: dict = {}
    for y in s1.middle.total:
        by_sig1.setdefault(signature(s1, y), []).append(y)
    by_sig2: dict = {}
    for y in s2.middle.total:
        by_sig2.setdefault(signature(s2, y), []).append(y)
    if {k: len(v) for k, v in by_sig1.items()} != {k: len(v) for k, v in by_sig2.items()}:
        return None
    out = {}
    for k in by_sig1:
        for y1, y2 in zip(sorted(by_sig1[k]), sorted(by_sig2[k])):
            out[y1] = y2
    return out


# ---------------------------------------------------------------------------
# duality


def dualize(z: FinSet, c: Cospan) -> Span:
    """Exponentiate a cospan by z fiberwise; the carrier becomes z^carrier.

    The middle is the slice exponential of the constant family z over the
    cospan middle, and the legs restrict function tables along the cospan
    legs.
    """
    zc = carrier_slice(z, c.base)
    mid = slice_exponential(zc, c.middle)
    new_carrier = fun_set(c.carrier, z)
    cs_new = carrier_slice(new_carrier, c.base)

    def restrict(leg: FinMap) -> FinMap:
        import json

        assignment = {}
        for el in mid.total:
            b, table = slice_exp_apply(el)
            # table values live in the constant family z × base; keep the z part
            fn = {x: json.loads(table[leg(pair_name(x, b))])[0] for x in c.carrier}
            assignment[el] = pair_name(fun_name(fn), b)
        return FinMap(mid.total, cs_new.total, assignment)

    legs = tuple(restrict(leg) for leg in c.left_legs)
    right = restrict(c.right_leg)
    return Span(c.base, new_carrier, c.arity, mid, legs, right)


def base_change_cospan(c: Cospan, h: FinMap) -> Cospan:
    """Pull a cospan back along a map into its base.

    Middle elements are pairs [w, t] of an old middle element and a new base
    point with matching projection.
    """
    if h.dst != c.base:
        raise CospanError("base change must land in the cospan base")
    q, p_old, p_new = pullback(c.middle.projection, h)
    middle = SliceObj(q, h.src, p_new)
    cs_new = carrier_slice(c.carrier, h.src)

    def transport(leg: FinMap) -> FinMap:
        return FinMap(cs_new.total, q, {
            pair_name(x, t): pair_name(leg(pair_name(x, h(t))), t)
            for x in c.carrier for t in h.src
        })

    return Cospan(h.src, c.carrier, c.arity, middle,
                  tuple(transport(leg) for leg in c.left_legs),
                  transport(c.right_leg))
