"""The action of a pointed operad on its binary part by cospans.

For an operad with singleton nullary and unary parts, each arity n carries a
cospan over O(n): the middle is O(n+1) projecting down by composition with
the nullary element, the i-th left leg composes a binary element into slot i
and moves its second input to the last position, and the right leg composes
under a binary element.  Tree-indexed families of these cospans transform
along tree morphisms; the transition maps are isomorphisms except at inner
faces, where a pushout of middles compares with O(n+m) and being a bijection
there is exactly the configuration-type condition that ``config_type_check``
decides.  The dual story exponentiates everything by a carrier set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .cospans import (
    Cospan,
    Span,
    base_change_cospan,
    carrier_slice,
    cospan_sigma_act,
    dualize,
    unit_cospan,
)
from .finset import (
    FinMap,
    FinSet,
    FinSetError,
    SliceObj,
    identity,
    pair_name,
    product,
    product_many,
    pullback,
    pushout,
    pushout_induced,
    slice_exp_apply,
    slice_exp_element,
    slice_exponential,
)
from .omega import GenStep, OmegaMor, decompose
from .operads import (
    OperadError,
    SetOperad,
    act_on_generator,
    all_perms,
    cycle_to_last,
    eval_on_tree,
    extend_perm,
    inverse_perm,
    _reslot_perm,
    _slot,
)
from .trees import Path, Tree, is_eta


class AdjointError(ValueError):
    pass


class TransitionInconsistent(AdjointError):
    """The transition formulas disagree where they must agree; raised when
    the underlying tables are corrupt rather than out of range."""



def _require_pointed(o: SetOperad) -> None:
    if not o.is_pointed_01():
        raise AdjointError(
            "the construction needs singleton nullary and unary parts")


def forget_last(o: SetOperad, n: int) -> FinMap:
    """O(n+1) -> O(n), composing the last slot with the nullary element."""
    _require_pointed(o)
    return FinMap(o.obs[n + 1], o.obs[n], {
        w: o.compose(n + 1, 0, n + 1, w, o.o0) for w in o.obs[n + 1]
    })


def build_adjoint_corolla(o: SetOperad, n: int) -> Cospan:
    """The n-ary cospan over O(n) with middle O(n+1) and carrier O(2)."""
    _require_pointed(o)
    if n + 1 > o.n_max:
        raise AdjointError(f"need arity {n + 1} <= n_max={o.n_max}")
    cache = o.__dict__.setdefault("_corolla_cache", {})
    if n in cache:
        return cache[n]
    base = o.obs[n]
    carrier = o.obs[2]
    middle = SliceObj(o.obs[n + 1], base, forget_last(o, n))
    cs = carrier_slice(carrier, base)

    def left(i: int) -> FinMap:
        tau = cycle_to_last(i + 1, n + 1)
        return FinMap(cs.total, o.obs[n + 1], {
            pair_name(k, a): o.act(n + 1, tau, o.compose(n, 2, i, a, k))
            for k in carrier for a in base
        })

    right = FinMap(cs.total, o.obs[n + 1], {
        pair_name(k, a): o.compose(2, n, 1, k, a)
        for k in carrier for a in base
    })
    result = Cospan(base, carrier, n, middle,
                    tuple(left(i) for i in range(1, n + 1)), right)
    cache[n] = result
    return result


def adjoint_equivariant(o: SetOperad, n: int) -> bool:
    """The corolla cospan is symmetric: relabeling inputs permutes the legs."""
    c = build_adjoint_corolla(o, n)
    for sigma in all_perms(n):
        ext = extend_perm(sigma, n + 1)
        for w in o.obs[n + 1]:
            if c.middle.projection(o.act(n + 1, ext, w)) != o.act(
                    n, sigma, c.middle.projection(w)):
                return False
        for k in o.obs[2]:
            for a in o.obs[n]:
                twisted = pair_name(k, o.act(n, sigma, a))
                for i in range(1, n + 1):
                    if o.act(n + 1, ext, c.left_legs[i - 1](pair_name(k, a))) != \
                            c.left_legs[sigma[i - 1] - 1](twisted):
                        return False
                if o.act(n + 1, ext, c.right_leg(pair_name(k, a))) != \
                        c.right_leg(twisted):
                    return False
    return True


# ---------------------------------------------------------------------------
# tree-indexed families


@dataclass
class AdjointFamily:
    """One corolla cospan per tree vertex, pulled back over a common base.

    ``beta`` locates each base point in the product over the tree's vertices;
    the component at a vertex is the corolla cospan for its arity, base
    changed along the corresponding coordinate of ``beta``.
    """

    operad: SetOperad
    tree: Tree
    base: FinSet
    beta: FinMap
    components: dict[Path, Cospan]

    def arity_map(self, v: Path) -> FinMap:
        """base -> O(n_v), the coordinate of beta at vertex v."""
        idx = self.tree.vertices().index(v)
        n_v = self.tree.arity(v)
        return FinMap(self.base, self.operad.obs[n_v], {
            t: json.loads(self.beta(t))[idx] for t in self.base
        })


def adjoint_family(o: SetOperad, t: Tree, base: FinSet | None = None,
                   beta: FinMap | None = None) -> AdjointFamily:
    _require_pointed(o)
    ev = eval_on_tree(o, t)
    if base is None:
        base = ev
        beta = identity(ev)
    if beta.src != base or beta.dst != ev:
        raise AdjointError("beta must map the base into the tree product")
    comps = {}
    for idx, v in enumerate(t.vertices()):
        n_v = t.arity(v)
        rho = FinMap(base, o.obs[n_v], {
            s: json.loads(beta(s))[idx] for s in base
        })
        comps[v] = base_change_cospan(build_adjoint_corolla(o, n_v), rho)
    return AdjointFamily(o, t, base, beta, comps)


def _merged_pushout(o: SetOperad, step: GenStep, fam: AdjointFamily,
                    x: Path) -> tuple[Cospan, FinMap, FinMap]:
    """Glue the two components under an inner-face letter at the merged
    vertex; returns the cospan plus the two middle injections."""
    g = step.mor
    root, verts = g.image(x)
    v1 = root
    (v0,) = verts - {root}
    s_e = _slot(g.dst, v1, v0)
    m0, m1 = fam.components[v0], fam.components[v1]
    p, i0, i1 = pushout(m0.right_leg, m1.left_legs[s_e - 1])
    projection = pushout_induced(i0, i1, m0.middle.projection,
                                 m1.middle.projection)
    middle = SliceObj(p, fam.base, projection)
    cs = carrier_slice(o.obs[2], fam.base)
    legs = []
    for eps in g.src.in_edges(x):
        q = g.edge(eps)
        if q in set(g.dst.in_edges(v1)):
            legs.append(m1.left_legs[_slot(g.dst, v1, q) - 1].then(i1))
        else:
            legs.append(m0.left_legs[_slot(g.dst, v0, q) - 1].then(i0))
    right = m1.right_leg.then(i1)
    return (Cospan(fam.base, o.obs[2], len(legs), middle, tuple(legs), right),
            i0, i1)


def restrict_family(o: SetOperad, step: GenStep,
                    fam: AdjointFamily) -> dict[Path, Cospan]:
    """Apply a generator letter in the tree direction to a family."""
    g = step.mor
    out: dict[Path, Cospan] = {}
    for v in g.src.vertices():
        root, verts = g.image(v)
        if not verts:
            out[v] = unit_cospan(o.obs[2], fam.base)
        elif len(verts) == 1:
            (w,) = verts
            pi = _reslot_perm(g, v, w)
            out[v] = cospan_sigma_act(inverse_perm(pi), fam.components[w])
        else:
            out[v], _, _ = _merged_pushout(o, step, fam, v)
    return out


def _merged_block_perm(g: OmegaMor, x: Path) -> tuple[int, int, int, tuple[int, ...]]:
    """Slot data for a merged vertex: (n1, n0, s_e, block position of each slot)."""
    root, verts = g.image(x)
    v1 = root
    (v0,) = verts - {root}
    n1, n0 = g.dst.arity(v1), g.dst.arity(v0)
    s_e = _slot(g.dst, v1, v0)
    pi = []
    for eps in g.src.in_edges(x):
        q = g.edge(eps)
        if q in set(g.dst.in_edges(v1)):
            s = _slot(g.dst, v1, q)
            pi.append(s if s < s_e else s + n0 - 1)
        else:
            pi.append(s_e + _slot(g.dst, v0, q) - 1)
    return n1, n0, s_e, tuple(pi)


@dataclass
class AlphaStep:
    """One transition: restricted source family, target family, and the maps."""

    step: GenStep
    source: dict[Path, Cospan]
    target: AdjointFamily
    maps: dict[Path, FinMap]

    def is_isomorphism(self) -> bool:
        return all(m.is_bijective() for m in self.maps.values())


def _check_cospan_map(src: Cospan, dst: Cospan, f: FinMap) -> None:
    for leg_s, leg_d in zip(src.legs, dst.legs):
        for el in leg_s.src:
            if f(leg_s(el)) != leg_d(el):
                raise TransitionInconsistent(
                    "transition map does not commute with a leg")
    for y in src.middle.total:
        if dst.middle.projection(f(y)) != src.middle.projection(y):
            raise TransitionInconsistent(
                "transition map does not commute with projections")


def alpha_step(o: SetOperad, step: GenStep, fam: AdjointFamily) -> AlphaStep:
    """The transition along one generator letter, over the family's base.

    Isomorphism letters and outer faces reindex, degeneracies match the unit
    cospan, and inner faces send the glued middle into the higher-arity
    middle through the two composition formulas.
    """
    g = step.mor
    source = restrict_family(o, step, fam)
    target = adjoint_family(
        o, g.src, fam.base, fam.beta.then(act_on_generator(o, step)))
    maps: dict[Path, FinMap] = {}
    for v in g.src.vertices():
        root, verts = g.image(v)
        tgt_mid = target.components[v].middle.total
        if not verts:
            # unit cospan into the unary corolla: both middles are the
            # binary part paired with a base point
            maps[v] = FinMap(source[v].middle.total, tgt_mid, {
                el: el for el in source[v].middle.total
            })
        elif len(verts) == 1:
            (w,) = verts
            pi = _reslot_perm(g, v, w)
            n = g.src.arity(v)
            ext = extend_perm(inverse_perm(pi), n + 1)
            assignment = {}
            for el in source[v].middle.total:
                w_op, t = json.loads(el)
                assignment[el] = pair_name(o.act(n + 1, ext, w_op), t)
            maps[v] = FinMap(source[v].middle.total, tgt_mid, assignment)
        else:
            merged, i0, i1 = _merged_pushout(o, step, fam, v)
            n1, n0, s_e, pi = _merged_block_perm(g, v)
            n_tot = n1 + n0 - 1
            if n_tot + 1 > o.n_max:
                raise AdjointError(
                    f"need arity {n_tot + 1} <= n_max={o.n_max}")
            rho1 = fam.arity_map(g.image(v)[0])
            (v0,) = g.image(v)[1] - {g.image(v)[0]}
            rho0 = fam.arity_map(v0)
            tau = cycle_to_last(s_e + n0, n_tot + 1)
            fix = extend_perm(inverse_perm(pi), n_tot + 1)
            m0, m1 = fam.components[v0], fam.components[g.image(v)[0]]
            values: dict[str, str] = {}

            def put(cls: str, value: str, t: str):
                full = pair_name(o.act(n_tot + 1, fix, value), t)
                if values.setdefault(cls, full) != full:
                    raise TransitionInconsistent(
                        "inner-face transition is not constant on a class")

            for el in m0.middle.total:
                w0, t = json.loads(el)
                a1 = rho1(t)
                put(i0(el),
                    o.act(n_tot + 1, tau, o.compose(n1, n0 + 1, s_e, a1, w0)),
                    t)
            for el in m1.middle.total:
                w1, t = json.loads(el)
                a0 = rho0(t)
                put(i1(el), o.compose(n1 + 1, n0, s_e, w1, a0), t)
            maps[v] = FinMap(merged.middle.total, tgt_mid, values)
        _check_cospan_map(source[v], target.components[v], maps[v])
    return AlphaStep(step, source, target, maps)


def restrict_maps(o: SetOperad, step: GenStep,
                  src_fams: tuple[dict[Path, Cospan], dict[Path, Cospan]],
                  maps: dict[Path, FinMap],
                  fam_src: AdjointFamily, fam_dst: AdjointFamily
                  ) -> tuple[dict[Path, Cospan], dict[Path, Cospan], dict[Path, FinMap]]:
    """Apply a letter in the tree direction to a map of families.

    Given componentwise maps ``fam_src -> fam_dst`` (with the domain family's
    components supplied explicitly in ``src_fams[0]`` over the same bases),
    produce the letter's restriction of both sides and the induced maps; the
    inner-face case is pushout functoriality.
    """
    g = step.mor
    dom_comps, cod_comps = src_fams

    def as_family(comps: dict[Path, Cospan], fam: AdjointFamily) -> AdjointFamily:
        return AdjointFamily(o, fam.tree, fam.base, fam.beta, comps)

    new_dom = restrict_family(o, step, as_family(dom_comps, fam_src))
    new_cod = restrict_family(o, step, as_family(cod_comps, fam_dst))
    new_maps: dict[Path, FinMap] = {}
    for v in g.src.vertices():
        root, verts = g.image(v)
        if not verts:
            new_maps[v] = identity(new_dom[v].middle.total)
        elif len(verts) == 1:
            (w,) = verts
            new_maps[v] = maps[w]
        else:
            merged_d, d0, d1 = _merged_pushout(
                o, step, as_family(dom_comps, fam_src), v)
            merged_c, c0, c1 = _merged_pushout(
                o, step, as_family(cod_comps, fam_dst), v)
            v1 = root
            (v0,) = verts - {root}
            assignment: dict[str, str] = {}
            for el in dom_comps[v0].middle.total:
                cls = d0(el)
                val = c0(maps[v0](el))
                if assignment.setdefault(cls, val) != val:
                    raise TransitionInconsistent(
                        "pushout functoriality broke a class")
            for el in dom_comps[v1].middle.total:
                cls = d1(el)
                val = c1(maps[v1](el))
                if assignment.setdefault(cls, val) != val:
                    raise TransitionInconsistent(
                        "pushout functoriality broke a class")
            new_maps[v] = FinMap(merged_d.middle.total, merged_c.middle.total,
                                 assignment)
    return new_dom, new_cod, new_maps


def transition_alpha(o: SetOperad, step: GenStep) -> AlphaStep:
    """The transition map of a single generator over its target tree."""
    fam = adjoint_family(o, step.mor.dst)
    return alpha_step(o, step, fam)


def alpha_for_word(o: SetOperad, t: Tree, letters: list[GenStep],
                   fam: AdjointFamily | None = None
                   ) -> tuple[dict[Path, Cospan], AdjointFamily, dict[Path, FinMap]]:
    """The aggregate transition along a word ending at ``t``.

    Letters are listed first-applied-first, matching ``decompose``; the
    result is the chain-restricted source family, the flat target family, and
    the composite transition maps, all over the product set of ``t``.
    """
    if fam is None:
        fam = adjoint_family(o, t)
    if not letters:
        comps = dict(fam.components)
        return comps, fam, {v: identity(c.middle.total) for v, c in comps.items()}
    total_src: dict[Path, Cospan] | None = None
    total_maps: dict[Path, FinMap] = {}
    for step in reversed(letters):
        astep = alpha_step(o, step, fam)
        if total_src is None:
            total_src, total_maps = astep.source, dict(astep.maps)
        else:
            new_dom, _, lifted = restrict_maps(
                o, step, (total_src, fam.components), total_maps,
                AdjointFamily(o, fam.tree, fam.base, fam.beta, total_src), fam)
            total_src = new_dom
            total_maps = {
                v: lifted[v].then(astep.maps[v]) for v in astep.maps
            }
        fam = astep.target
    return total_src, fam, total_maps


# ---------------------------------------------------------------------------
# comparing transition maps up to the canonical source identification


def family_maps_equivalent(src1: dict[Path, Cospan], maps1: dict[Path, FinMap],
                           src2: dict[Path, Cospan], maps2: dict[Path, FinMap]
                           ) -> bool:
    """Do two models of the same restricted family carry the same transition?

    The models may differ in how iterated pushouts were associated; a
    leg-preserving bijection intertwining the maps exists iff the leg-forced
    part is consistent and the leftover elements match by signature.
    """
    if set(src1) != set(src2):
        return False
    for v in src1:
        c1, c2 = src1[v], src2[v]
        f1, f2 = maps1[v], maps2[v]
        forced: dict[str, str] = {}
        for leg1, leg2 in zip(c1.legs, c2.legs):
            for el in leg1.src:
                y1, y2 = leg1(el), leg2(el)
                if forced.setdefault(y1, y2) != y2:
                    return False
        if len(set(forced.values())) != len(forced):
            return False

        def sig1(y):
            return (c1.middle.projection(y), f1(y))

        def sig2(y):
            return (c2.middle.projection(y), f2(y))

        for y1, y2 in forced.items():
            if sig1(y1) != sig2(y2):
                return False
        rest1 = [y for y in c1.middle.total if y not in forced]
        taken = set(forced.values())
        rest2 = [y for y in c2.middle.total if y not in taken]
        count1: dict = {}
        for y in rest1:
            count1[sig1(y)] = count1.get(sig1(y), 0) + 1
        count2: dict = {}
        for y in rest2:
            count2[sig2(y)] = count2.get(sig2(y), 0) + 1
        if count1 != count2:
            return False
    return True


@dataclass(frozen=True)
class CocycleReport:
    ok: bool
    pairs_checked: int
    pairs_skipped: int
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_lax_cocycle(o: SetOperad, max_vertices: int, max_leaves: int) -> CocycleReport:
    """Word independence of the transitions on all composable generator pairs.

    For every pair of canonical generator letters g, f the transition along
    the two-letter word must agree with the transition along the canonical
    decomposition of the composite, up to the canonical identification of the
    two pushout models.
    """
    _require_pointed(o)
    from .omega import compose_morphisms
    from .opcat import tree_generators
    from .trees import enumerate_trees

    universe = [
        t for t in enumerate_trees(max_vertices, max_leaves)
        if all(t.arity(v) + 1 <= o.n_max for v in t.vertices())
    ]
    allowed = set(universe)
    checked = skipped = 0
    fam_cache: dict[Tree, AdjointFamily] = {}
    canon_cache: dict = {}

    def fam0(t: Tree) -> AdjointFamily:
        if t not in fam_cache:
            fam_cache[t] = adjoint_family(o, t)
        return fam_cache[t]

    for t in universe:
        for f in tree_generators(t, o.n_max):
            if f.mor.src not in allowed:
                continue
            try:
                astep_f = alpha_step(o, f, fam0(t))
            except TransitionInconsistent as exc:
                return CocycleReport(False, checked, skipped,
                                     f"inconsistent transition for {f.kind} "
                                     f"into {t.text()}: {exc}")
            except (OperadError, AdjointError):
                skipped += sum(
                    1 for g in tree_generators(f.mor.src, o.n_max)
                    if g.mor.src in allowed)
                continue
            mid = astep_f.target
            for g in tree_generators(f.mor.src, o.n_max):
                if g.mor.src not in allowed:
                    continue
                try:
                    m = compose_morphisms(f.mor, g.mor)
                    # pair path: lift the f-transition through g, then g's own
                    astep_g = alpha_step(o, g, mid)
                    new_dom, _, lifted = restrict_maps(
                        o, g, (astep_f.source, mid.components),
                        astep_f.maps,
                        AdjointFamily(o, mid.tree, mid.base, mid.beta,
                                      astep_f.source),
                        mid)
                    s1 = new_dom
                    a1 = {v: lifted[v].then(astep_g.maps[v])
                          for v in astep_g.maps}
                    if m in canon_cache:
                        s2, a2 = canon_cache[m]
                    else:
                        word_canon = decompose(m)
                        s2, _, a2 = alpha_for_word(o, t, word_canon, fam0(t))
                        canon_cache[m] = (s2, a2)
                except TransitionInconsistent as exc:
                    return CocycleReport(
                        False, checked, skipped,
                        f"inconsistent transition for f: {f.kind} into "
                        f"{t.text()}, g: {g.kind}: {exc}")
                except (OperadError, AdjointError):
                    skipped += 1
                    continue
                checked += 1
                if not family_maps_equivalent(s1, a1, s2, a2):
                    return CocycleReport(
                        False, checked, skipped,
                        f"pair f: {f.kind} into {t.text()}, g: {g.kind} into "
                        f"{f.mor.src.text()}")
    return CocycleReport(True, checked, skipped)


# ---------------------------------------------------------------------------
# the configuration-type condition


@dataclass(frozen=True)
class ConfigVerdict:
    n: int
    m: int
    strict_pullback: bool
    pushout_legs_injective: bool
    counterexample: str | None = None


def _square_data(o: SetOperad, n: int, m: int):
    """The comparison square at (n, m): pushout P with its maps to the
    grafting arity and down to the pair of factors."""
    _require_pointed(o)
    if n + m > o.n_max:
        raise AdjointError(f"need arity {n + m} <= n_max={o.n_max}")
    a_tot, _, _ = product(o.obs[n + 1], o.obs[m])
    b_tot, _, _ = product(o.obs[n], o.obs[m + 1])
    c_tot, _ = product_many([o.obs[2], o.obs[n], o.obs[m]])
    s_tot, _, _ = product(o.obs[n], o.obs[m])

    lam_a = FinMap(c_tot, a_tot, {
        el: pair_name(o.compose(2, n, 1, k, a), b)
        for el in c_tot for (k, a, b) in [tuple(json.loads(el))]
    })
    tau_b = cycle_to_last(2, m + 1)
    lam_b = FinMap(c_tot, b_tot, {
        el: pair_name(a, o.act(m + 1, tau_b, o.compose(m, 2, 1, b, k)))
        for el in c_tot for (k, a, b) in [tuple(json.loads(el))]
    })
    tau_a = cycle_to_last(n + 1, n + m)
    top_a = FinMap(a_tot, o.obs[n + m], {
        el: o.act(n + m, tau_a, o.compose(m, n + 1, 1, b, w))
        for el in a_tot for (w, b) in [tuple(json.loads(el))]
    })
    top_b = FinMap(b_tot, o.obs[n + m], {
        el: o.compose(m + 1, n, 1, w, a)
        for el in b_tot for (a, w) in [tuple(json.loads(el))]
    })
    down_a = FinMap(a_tot, s_tot, {
        el: pair_name(o.compose(n + 1, 0, n + 1, w, o.o0), b)
        for el in a_tot for (w, b) in [tuple(json.loads(el))]
    })
    down_b = FinMap(b_tot, s_tot, {
        el: pair_name(a, o.compose(m + 1, 0, m + 1, w, o.o0))
        for el in b_tot for (a, w) in [tuple(json.loads(el))]
    })
    bottom = FinMap(s_tot, o.obs[n + m - 1], {
        el: o.compose(m, n, 1, b, a)
        for el in s_tot for (a, b) in [tuple(json.loads(el))]
    })
    right = forget_last(o, n + m - 1)
    return a_tot, b_tot, c_tot, s_tot, lam_a, lam_b, top_a, top_b, down_a, down_b, bottom, right


def config_type_check(o: SetOperad, n: int, m: int) -> ConfigVerdict:
    """Is the comparison from the glued middle to the fibered product of the
    grafting square a bijection at (n, m)?"""
    if n < 2 or m < 2:
        raise AdjointError("the condition is about arities at least 2")
    (a_tot, b_tot, c_tot, s_tot, lam_a, lam_b, top_a, top_b,
     down_a, down_b, bottom, right) = _square_data(o, n, m)
    p, i_a, i_b = pushout(lam_a, lam_b)
    legs_ok = lam_a.is_injective() and lam_b.is_injective()
    try:
        top = pushout_induced(i_a, i_b, top_a, top_b)
        down = pushout_induced(i_a, i_b, down_a, down_b)
    except FinSetError as exc:
        return ConfigVerdict(n, m, False, legs_ok,
                             f"square does not commute: {exc}")
    q, _, _ = pullback(right, bottom)
    cmp = FinMap(p, q, {el: pair_name(top(el), down(el)) for el in p})
    legs_inj = lam_a.is_injective() and lam_b.is_injective()
    if cmp.is_bijective():
        return ConfigVerdict(n, m, True, legs_inj)
    witness = None
    seen: dict[str, str] = {}
    for el in p.elements:
        v = cmp(el)
        if v in seen:
            witness = f"collision: {seen[v]} and {el} both map to {v}"
            break
        seen[v] = el
    if witness is None:
        missing = next(x for x in q if x not in set(seen))
        witness = f"not hit: {missing}"
    return ConfigVerdict(n, m, False, legs_inj, witness)


def segal_alpha_bijective(o: SetOperad, n: int, m: int) -> bool:
    """Is the inner-face transition at the two-vertex tree a bijection?

    The tree grafts an n-ary vertex on the first slot of an m-ary one; this
    is the family-level counterpart of ``config_type_check``.
    """
    from .omega import inner_face
    from .trees import Leaf, Node, make_tree

    inner = Node(tuple(Leaf(i) for i in range(1, n + 1)))
    t = make_tree(Node((inner,) + tuple(Leaf(i) for i in range(n + 1, n + m))))
    e = next(p for p in t.inner_edges())
    step = inner_face(t, e)
    astep = transition_alpha(o, step)
    return astep.is_isomorphism()


def coadjoint_build(o: SetOperad, x: FinSet, n: int) -> Span:
    """Exponentiate the n-ary cospan by a carrier set."""
    return dualize(x, build_adjoint_corolla(o, n))


def config_type_wrt_check(o: SetOperad, x: FinSet, n: int, m: int) -> ConfigVerdict:
    """The dual condition with respect to one carrier: exponentiate the
    grafting square fiberwise over the pair of factors and ask whether the
    resulting square of function families is a strict pullback."""
    if n < 2 or m < 2:
        raise AdjointError("the condition is about arities at least 2")
    (a_tot, b_tot, c_tot, s_tot, lam_a, lam_b, top_a, top_b,
     down_a, down_b, bottom, right) = _square_data(o, n, m)
    legs_inj = lam_a.is_injective() and lam_b.is_injective()

    q, q_top, q_down = pullback(right, bottom)
    m_a = FinMap(a_tot, q, {el: pair_name(top_a(el), down_a(el)) for el in a_tot})
    m_b = FinMap(b_tot, q, {el: pair_name(top_b(el), down_b(el)) for el in b_tot})
    proj_c = FinMap(c_tot, s_tot, {
        el: pair_name(json.loads(el)[1], json.loads(el)[2]) for el in c_tot
    })

    slice_a = SliceObj(a_tot, s_tot, down_a)
    slice_b = SliceObj(b_tot, s_tot, down_b)
    slice_c = SliceObj(c_tot, s_tot, proj_c)
    slice_q = SliceObj(q, s_tot, q_down)
    xs = carrier_slice(x, s_tot)
    exp_a = slice_exponential(xs, slice_a)
    exp_b = slice_exponential(xs, slice_b)
    exp_c = slice_exponential(xs, slice_c)
    exp_q = slice_exponential(xs, slice_q)

    def precompose(exp_src: SliceObj, exp_dst_fibers: SliceObj, h: FinMap,
                   fiber_of) -> FinMap:
        """X^src -> X^dst along h: dst_total -> src_total over the base."""
        assignment = {}
        for el in exp_src.total:
            s, table = slice_exp_apply(el)
            new_table = {d: table[h(d)] for d in fiber_of(s)}
            assignment[el] = slice_exp_element(s, new_table)
        return FinMap(exp_src.total, exp_dst_fibers.total, assignment)

    def fiber(total: FinSet, proj: FinMap):
        by: dict[str, list[str]] = {}
        for el in total:
            by.setdefault(proj(el), []).append(el)
        return lambda s: by.get(s, [])

    res_qa = precompose(exp_q, exp_a, m_a, fiber(a_tot, down_a))
    res_qb = precompose(exp_q, exp_b, m_b, fiber(b_tot, down_b))
    res_ac = precompose(exp_a, exp_c, lam_a, fiber(c_tot, proj_c))
    res_bc = precompose(exp_b, exp_c, lam_b, fiber(c_tot, proj_c))

    r, _, _ = pullback(res_ac, res_bc)
    cmp = FinMap(exp_q.total, r, {
        el: pair_name(res_qa(el), res_qb(el)) for el in exp_q.total
    })
    if cmp.is_bijective():
        return ConfigVerdict(n, m, True, legs_inj)
    seen: dict[str, str] = {}
    witness = None
    for el in exp_q.total.elements:
        v = cmp(el)
        if v in seen:
            witness = f"collision: {seen[v]} and {el}"
            break
        seen[v] = el
    if witness is None:
        missing = next(y for y in r if y not in set(seen))
        witness = f"not hit: {missing}"
    return ConfigVerdict(n, m, False, legs_inj, witness)
