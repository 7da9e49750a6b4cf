"""Operadic categories over finite categories, and their rectification.

An operadic category assigns a finite category to each arity, carries
symmetric-group actions, a unit object, and composition functor tables for
every map of standard finite sets within the arity bound, together with
coherence isomorphism components.  The engine builds these discretely from a
set operad, where all coherence components are forced identities; explicit
override tables let tests corrupt any piece and watch the validator object.

The rectification turns an operadic category into tables of functors indexed
by trees: the value at a tree is the product category over its vertices, and
each generator morphism of trees acts through the structure functors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product as iproduct

from .finset import FinSet, _name
from .omega import GenStep, OmegaMor, decompose
from .operads import (
    Perm,
    SetOperad,
    all_perms,
    identity_perm,
    inverse_perm,
    _reslot_perm,
    _slot,
)
from .trees import Tree


class OpCatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# finite categories


@dataclass
class FinCat:
    """A finite category with named objects and morphisms.

    ``homs[(a, b)]`` lists morphism names, ``comp[(a, b, f), (b, c, g)]`` the
    name of the composite in ``homs[(a, c)]``, ``ids[a]`` the identity.
    """

    objects: FinSet
    homs: dict[tuple[str, str], FinSet]
    comp: dict[tuple[tuple[str, str, str], tuple[str, str, str]], str]
    ids: dict[str, str]

    def hom(self, a: str, b: str) -> FinSet:
        return self.homs.get((a, b), FinSet(()))


def discrete_cat(objects: FinSet) -> FinCat:
    homs = {(a, a): FinSet(("id",)) for a in objects}
    comp = {((a, a, "id"), (a, a, "id")): "id" for a in objects}
    ids = {a: "id" for a in objects}
    return FinCat(objects, homs, comp, ids)


def validate_fincat(c: FinCat) -> tuple[bool, str]:
    for a in c.objects:
        if a not in c.ids or c.ids[a] not in c.hom(a, a):
            return False, f"missing identity at {a}"
    for (a, b), fs in c.homs.items():
        for f in fs:
            if c.comp.get(((a, a, c.ids[a]), (a, b, f))) != f:
                return False, f"left identity fails at {f}: {a}->{b}"
            if c.comp.get(((a, b, f), (b, b, c.ids[b]))) != f:
                return False, f"right identity fails at {f}: {a}->{b}"
    for (a, b), fs in c.homs.items():
        for (b2, cc), gs in c.homs.items():
            if b2 != b:
                continue
            for (c2, d), hs in c.homs.items():
                if c2 != cc:
                    continue
                for f in fs:
                    for g in gs:
                        fg = c.comp[((a, b, f), (b, cc, g))]
                        for h in hs:
                            gh = c.comp[((b, cc, g), (cc, d, h))]
                            if (c.comp[((a, cc, fg), (cc, d, h))]
                                    != c.comp[((a, b, f), (b, d, gh))]):
                                return False, f"associativity fails at {f};{g};{h}"
    return True, "ok"


def product_cat(cats: list[FinCat]) -> FinCat:
    """Product category; objects and morphisms named by component tuples."""
    combos = list(iproduct(*[c.objects.elements for c in cats])) if cats else [()]
    objects = FinSet(_name(*combo) for combo in combos)
    homs: dict[tuple[str, str], FinSet] = {}
    comp = {}
    ids = {}
    for combo_a in combos:
        na = _name(*combo_a)
        ids[na] = _name(*[c.ids[x] for c, x in zip(cats, combo_a)])
        for combo_b in combos:
            nb = _name(*combo_b)
            factors = [
                c.hom(x, y).elements for c, x, y in zip(cats, combo_a, combo_b)
            ]
            if any(not f for f in factors):
                continue
            morphs = [_name(*fc) for fc in iproduct(*factors)] if cats else [_name()]
            homs[(na, nb)] = FinSet(morphs)
    # composition componentwise (only needed where homs exist)
    for (na, nb), fs in homs.items():
        for (nb2, nc), gs in homs.items():
            if nb2 != nb:
                continue
            for f in fs:
                fc = json.loads(f)
                for g in gs:
                    gc = json.loads(g)
                    parts = [
                        cats[k].comp[((json.loads(na)[k], json.loads(nb)[k], fc[k]),
                                      (json.loads(nb)[k], json.loads(nc)[k], gc[k]))]
                        for k in range(len(cats))
                    ]
                    comp[((na, nb, f), (nb, nc, g))] = _name(*parts)
    return FinCat(objects, homs, comp, ids)


# ---------------------------------------------------------------------------
# operadic categories


MuKey = tuple[int, Perm]  # (target size m, value tuple of u: <n> -> <m>)


@dataclass
class OpCategory:
    """Arity-indexed categories with actions, unit, and composition tables.

    ``mu[(m, u)]`` maps domain object tuples ``(b, c_1, .., c_m)`` to objects;
    coherence components default to identities, with sparse overrides so that
    corrupted instances can be expressed and detected.
    """

    name: str
    n_max: int
    cats: list[FinCat]
    unit_ob: str
    sigma: dict[int, dict[Perm, dict[str, str]]]  # object maps of the actions
    mu: dict[MuKey, dict[tuple[str, ...], str]]
    phi_overrides: dict = field(default_factory=dict)
    unit_iso_overrides: dict = field(default_factory=dict)

    def cat(self, n: int) -> FinCat:
        if not 0 <= n <= self.n_max:
            raise OpCatError(f"arity {n} outside 0..{self.n_max}")
        return self.cats[n]

    def mu_apply(self, m: int, u: Perm, b: str, cs: list[str]) -> str:
        key = (m, u)
        if key not in self.mu:
            raise OpCatError(f"no composition table for u={u} into <{m}>")
        return self.mu[key][(b, *cs)]

    def act(self, n: int, sigma_perm: Perm, ob: str) -> str:
        return self.sigma[n][sigma_perm][ob]


def fibers_of(u: Perm, m: int) -> dict[int, list[int]]:
    return {j: [i for i in range(1, len(u) + 1) if u[i - 1] == j]
            for j in range(1, m + 1)}


def all_maps(n: int, m: int) -> list[Perm]:
    """All maps <n> -> <m> as value tuples."""
    if n == 0:
        return [()]
    return [tuple(v) for v in iproduct(range(1, m + 1), repeat=n)]


def sigma_u_elements(u: Perm, m: int):
    """The symmetry group of u: fiber-size-preserving pairs (sigma_J, fiber perms).

    Yields ``(sigma_J, fiber_perms, canonical image in the source symmetric
    group)``; ``sigma_J`` only permutes targets with equal fiber sizes.
    """
    n = len(u)
    fibers = fibers_of(u, m)
    sizes = {j: len(fibers[j]) for j in fibers}
    for sigma_j in all_perms(m):
        if any(sizes[j] != sizes[sigma_j[j - 1]] for j in range(1, m + 1)):
            continue
        fiber_perm_choices = [all_perms(sizes[j]) for j in range(1, m + 1)]
        for fiber_perms in iproduct(*fiber_perm_choices):
            image = [0] * n
            for j in range(1, m + 1):
                fib = fibers[j]
                target_fib = fibers[sigma_j[j - 1]]
                tau = fiber_perms[j - 1]
                for p, i in enumerate(fib, start=1):
                    image[i - 1] = target_fib[tau[p - 1] - 1]
            yield sigma_j, fiber_perms, tuple(image)


# ---------------------------------------------------------------------------
# construction from a set operad


def as_discrete_opcat(o: SetOperad, n_max: int | None = None) -> OpCategory:
    """The discrete operadic category of a set operad.

    Objects are the operad elements, the only morphisms are identities, the
    composition tables come from the derived multi-slot composition, and all
    coherence components are identities.
    """
    n_max = o.n_max if n_max is None else n_max
    if n_max > o.n_max:
        raise OpCatError("cannot exceed the operad's arity bound")
    cats = [discrete_cat(o.obs[n]) for n in range(n_max + 1)]
    sigma = {
        n: {s: dict(o.sym[n][s]) for s in all_perms(n)}
        for n in range(n_max + 1)
    }
    mu: dict[MuKey, dict[tuple[str, ...], str]] = {}
    for n in range(0, n_max + 1):
        for m in range(0, n_max + 1):
            for u in all_maps(n, m):
                fibers = fibers_of(u, m)
                sizes = [len(fibers[j]) for j in range(1, m + 1)]
                table = {}
                fiber_elts = [o.obs[s].elements for s in sizes]
                for b in o.obs[m]:
                    for cs in iproduct(*fiber_elts):
                        table[(b, *cs)] = o.mu(u, m, b, list(cs))
                mu[(m, u)] = table
    return OpCategory(
        name=f"discrete({o.name})",
        n_max=n_max,
        cats=cats,
        unit_ob=o.unit,
        sigma=sigma,
        mu=mu,
    )


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class OpCatVerdict:
    ok: bool
    law: str = ""
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_opcat(c: OpCategory, check_triples: bool = True) -> OpCatVerdict:
    """Equivariance, unit constraints, pair coherence, and triple cocycles."""
    for n in range(c.n_max + 1):
        ok, why = validate_fincat(c.cats[n])
        if not ok:
            return OpCatVerdict(False, "category", f"arity {n}: {why}")
        ident = identity_perm(n)
        for ob in c.cats[n].objects:
            if c.act(n, ident, ob) != ob:
                return OpCatVerdict(False, "action-identity", f"n={n} ob={ob}")
        for s in all_perms(n):
            for t in all_perms(n):
                from .operads import compose_perm

                st = compose_perm(s, t)
                for ob in c.cats[n].objects:
                    if c.act(n, s, c.act(n, t, ob)) != c.act(n, st, ob):
                        return OpCatVerdict(False, "action-composition",
                                            f"n={n} s={s} t={t} ob={ob}")

    if c.unit_ob not in c.cats[1].objects:
        return OpCatVerdict(False, "unit", "unit object missing from arity 1")

    # identity coherence components must really be identities
    if c.phi_overrides or c.unit_iso_overrides:
        key = next(iter({**c.phi_overrides, **c.unit_iso_overrides}))
        return OpCatVerdict(False, "coherence-component",
                            f"non-identity coherence component at {key}")

    # unit constraints (right and left unit isomorphisms are identities)
    for n in range(c.n_max + 1):
        u_id = identity_perm(n)
        for b in c.cats[n].objects:
            if c.mu_apply(n, u_id, b, [c.unit_ob] * n) != b:
                return OpCatVerdict(False, "right-unit", f"n={n} ob={b}")
        if n >= 0:
            u_to_point = tuple([1] * n)
            for b in c.cats[n].objects:
                if c.mu_apply(1, u_to_point, c.unit_ob, [b]) != b:
                    return OpCatVerdict(False, "left-unit", f"n={n} ob={b}")

    # equivariance of each composition functor
    for (m, u), table in sorted(c.mu.items()):
        n = len(u)
        fibers = fibers_of(u, m)
        sizes = [len(fibers[j]) for j in range(1, m + 1)]
        fiber_elts = [c.cats[s].objects.elements for s in sizes]
        for sigma_j, fiber_perms, canon in sigma_u_elements(u, m):
            inv_sigma = inverse_perm(sigma_j)
            for b in c.cats[m].objects:
                for cs in iproduct(*fiber_elts):
                    fam = []
                    for j in range(1, m + 1):
                        src_j = inv_sigma[j - 1]
                        fam.append(c.act(sizes[src_j - 1],
                                         fiber_perms[src_j - 1],
                                         cs[src_j - 1]))
                    lhs = c.mu_apply(m, u, c.act(m, sigma_j, b), fam)
                    rhs = c.act(n, canon, table[(b, *cs)])
                    if lhs != rhs:
                        return OpCatVerdict(
                            False, "mu-equivariance",
                            f"u={u} m={m} sigma_J={sigma_j} b={b} cs={cs}")

    # pair coherence: composing two table lookups matches the composite map
    verdict = _check_pairs(c)
    if not verdict.ok:
        return verdict
    if check_triples:
        verdict = _check_triples(c)
        if not verdict.ok:
            return verdict
    return OpCatVerdict(True)


def _restriction(u: Perm, v: Perm, m_v: int, k: int) -> tuple[Perm, list[int], list[int]]:
    """The restriction of u over target k of v, in skeletal form.

    Returns (u_k as a value tuple, the source positions of (vu)^-1(k), the
    middle positions v^-1(k)).
    """
    mid = [j for j in range(1, len(v) + 1) if v[j - 1] == k]
    src = [i for i in range(1, len(u) + 1) if v[u[i - 1] - 1] == k]
    rank = {j: r for r, j in enumerate(mid, start=1)}
    u_k = tuple(rank[u[i - 1]] for i in src)
    return u_k, src, mid


def _check_pairs(c: OpCategory) -> OpCatVerdict:
    for (m_v, v), _ in sorted(c.mu.items()):
        j_count = len(v)  # |J|: v: J -> K with |K| = m_v
        for (m_u, u), _ in sorted(c.mu.items()):
            if len(u) == 0 and j_count == 0:
                pass
            if m_u != j_count:
                continue
            n = len(u)
            vu = tuple(v[u[i] - 1] for i in range(n)) if n else ()
            fibers_v = fibers_of(v, m_v)
            fibers_u = fibers_of(u, m_u)
            size_v = [len(fibers_v[k]) for k in range(1, m_v + 1)]
            size_u = [len(fibers_u[j]) for j in range(1, m_u + 1)]
            b_obs = c.cats[m_v].objects.elements
            c_obs = [c.cats[s].objects.elements for s in size_v]
            d_obs = [c.cats[s].objects.elements for s in size_u]
            for b in b_obs:
                for cs in iproduct(*c_obs):
                    mid = c.mu_apply(m_v, v, b, list(cs))
                    for ds in iproduct(*d_obs):
                        lhs = c.mu_apply(m_u, u, mid, list(ds))
                        inner = []
                        for k in range(1, m_v + 1):
                            u_k, src_k, mid_k = _restriction(u, v, m_v, k)
                            fam = [ds[j - 1] for j in mid_k]
                            inner.append(
                                c.mu_apply(len(mid_k), u_k, cs[k - 1], fam))
                        rhs = c.mu_apply(m_v, vu, b, inner)
                        if lhs != rhs:
                            return OpCatVerdict(
                                False, "pair-coherence",
                                f"u={u} v={v} b={b} cs={cs} ds={ds}")
    return OpCatVerdict(True)


def _check_triples(c: OpCategory) -> OpCatVerdict:
    """Triple cocycle: full flattening along w, v, u agrees either way."""
    keys = sorted(c.mu.items())
    for (m_w, w), _ in keys:
        for (m_v, v), _ in keys:
            if m_v != len(w):
                continue
            for (m_u, u), _ in keys:
                if m_u != len(v):
                    continue
                n = len(u)
                wv = tuple(w[v[j] - 1] for j in range(len(v))) if len(v) else ()
                fibers_w = fibers_of(w, m_w)
                size_w = [len(fibers_w[l]) for l in range(1, m_w + 1)]
                fibers_v = fibers_of(v, m_v)
                size_v = [len(fibers_v[k]) for k in range(1, m_v + 1)]
                fibers_u = fibers_of(u, m_u)
                size_u = [len(fibers_u[j]) for j in range(1, m_u + 1)]
                b_obs = c.cats[m_w].objects.elements
                e_obs = [c.cats[s].objects.elements for s in size_w]
                c_obs = [c.cats[s].objects.elements for s in size_v]
                d_obs = [c.cats[s].objects.elements for s in size_u]
                vu = tuple(v[u[i] - 1] for i in range(n)) if n else ()
                wvu = tuple(w[vu[i] - 1] for i in range(n)) if n else ()
                for b in b_obs:
                    for es in iproduct(*e_obs):
                        mid1 = c.mu_apply(m_w, w, b, list(es))
                        for cs in iproduct(*c_obs):
                            mid2 = c.mu_apply(m_v, v, mid1, list(cs))
                            for ds in iproduct(*d_obs):
                                lhs = c.mu_apply(m_u, u, mid2, list(ds))
                                # flatten bottom-up: u into v, then into w
                                inner_u = []
                                for k in range(1, m_v + 1):
                                    u_k, _, mid_k = _restriction(u, v, m_v, k)
                                    fam = [ds[j - 1] for j in mid_k]
                                    inner_u.append(
                                        c.mu_apply(len(mid_k), u_k, cs[k - 1], fam))
                                inner_vu = []
                                for l in range(1, m_w + 1):
                                    vu_l, _, mid_l = _restriction(vu, w, m_w, l)
                                    fam = [inner_u[k - 1] for k in mid_l]
                                    inner_vu.append(
                                        c.mu_apply(len(mid_l), vu_l, es[l - 1], fam))
                                rhs = c.mu_apply(m_w, wvu, b, inner_vu)
                                if lhs != rhs:
                                    return OpCatVerdict(
                                        False, "triple-cocycle",
                                        f"w={w} v={v} u={u} b={b}")
    return OpCatVerdict(True)


# ---------------------------------------------------------------------------
# rectification


def rectify_tree(c: OpCategory, t: Tree) -> FinCat:
    """The product category over the vertices of a tree."""
    for v in t.vertices():
        if t.arity(v) > c.n_max:
            raise OpCatError(f"vertex arity {t.arity(v)} exceeds bound {c.n_max}")
    return product_cat([c.cats[t.arity(v)] for v in t.vertices()])


def rectify_generator(c: OpCategory, step: GenStep) -> dict[str, str]:
    """The object table of the functor induced by a generator g: T' -> T.

    Maps objects of the product category at T to objects at T': symmetry
    actions reindex, inner faces compose through a mu table with unit
    padding, outer faces project, degeneracies insert the unit object.
    """
    g = step.mor
    src_cat = rectify_tree(c, g.dst)
    dst_verts = g.src.vertices()
    src_verts = g.dst.vertices()
    src_index = {v: k for k, v in enumerate(src_verts)}

    table = {}
    for name in src_cat.objects:
        xs = json.loads(name)
        out = []
        for v in dst_verts:
            root, verts = g.image(v)
            if not verts:
                out.append(c.unit_ob)
                continue
            if len(verts) == 1:
                (w,) = verts
                pi = _reslot_perm(g, v, w)
                n = g.src.arity(v)
                x = xs[src_index[w]]
                out.append(c.act(n, inverse_perm(pi), x) if n else x)
                continue
            if len(verts) == 2:
                v1 = root
                (v0,) = verts - {root}
                n1, n0 = g.dst.arity(v1), g.dst.arity(v0)
                s_e = _slot(g.dst, v1, v0)
                n_tot = n1 + n0 - 1
                if n_tot > c.n_max:
                    raise OpCatError(f"merged arity {n_tot} exceeds bound {c.n_max}")
                # u: slots of the merged vertex -> slots of the lower vertex
                ins = g.src.in_edges(v)
                u = []
                for p in ins:
                    q = g.edge(p)
                    if q in set(g.dst.in_edges(v1)):
                        u.append(_slot(g.dst, v1, q))
                    else:
                        u.append(s_e)
                fam = [c.unit_ob] * n1
                fam[s_e - 1] = xs[src_index[v0]]
                out.append(c.mu_apply(n1, tuple(u), xs[src_index[v1]], fam))
                continue
            raise OpCatError("generator letters have at most two-vertex images")
        table[name] = _name(*out)
    return table


def rectify_morphism(c: OpCategory, m: OmegaMor, strategy: str = "lex",
                     _cache: dict | None = None) -> dict[str, str]:
    """Object table for an arbitrary tree morphism, via its decomposition."""
    letters = decompose(m, strategy, check=_cache is None)
    if not letters:
        return {name: name for name in rectify_tree(c, m.src).objects}
    table = None
    for step in reversed(letters):
        if _cache is not None and step.mor in _cache:
            part = _cache[step.mor]
        else:
            part = rectify_generator(c, step)
            if _cache is not None:
                _cache[step.mor] = part
        table = part if table is None else {k: part[table[k]] for k in table}
    return table


def mutate_mu(c: OpCategory, key: MuKey, entry: tuple, new_value: str) -> OpCategory:
    """Copy with one composition-table entry replaced (for mutation tests)."""
    mu = {k: dict(t) for k, t in c.mu.items()}
    if entry not in mu[key]:
        raise OpCatError(f"no entry {entry} in mu table {key}")
    mu[key][entry] = new_value
    return OpCategory(c.name + "/mutated", c.n_max, c.cats, c.unit_ob,
                      c.sigma, mu, dict(c.phi_overrides), dict(c.unit_iso_overrides))


def mutate_phi(c: OpCategory, key, value: str) -> OpCategory:
    overrides = dict(c.phi_overrides)
    overrides[key] = value
    return OpCategory(c.name + "/mutated", c.n_max, c.cats, c.unit_ob,
                      c.sigma, c.mu, overrides, dict(c.unit_iso_overrides))


# ---------------------------------------------------------------------------
# coherence of the rectification


@dataclass(frozen=True)
class CoherenceReport:
    ok: bool
    pairs_checked: int
    pairs_skipped: int
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def tree_generators(t: Tree, c_bound: int) -> list[GenStep]:
    """All canonical generator letters into ``t`` within the arity bound."""
    from .omega import (
        automorphism_mor,
        degeneracy,
        eta_inclusion,
        inner_face,
        subtree_inclusion,
        _connected_vertex_sets,
    )
    from .trees import automorphisms

    out: list[GenStep] = []
    for aut in automorphisms(t):
        out.append(automorphism_mor(t, aut))
    for e in t.inner_edges():
        merged = t.arity(e[:-1]) + t.arity(e) - 1
        if merged <= c_bound:
            out.append(inner_face(t, e))
    for vset in _connected_vertex_sets(t):
        out.append(subtree_inclusion(t, vset))
    for e in sorted(t.edges()):
        out.append(eta_inclusion(t, e))
        out.append(degeneracy(t, e))
    return out


def check_rectified_coherence(
    c: OpCategory, max_vertices: int, max_leaves: int | None = None
) -> CoherenceReport:
    """Compare both composites for every composable generator pair.

    For each pair g: T'' -> T', f: T' -> T of canonical generators between
    trees within the bound, the table of F(g) after F(f) must equal the
    table computed along the canonical decomposition of the composite; for
    the discrete case these are strict table equalities.
    """
    from .omega import compose_morphisms
    from .trees import enumerate_trees

    if c.phi_overrides or c.unit_iso_overrides:
        key = next(iter({**c.phi_overrides, **c.unit_iso_overrides}))
        return CoherenceReport(False, 0, 0,
                               f"non-identity coherence component at {key}")

    max_leaves = c.n_max if max_leaves is None else max_leaves
    universe = [
        t for t in enumerate_trees(max_vertices, max_leaves)
        if all(t.arity(v) <= c.n_max for v in t.vertices())
    ]
    allowed = {t for t in universe}
    checked = skipped = 0
    gen_cache: dict[Tree, list[GenStep]] = {}
    table_cache: dict = {}

    def gens(t: Tree) -> list[GenStep]:
        if t not in gen_cache:
            gen_cache[t] = [
                s for s in tree_generators(t, c.n_max)
                if s.mor.src in allowed and s.mor.src.vertex_count() <= max_vertices
            ]
        return gen_cache[t]

    def table_of(step: GenStep) -> dict[str, str]:
        if step.mor not in table_cache:
            table_cache[step.mor] = rectify_generator(c, step)
        return table_cache[step.mor]

    composite_cache: dict = {}
    for t in universe:
        for f in gens(t):
            tf = table_of(f)
            for g in gens(f.mor.src):
                try:
                    composite = compose_morphisms(f.mor, g.mor)
                    tg = table_of(g)
                    lhs = {k: tg[tf[k]] for k in tf}
                    rhs = composite_cache.get(composite)
                    if rhs is None:
                        rhs = rectify_morphism(c, composite, _cache=table_cache)
                        composite_cache[composite] = rhs
                except OpCatError:
                    skipped += 1
                    continue
                checked += 1
                if lhs != rhs:
                    return CoherenceReport(
                        False, checked, skipped,
                        f"pair f: {f.kind} into {t.text()}, g: {g.kind} into "
                        f"{f.mor.src.text()}")
    return CoherenceReport(True, checked, skipped)
