"""Reduced symmetric operads in finite sets.

An operad is a family of finite element sets per arity with total tables for
the slotwise compositions and the symmetric-group actions.  The general
composition along a map of finite sets is derived from the slotwise tables by
unit padding, so its coherence is something the test suite checks rather than
data the tables assert.

Built-in operads: ``commutative`` (singletons everywhere) and ``associative``
(orderings, composed by block substitution).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .finset import FinMap, FinSet, _name
from .omega import GenStep, OmegaMor, decompose
from .trees import Path, Tree


class OperadError(ValueError):
    pass


# ---------------------------------------------------------------------------
# permutations: sigma is a tuple with sigma[i-1] = sigma(i)

Perm = tuple[int, ...]


def identity_perm(n: int) -> Perm:
    return tuple(range(1, n + 1))


def compose_perm(s: Perm, t: Perm) -> Perm:
    """(s . t)(i) = s(t(i))."""
    return tuple(s[t[i] - 1] for i in range(len(t)))


def inverse_perm(s: Perm) -> Perm:
    out = [0] * len(s)
    for i, v in enumerate(s):
        out[v - 1] = i + 1
    return tuple(out)


def transposition(i: int, j: int, n: int) -> Perm:
    out = list(range(1, n + 1))
    out[i - 1], out[j - 1] = j, i
    return tuple(out)


def cycle_to_last(j: int, n: int) -> Perm:
    """Send j to n and slide j+1..n down one; identity below j.

    This is the relabeling that moves a freshly grafted input to the final
    position while keeping everything else in order; it equals the
    transposition (j n) exactly when j >= n - 1.
    """
    out = list(range(1, j)) + [n] + list(range(j, n))
    return tuple(out)


def extend_perm(s: Perm, n: int) -> Perm:
    """Extend to n points, fixing the new ones."""
    return s + tuple(range(len(s) + 1, n + 1))


def block_perm(sigma: Perm, sizes: list[int]) -> Perm:
    """Permute consecutive blocks by sigma, order-preserving inside blocks.

    Source block k (size sizes[k-1]) maps onto the target block at position
    sigma(k), whose offset accounts for the permuted block sizes.
    """
    n = len(sigma)
    src_off = [0] * (n + 1)
    for k in range(1, n + 1):
        src_off[k] = src_off[k - 1] + sizes[k - 1]
    inv = inverse_perm(sigma)
    tgt_off = {}
    acc = 0
    for j in range(1, n + 1):
        tgt_off[j] = acc
        acc += sizes[inv[j - 1] - 1]
    out = [0] * src_off[n]
    for k in range(1, n + 1):
        for p in range(1, sizes[k - 1] + 1):
            out[src_off[k - 1] + p - 1] = tgt_off[sigma[k - 1]] + p
    return tuple(out)


def shifted_perm(tau: Perm, i: int, n_total: int) -> Perm:
    """Act as tau on the block of labels [i, i+len(tau)-1], identity elsewhere."""
    m = len(tau)
    out = list(range(1, n_total + 1))
    for q in range(1, m + 1):
        out[i + q - 2] = tau[q - 1] + i - 1
    return tuple(out)


def all_perms(n: int) -> list[Perm]:
    return [tuple(p) for p in permutations(range(1, n + 1))]


# ---------------------------------------------------------------------------
# the operad type


@dataclass
class SetOperad:
    """Tables for a reduced symmetric operad in finite sets.

    ``comp[(n, m, i)][(a, b)]`` is the slot-``i`` composite of a and b;
    tables exist for every n >= 1, m >= 0 with n+m-1 <= n_max.
    ``sym[n][sigma][a]`` is the left action relabeling input k to sigma(k).
    Instances are immutable by convention once built.
    """

    name: str
    n_max: int
    obs: list[FinSet]
    unit: str
    comp: dict[tuple[int, int, int], dict[tuple[str, str], str]]
    sym: dict[int, dict[Perm, dict[str, str]]]

    def elements(self, n: int) -> FinSet:
        if not 0 <= n <= self.n_max:
            raise OperadError(f"arity {n} outside 0..{self.n_max}")
        return self.obs[n]

    def compose(self, n: int, m: int, i: int, a: str, b: str) -> str:
        key = (n, m, i)
        if key not in self.comp:
            raise OperadError(f"no composition table for {key}")
        return self.comp[key][(a, b)]

    def act(self, n: int, sigma: Perm, a: str) -> str:
        return self.sym[n][sigma][a]

    def is_pointed_01(self) -> bool:
        return len(self.obs[0]) == 1 and len(self.obs[1]) == 1

    @property
    def o0(self) -> str:
        """The unique nullary element (requires pointed operad)."""
        if len(self.obs[0]) != 1:
            raise OperadError("operad has no unique nullary element")
        return self.obs[0].elements[0]

    # -- derived composition -------------------------------------------------

    def gamma(self, b: str, cs: list[str], arities: list[int]) -> str:
        """Total composition: plug cs[j-1] into slot j of b, all slots at once.

        Nullary slots are substituted first so intermediate arities never
        exceed max(len(cs), result arity); slot positions are tracked as
        earlier substitutions shift them.
        """
        m = len(cs)
        result = b
        res_arity = m
        position = list(range(1, m + 1))
        order = sorted(range(m), key=lambda j: (arities[j] > 0, -j))
        for j in order:
            result = self.compose(res_arity, arities[j], position[j], result, cs[j])
            shift = arities[j] - 1
            res_arity += shift
            for k in range(m):
                if position[k] > position[j]:
                    position[k] += shift
        return result

    def mu(self, u: Perm, m: int, b: str, cs: list[str]) -> str:
        """Composition along the map u: <n> -> <m> given as a value tuple.

        ``cs[j-1]`` has arity |u^-1(j)|; the result's inputs are relabeled so
        that the block for fiber j occupies the actual fiber positions.
        """
        n = len(u)
        fibers = {j: [i for i in range(1, n + 1) if u[i - 1] == j] for j in range(1, m + 1)}
        arities = [len(fibers[j]) for j in range(1, m + 1)]
        flat = self.gamma(b, cs, arities)
        concat = [i for j in range(1, m + 1) for i in fibers[j]]
        sig = tuple(concat)
        if sig == identity_perm(n):
            return flat
        return self.act(n, sig, flat)


def _check_total(operad: SetOperad) -> None:
    for n in range(1, operad.n_max + 1):
        for m in range(0, operad.n_max + 1):
            if n + m - 1 > operad.n_max:
                continue
            for i in range(1, n + 1):
                key = (n, m, i)
                if key not in operad.comp:
                    raise OperadError(f"missing composition table {key}")
                table = operad.comp[key]
                for a in operad.obs[n]:
                    for b in operad.obs[m]:
                        if (a, b) not in table:
                            raise OperadError(f"partial table {key}: missing {(a, b)}")
    for n in range(0, operad.n_max + 1):
        if n not in operad.sym:
            raise OperadError(f"missing symmetry tables for arity {n}")
        for sigma in all_perms(n):
            if sigma not in operad.sym[n]:
                raise OperadError(f"missing symmetry table {n}, {sigma}")
            for a in operad.obs[n]:
                if a not in operad.sym[n][sigma]:
                    raise OperadError(f"partial symmetry table at {n}, {sigma}, {a}")


def make_operad(name, n_max, obs, unit, comp, sym) -> SetOperad:
    o = SetOperad(name, n_max, obs, unit, comp, sym)
    _check_total(o)
    if unit not in o.obs[1]:
        raise OperadError("unit must be a unary element")
    return o


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Verdict:
    ok: bool
    law: str = ""
    witness: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_operad(o: SetOperad) -> Verdict:
    """Exhaustively verify unit, associativity, interchange and equivariance."""
    try:
        _check_total(o)
    except OperadError as exc:
        return Verdict(False, "totality", str(exc))

    N = o.n_max

    # symmetry tables are a group action by bijections
    for n in range(0, N + 1):
        ident = identity_perm(n)
        for a in o.obs[n]:
            if o.act(n, ident, a) != a:
                return Verdict(False, "action-identity", f"n={n} a={a}")
        for s in all_perms(n):
            values = [o.act(n, s, a) for a in o.obs[n]]
            if len(set(values)) != len(values):
                return Verdict(False, "action-bijective", f"n={n} sigma={s}")
            for t in all_perms(n):
                st = compose_perm(s, t)
                for a in o.obs[n]:
                    if o.act(n, s, o.act(n, t, a)) != o.act(n, st, a):
                        return Verdict(False, "action-composition",
                                       f"n={n} s={s} t={t} a={a}")

    # unit laws
    for n in range(0, N + 1):
        for a in o.obs[n]:
            if o.compose(1, n, 1, o.unit, a) != a:
                return Verdict(False, "left-unit", f"n={n} a={a}")
            for i in range(1, n + 1):
                if o.compose(n, 1, i, a, o.unit) != a:
                    return Verdict(False, "right-unit", f"n={n} i={i} a={a}")

    # associativity, nested and disjoint
    for n in range(1, N + 1):
        for m in range(0, N + 1):
            if n + m - 1 > N:
                continue
            for p in range(0, N + 1):
                if n + m + p - 2 > N:
                    continue
                for a in o.obs[n]:
                    for b in o.obs[m]:
                        for c in o.obs[p]:
                            for i in range(1, n + 1):
                                ab = o.compose(n, m, i, a, b)
                                for j in range(1, m + 1):
                                    lhs = o.compose(n + m - 1, p, i - 1 + j, ab, c)
                                    rhs = o.compose(
                                        n, m + p - 1, i, a, o.compose(m, p, j, b, c))
                                    if lhs != rhs:
                                        return Verdict(
                                            False, "nested-associativity",
                                            f"n,m,p={n},{m},{p} i={i} j={j} a={a} b={b} c={c}")
                                if m == 0:
                                    continue
                                for j in range(1, i):
                                    lhs = o.compose(n + m - 1, p, j, ab, c)
                                    ac = o.compose(n, p, j, a, c)
                                    rhs = o.compose(n + p - 1, m, i + p - 1, ac, b)
                                    if lhs != rhs:
                                        return Verdict(
                                            False, "interchange",
                                            f"n,m,p={n},{m},{p} i={i} j={j} a={a} b={b} c={c}")

    # equivariance
    for n in range(1, N + 1):
        for m in range(0, N + 1):
            if n + m - 1 > N:
                continue
            for i in range(1, n + 1):
                sizes = [m if k == i else 1 for k in range(1, n + 1)]
                for a in o.obs[n]:
                    for b in o.obs[m]:
                        ab = o.compose(n, m, i, a, b)
                        for s in all_perms(n):
                            lhs = o.compose(n, m, s[i - 1], o.act(n, s, a), b)
                            rhs = o.act(n + m - 1, block_perm(s, sizes), ab)
                            if lhs != rhs:
                                return Verdict(False, "outer-equivariance",
                                               f"n,m={n},{m} i={i} sigma={s} a={a} b={b}")
                        for t in all_perms(m):
                            lhs = o.compose(n, m, i, a, o.act(m, t, b))
                            rhs = o.act(n + m - 1, shifted_perm(t, i, n + m - 1), ab)
                            if lhs != rhs:
                                return Verdict(False, "inner-equivariance",
                                               f"n,m={n},{m} i={i} tau={t} a={a} b={b}")
    return Verdict(True)


# ---------------------------------------------------------------------------
# built-in operads


def _assoc_name(word: tuple[int, ...]) -> str:
    return "".join(str(x) for x in word) if word else "e"


def _assoc_word(name: str) -> tuple[int, ...]:
    return () if name == "e" else tuple(int(c) for c in name)


def _assoc_compose(n: int, m: int, i: int, a: str, b: str) -> str:
    wa, wb = _assoc_word(a), _assoc_word(b)
    out = []
    for x in wa:
        if x < i:
            out.append(x)
        elif x == i:
            out.extend(y + i - 1 for y in wb)
        else:
            out.append(x + m - 1)
    return _assoc_name(tuple(out))


def builtin_operad(kind: str, n_max: int) -> SetOperad:
    """The commutative and the associative set operads up to arity n_max."""
    if n_max < 1:
        raise OperadError("n_max must be at least 1")
    if kind == "commutative":
        obs = [FinSet(("*",)) for _ in range(n_max + 1)]
        comp = {}
        for n in range(1, n_max + 1):
            for m in range(0, n_max + 1):
                if n + m - 1 > n_max:
                    continue
                for i in range(1, n + 1):
                    comp[(n, m, i)] = {("*", "*"): "*"}
        sym = {
            n: {s: {"*": "*"} for s in all_perms(n)}
            for n in range(0, n_max + 1)
        }
        return make_operad("commutative", n_max, obs, "*", comp, sym)

    if kind == "associative":
        if n_max > 9:
            raise OperadError("associative tables use digit names; n_max <= 9")
        words = {n: [tuple(p) for p in permutations(range(1, n + 1))] for n in range(0, n_max + 1)}
        obs = [FinSet(_assoc_name(w) for w in words[n]) for n in range(0, n_max + 1)]
        comp = {}
        for n in range(1, n_max + 1):
            for m in range(0, n_max + 1):
                if n + m - 1 > n_max:
                    continue
                for i in range(1, n + 1):
                    table = {}
                    for wa in words[n]:
                        for wb in words[m]:
                            table[(_assoc_name(wa), _assoc_name(wb))] = _assoc_compose(
                                n, m, i, _assoc_name(wa), _assoc_name(wb))
                    comp[(n, m, i)] = table
        sym = {}
        for n in range(0, n_max + 1):
            sym[n] = {}
            for s in all_perms(n):
                sym[n][s] = {
                    _assoc_name(w): _assoc_name(tuple(s[x - 1] for x in w))
                    for w in words[n]
                }
        return make_operad("associative", n_max, obs, "1", comp, sym)

    raise OperadError(f"unknown builtin operad {kind!r}")


def with_mutated_compose(o: SetOperad, key, entry, new_value: str) -> SetOperad:
    """Copy with one composition-table entry replaced (for mutation tests)."""
    comp = {k: dict(t) for k, t in o.comp.items()}
    if entry not in comp[key]:
        raise OperadError(f"no entry {entry} in table {key}")
    comp[key][entry] = new_value
    return SetOperad(o.name + "/mutated", o.n_max, o.obs, o.unit, comp, o.sym)


def with_mutated_sym(o: SetOperad, n: int, sigma: Perm, elem: str, new_value: str) -> SetOperad:
    sym = {k: {s: dict(t) for s, t in v.items()} for k, v in o.sym.items()}
    sym[n][sigma][elem] = new_value
    return SetOperad(o.name + "/mutated", o.n_max, o.obs, o.unit, o.comp, sym)


# ---------------------------------------------------------------------------
# evaluation on trees and the action of tree morphisms


def tuple_name(parts: list[str]) -> str:
    return _name(*parts)


def eval_on_tree(o: SetOperad, t: Tree) -> FinSet:
    """The product set over the vertices, named by vertex-indexed tuples."""
    verts = t.vertices()
    for v in verts:
        if t.arity(v) > o.n_max:
            raise OperadError(f"vertex arity {t.arity(v)} exceeds n_max={o.n_max}")
    from itertools import product as iproduct

    choices = [o.obs[t.arity(v)].elements for v in verts]
    return FinSet(
        tuple_name(list(combo)) for combo in (iproduct(*choices) if verts else [()])
    )


def _slot(t: Tree, v: Path, e: Path) -> int:
    return t.in_edges(v).index(e) + 1


def _reslot_perm(g: OmegaMor, v_src: Path, w_dst: Path) -> Perm:
    """pi with pi(k) = target slot of the k-th input edge of the source vertex."""
    src, dst = g.src, g.dst
    ins = src.in_edges(v_src)
    return tuple(_slot(dst, w_dst, g.edge(p)) for p in ins)


def act_on_generator(o: SetOperad, step: GenStep) -> FinMap:
    """The contravariant action of a generator letter g: T' -> T.

    Returns the map eval(T) -> eval(T'): isomorphisms reindex tuples through
    the symmetry tables, inner faces compose the two merged components,
    outer faces project, degeneracies insert the unit.
    """
    g = step.mor
    src_set = eval_on_tree(o, g.dst)
    dst_set = eval_on_tree(o, g.src)
    dst_verts = g.src.vertices()
    src_verts = g.dst.vertices()
    src_index = {v: k for k, v in enumerate(src_verts)}

    import json

    def components(name: str) -> list[str]:
        return json.loads(name)

    assignment = {}
    for name in src_set:
        xs = components(name)
        out = []
        for v in dst_verts:
            root, verts = g.image(v)
            if not verts:
                out.append(o.unit)
                continue
            if len(verts) == 1:
                (w,) = verts
                pi = _reslot_perm(g, v, w)
                x = xs[src_index[w]]
                n = g.src.arity(v)
                out.append(o.act(n, inverse_perm(pi), x) if n else x)
                continue
            if len(verts) == 2 and step.kind == "inner":
                e, x_v, v1, v0 = step.datum
                assert v == x_v
                n1, n0 = g.dst.arity(v1), g.dst.arity(v0)
                s_e = _slot(g.dst, v1, e)
                comp = o.compose(n1, n0, s_e, xs[src_index[v1]], xs[src_index[v0]])
                # block position of each input edge of the merged vertex
                pi = []
                for p in g.src.in_edges(v):
                    q = g.edge(p)
                    if q in set(g.dst.in_edges(v1)):
                        s = _slot(g.dst, v1, q)
                        pi.append(s if s < s_e else s + n0 - 1)
                    else:
                        pi.append(s_e + _slot(g.dst, v0, q) - 1)
                ntot = n1 + n0 - 1
                out.append(o.act(ntot, inverse_perm(tuple(pi)), comp) if ntot else comp)
                continue
            raise OperadError(f"letter of kind {step.kind} has an unexpected image")
        assignment[name] = tuple_name(out)
    return FinMap(src_set, dst_set, assignment)


def act_on_morphism(o: SetOperad, m: OmegaMor, strategy: str = "lex") -> FinMap:
    """The action of an arbitrary morphism, via its decomposition."""
    letters = decompose(m, strategy)
    result = None
    for step in reversed(letters):
        part = act_on_generator(o, step)
        result = part if result is None else result.then(part)
    if result is None:
        s = eval_on_tree(o, m.src)
        return FinMap(s, s, {x: x for x in s})
    return result
