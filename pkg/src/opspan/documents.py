"""JSON document formats for trees, morphisms, operads, cospans and spans.

Every document carries a schema tag; loaders validate shape and reject
partial tables so that a bad file fails fast with a readable message rather
than deep inside a computation.
"""

from __future__ import annotations

import json

from .cospans import Cospan, Span, carrier_slice
from .finset import FinMap, FinSet, SliceObj
from .omega import OmegaMor, make_morphism
from .operads import SetOperad, all_perms, make_operad
from .trees import parse_tree, path_from_str, path_str

SCHEMA = "opspan/1"


class DocumentError(ValueError):
    pass


def _require(doc: dict, field: str):
    if field not in doc:
        raise DocumentError(f"missing field {field!r}")
    return doc[field]


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return doc


# ---------------------------------------------------------------------------
# morphisms


def morphism_to_doc(m: OmegaMor) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "morphism",
        "src": m.src.text(),
        "dst": m.dst.text(),
        "edge_map": {path_str(p): path_str(q) for p, q in m.edge_pairs},
        "vertex_images": {
            path_str(v): {
                "root": path_str(root),
                "vertices": [path_str(w) for w in verts],
            }
            for v, (root, verts) in m.image_pairs
        },
    }


def morphism_from_doc(doc: dict) -> OmegaMor:
    if doc.get("kind") != "morphism":
        raise DocumentError("expected a morphism document")
    src = parse_tree(_require(doc, "src"))
    dst = parse_tree(_require(doc, "dst"))
    edge_map = {
        path_from_str(k): path_from_str(v)
        for k, v in _require(doc, "edge_map").items()
    }
    images = {}
    for k, img in _require(doc, "vertex_images").items():
        images[path_from_str(k)] = (
            path_from_str(_require(img, "root")),
            frozenset(path_from_str(w) for w in _require(img, "vertices")),
        )
    return make_morphism(src, dst, edge_map, images)


# ---------------------------------------------------------------------------
# operads


def operad_to_doc(o: SetOperad) -> dict:
    compose_entries = [
        {"n": n, "m": m, "i": i, "left": a, "right": b, "result": r}
        for (n, m, i), table in sorted(o.comp.items())
        for (a, b), r in sorted(table.items())
    ]
    symmetry_entries = [
        {"n": n, "perm": list(s), "elem": a, "result": r}
        for n, tables in sorted(o.sym.items())
        for s, table in sorted(tables.items())
        for a, r in sorted(table.items())
    ]
    return {
        "schema": SCHEMA,
        "kind": "operad",
        "name": o.name,
        "arity_max": o.n_max,
        "elements": {str(n): list(o.obs[n].elements) for n in range(o.n_max + 1)},
        "unit": o.unit,
        "compose": compose_entries,
        "symmetry": symmetry_entries,
    }


def operad_from_doc(doc: dict) -> SetOperad:
    if doc.get("kind") != "operad":
        raise DocumentError("expected an operad document")
    n_max = _require(doc, "arity_max")
    elements = _require(doc, "elements")
    obs = []
    for n in range(n_max + 1):
        if str(n) not in elements:
            raise DocumentError(f"missing elements for arity {n}")
        obs.append(FinSet(elements[str(n)]))
    comp: dict = {}
    for entry in _require(doc, "compose"):
        key = (entry["n"], entry["m"], entry["i"])
        comp.setdefault(key, {})[(entry["left"], entry["right"])] = entry["result"]
    sym: dict = {}
    for entry in _require(doc, "symmetry"):
        n = entry["n"]
        sym.setdefault(n, {}).setdefault(tuple(entry["perm"]), {})[
            entry["elem"]] = entry["result"]
    for n in range(n_max + 1):
        sym.setdefault(n, {})
        ident = tuple(range(1, n + 1))
        if ident not in sym[n]:
            sym[n][ident] = {a: a for a in obs[n]}
        for s in all_perms(n):
            sym[n].setdefault(s, {})
    try:
        return make_operad(_require(doc, "name"), n_max, obs,
                           _require(doc, "unit"), comp, sym)
    except Exception as exc:
        raise DocumentError(f"operad tables invalid: {exc}") from exc


# ---------------------------------------------------------------------------
# finite sets, maps, cospans and spans


def finmap_to_doc(f: FinMap) -> dict:
    return {"src": list(f.src.elements), "dst": list(f.dst.elements),
            "assignment": [[a, b] for a, b in f.pairs]}


def finmap_from_doc(doc: dict, src: FinSet | None = None,
                    dst: FinSet | None = None) -> FinMap:
    src = src if src is not None else FinSet(_require(doc, "src"))
    dst = dst if dst is not None else FinSet(_require(doc, "dst"))
    return FinMap(src, dst, {a: b for a, b in _require(doc, "assignment")})


def cospan_to_doc(c: Cospan) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "cospan",
        "base": list(c.base.elements),
        "carrier": list(c.carrier.elements),
        "arity": c.arity,
        "middle": list(c.middle.total.elements),
        "projection": [[x, c.middle.projection(x)] for x in c.middle.total],
        "left_legs": [
            [[x, leg(x)] for x in leg.src] for leg in c.left_legs
        ],
        "right_leg": [[x, c.right_leg(x)] for x in c.right_leg.src],
    }


def cospan_from_doc(doc: dict) -> Cospan:
    if doc.get("kind") != "cospan":
        raise DocumentError("expected a cospan document")
    base = FinSet(_require(doc, "base"))
    carrier = FinSet(_require(doc, "carrier"))
    middle_total = FinSet(_require(doc, "middle"))
    projection = FinMap(middle_total, base,
                        {a: b for a, b in _require(doc, "projection")})
    middle = SliceObj(middle_total, base, projection)
    cs = carrier_slice(carrier, base)

    def leg(rows) -> FinMap:
        return FinMap(cs.total, middle_total, {a: b for a, b in rows})

    try:
        return Cospan(base, carrier, _require(doc, "arity"), middle,
                      tuple(leg(rows) for rows in _require(doc, "left_legs")),
                      leg(_require(doc, "right_leg")))
    except Exception as exc:
        raise DocumentError(f"cospan invalid: {exc}") from exc


def span_to_doc(s: Span) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "span",
        "base": list(s.base.elements),
        "carrier": list(s.carrier.elements),
        "arity": s.arity,
        "middle": list(s.middle.total.elements),
        "projection": [[x, s.middle.projection(x)] for x in s.middle.total],
        "left_legs": [
            [[x, leg(x)] for x in leg.src] for leg in s.left_legs
        ],
        "right_leg": [[x, s.right_leg(x)] for x in s.right_leg.src],
    }


def composition_from_doc(doc: dict) -> tuple[tuple[int, ...], Cospan, list[Cospan]]:
    """A cospan composition request: the map, the outer, and the inners."""
    if doc.get("kind") != "cospan_composition":
        raise DocumentError("expected a cospan_composition document")
    u = tuple(_require(doc, "u"))
    outer = cospan_from_doc(_require(doc, "outer"))
    inners = [cospan_from_doc(d) for d in _require(doc, "inners")]
    return u, outer, inners
