"""JSON schemas for dendrites, points, homeomorphisms, measures and reports.

Rationals are serialized as fraction strings ("3/4", "2"); vertex and edge
ids pass through unchanged (strings or integers).
"""

from __future__ import annotations

import json

from .dendrite import Dendrite, DPoint, VertexPoint
from .errors import ConfigInvalid
from .homeo import Homeo, PLMap
from .measure import PLMeasure
from .util import frac, frac_str, id_key


def dendrite_to_json(dendrite: Dendrite) -> dict:
    doc = {
        "vertices": sorted(dendrite.vertices, key=id_key),
        "edges": [{"id": e.eid, "u": e.u, "v": e.v, "level": e.level}
                  for e in dendrite.edges],
    }
    if dendrite._weight_rule == "dyadic":
        doc["weight_rule"] = "dyadic"
    else:
        doc["weight_rule"] = {"custom": [frac_str(w) for w in dendrite._weight_rule]}
    return doc


def dendrite_from_json(doc: dict) -> Dendrite:
    try:
        vertices = doc["vertices"]
        edges = [(e["id"], e["u"], e["v"], e.get("level", i + 1))
                 for i, e in enumerate(doc["edges"])]
        rule = doc.get("weight_rule", "dyadic")
    except (KeyError, TypeError) as exc:
        raise ConfigInvalid(f"malformed dendrite document: {exc}") from exc
    if rule == "dyadic":
        return Dendrite(vertices, edges, "dyadic")
    if isinstance(rule, dict) and "custom" in rule:
        raw = rule["custom"]
        # accept both flat ["p/q", ...] and nested [["p/q"], ...] spellings
        weights = [frac(w[0] if isinstance(w, list) else w) for w in raw]
        return Dendrite(vertices, edges, weights)
    raise ConfigInvalid(f"unknown weight rule {rule!r}")


def point_to_json(p: DPoint) -> dict:
    if isinstance(p, VertexPoint):
        return {"vertex": p.vertex}
    return {"edge": p.edge, "t": frac_str(p.t)}


def point_from_json(doc: dict, dendrite: Dendrite) -> DPoint:
    if "vertex" in doc:
        return dendrite.vertex_point(doc["vertex"])
    if "edge" in doc:
        return dendrite.point(doc["edge"], frac(doc["t"]))
    raise ConfigInvalid(f"malformed point document: {doc!r}")


def _plmap_to_json(plm: PLMap) -> dict:
    return {"x": [frac_str(x) for x in plm.xs], "y": [frac_str(y) for y in plm.ys]}


def _plmap_from_json(doc: dict) -> PLMap:
    return PLMap([frac(x) for x in doc["x"]], [frac(y) for y in doc["y"]])


def homeo_to_json(h: Homeo) -> dict:
    X = h.dendrite
    single = len(X.edges) == 1
    if single:
        e = X.edges[0]
        tgt, plm = h.edge_map[e.eid]
        if tgt == e.eid:
            return {"interval_pl": _plmap_to_json(plm)}
    return {"tree_auto": {
        "vertex_map": [[k, v] for k, v in sorted(h.vertex_map.items(),
                                                 key=lambda kv: id_key(kv[0]))],
        "edge_maps": [{"edge": eid, "target": tgt, "map": _plmap_to_json(plm)}
                      for eid, (tgt, plm) in sorted(h.edge_map.items(),
                                                    key=lambda kv: id_key(kv[0]))],
    }}


def homeo_from_json(doc: dict, dendrite: Dendrite) -> Homeo:
    if "interval_pl" in doc:
        from .homeo import interval_homeo
        plm = doc["interval_pl"]
        return interval_homeo(dendrite, [frac(x) for x in plm["x"]],
                              [frac(y) for y in plm["y"]])
    if "tree_auto" in doc:
        body = doc["tree_auto"]
        vm = {k: v for k, v in body["vertex_map"]}
        em = {row["edge"]: (row["target"], _plmap_from_json(row["map"]))
              for row in body["edge_maps"]}
        return Homeo(dendrite, vm, em)
    raise ConfigInvalid(f"malformed homeomorphism document: {doc!r}")


def measure_to_json(mu: PLMeasure) -> dict:
    return {
        "atoms": [{"point": point_to_json(p), "w": frac_str(w)} for p, w in mu.atoms],
        "edges": [{"id": eid,
                   "pieces": [{"a": frac_str(a), "b": frac_str(b),
                               "density": frac_str(r)} for a, b, r in pieces]}
                  for eid, pieces in mu.densities.items()],
        "norm": frac_str(mu.norm),
    }


def measure_from_json(doc: dict, dendrite: Dendrite) -> PLMeasure:
    atoms = [(point_from_json(row["point"], dendrite), frac(row["w"]))
             for row in doc.get("atoms", ())]
    densities = {row["id"]: [(frac(p["a"]), frac(p["b"]), frac(p["density"]))
                             for p in row["pieces"]]
                 for row in doc.get("edges", ())}
    return PLMeasure(dendrite, atoms, densities, norm=frac(doc.get("norm", 1)))


def certificate_to_json(cert) -> dict:
    doc = {
        "levels": [{"n": lvl.index, "mesh": frac_str(lvl.mesh),
                    "equivariant": lvl.equivariant, "strict": lvl.strict,
                    "cells": lvl.cell_count}
                   for lvl in cert.levels],
        "delta_table": [[frac_str(eps), frac_str(delta)]
                        for eps, delta in cert.delta_table],
        "verdict": cert.verdict,
        "explanation": cert.explanation,
    }
    if cert.witness is not None:
        sym, sign, anchor = cert.witness
        doc["witness"] = {"generator": sym, "sign": sign,
                          "anchor": point_to_json(anchor)}
    return doc


def dump_json(doc, path):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
