"""JSON and Graphviz DOT output for reports, trees, certificates and torsion data."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .certify import DescentCertificate
from .elliptic import ECPoint, TorsionGroup
from .orbits import BackwardTree, PeriodicReport
from .projective import ProjPoint

SCHEMAS = ("periodic-report.v1", "backward-tree.v1", "certificate.v1", "torsion.v1")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}")
    text = resources.files("orbita").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _pt(P: ProjPoint) -> list[int]:
    return list(P.coords)


def certificate_json(cert: DescentCertificate) -> dict:
    return cert.to_json()


def periodic_report_json(report: PeriodicReport, name: str | None = None) -> dict:
    pts = sorted(report.periodic_points(), key=ProjPoint.sort_key)
    return {
        "schema": "periodic-report.v1",
        "map": name,
        "dimension": report.dimension,
        "degree": report.degree,
        "bound": report.bound,
        "certified": report.certified,
        "certificate": report.certificate.to_json() if report.certificate else None,
        "cycles": [[_pt(P) for P in c] for c in report.cycles],
        "periods": report.periods,
        "periodic_points": [_pt(P) for P in pts],
        "counts": {
            "candidates": report.candidates,
            "on_cycle": report.on_cycle,
            "preperiodic": report.preperiodic,
            "escaping": report.escaping,
        },
    }


def backward_tree_json(tree: BackwardTree, name: str | None = None) -> dict:
    return {
        "schema": "backward-tree.v1",
        "map": name,
        "root": _pt(tree.root),
        "depth": tree.depth,
        "nodes": [
            {"id": i, "point": _pt(n.point), "depth": n.depth, "parent": n.parent}
            for i, n in enumerate(tree.nodes)
        ],
    }


def ecpoint_json(P: ECPoint):
    if P.is_identity:
        return "O"
    return {"x": str(P.x), "y": str(P.y)}


def torsion_json(T: TorsionGroup) -> dict:
    E = T.curve
    return {
        "schema": "torsion.v1",
        "curve": {"a": E.a, "b": E.b, "discriminant": E.discriminant},
        "structure": T.structure,
        "order": len(T),
        "points": [{"point": ecpoint_json(P), "order": T.orders[P]} for P in T.points],
    }


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- DOT ------------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(name: str, nodes: list[ProjPoint], edges: list[tuple[ProjPoint, ProjPoint, bool]]) -> str:
    ids = {P: f"n{i}" for i, P in enumerate(nodes)}
    lines = [f"digraph {_quote(name)} {{"]
    for P in nodes:
        lines.append(f"  {ids[P]} [label={_quote(str(P))}];")
    for src, dst, on_cycle in edges:
        attr = " [cycle=true]" if on_cycle else ""
        lines.append(f"  {ids[src]} -> {ids[dst]}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def periodic_report_dot(report: PeriodicReport, name: str = "periodic") -> str:
    nodes = [P for c in report.cycles for P in c]
    edges = [(c[i], c[(i + 1) % len(c)], True) for c in report.cycles for i in range(len(c))]
    return _dot(name, nodes, edges)


def backward_tree_dot(tree: BackwardTree, periodic: set[ProjPoint] = frozenset(), name: str = "backward") -> str:
    """One node per distinct point; an edge P -> f(P) per application of f."""
    nodes = []
    seen = set()
    for n in tree.nodes:
        if n.point not in seen:
            seen.add(n.point)
            nodes.append(n.point)
    edges = []
    seen_edges = set()
    for child, parent in tree.edges():
        if (child, parent) in seen_edges:
            continue
        seen_edges.add((child, parent))
        edges.append((child, parent, child in periodic and parent in periodic))
    return _dot(name, nodes, edges)
