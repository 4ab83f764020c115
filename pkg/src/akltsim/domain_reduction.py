"""Reduction of a filter configuration to its stochastic graph.

Domains (maximal connected clusters of equal-label sites) become vertices.
Two domains are joined by a graph edge exactly when an odd number of lattice
bonds runs between them; pairs coupled by an even number of bonds cancel and
contribute no edge.  The reduced object is what the entanglement diagnostics
downstream care about, so alongside the parity edges it keeps:

* per-vertex torus wrap flags inherited from the site-level union-find, and
* one offset relation per lattice bond of every odd pair (``relations`` /
  ``relation_deltas``), which lets :func:`akltsim.analysis.graph_crossing`
  reconstruct how a graph component sits in the torus without the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config_model import FilterConfiguration, LABEL_CHARS, _bond_columns
from .lattice import HoneycombLattice

__all__ = ["StochasticGraph", "reduce_configuration", "domain_sizes"]


@dataclass
class StochasticGraph:
    """Vertices are label domains; edges are odd-multiplicity domain adjacencies."""

    lattice: HoneycombLattice
    n_vertices: int
    vertex_labels: np.ndarray = field(repr=False)
    vertex_sizes: np.ndarray = field(repr=False)
    # (V, 2) bool: does the domain wind around the u / v torus direction
    vertex_wraps: np.ndarray = field(repr=False)
    members: list = field(repr=False)
    # (M, 2) canonical parity edges with endpoints p < q
    edges: np.ndarray = field(repr=False)
    # every lattice bond of an odd domain pair, as (p, q) plus its cell
    # displacement from p's root frame to q's; parallel entries with unequal
    # displacements witness a loop that winds around the torus
    relations: np.ndarray = field(repr=False)
    relation_deltas: np.ndarray = field(repr=False)

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def as_dict(self) -> dict:
        """JSON-serialisable payload consumed by the SVG renderer and exports."""
        return {
            "n_u": self.lattice.n_u,
            "n_v": self.lattice.n_v,
            "n_vertices": int(self.n_vertices),
            "vertices": [
                {
                    "id": int(i),
                    "label": LABEL_CHARS[self.vertex_labels[i]],
                    "size": int(self.vertex_sizes[i]),
                    "wraps": [bool(self.vertex_wraps[i, 0]), bool(self.vertex_wraps[i, 1])],
                    "members": [int(s) for s in self.members[i]],
                }
                for i in range(self.n_vertices)
            ],
            "edges": self.edges.tolist(),
            "relations": self.relations.tolist(),
            "relation_deltas": self.relation_deltas.tolist(),
        }


def reduce_configuration(config: FilterConfiguration) -> StochasticGraph:
    """Collapse a configuration into its stochastic graph."""
    lat = config.lattice
    labels = config.labels
    n = lat.n_sites
    ba, bb, bdu, bdv = _bond_columns(lat)
    parent, offu, offv, size, wrapu, wrapv = _kernels._domain_summary(
        labels, ba, bb, bdu, bdv
    )
    roots = np.flatnonzero(parent == np.arange(n))
    n_vertices = roots.size
    vertex_id = np.full(n, -1, dtype=np.int64)
    vertex_id[roots] = np.arange(n_vertices)
    site_vertex = vertex_id[parent]

    order = np.argsort(site_vertex, kind="stable")
    counts = np.bincount(site_vertex, minlength=n_vertices)
    members = np.split(order, np.cumsum(counts)[:-1])

    inter = labels[ba] != labels[bb]
    p = site_vertex[ba[inter]]
    q = site_vertex[bb[inter]]
    du = offu[ba[inter]] + bdu[inter] - offu[bb[inter]]
    dv = offv[ba[inter]] + bdv[inter] - offv[bb[inter]]
    swap = p > q
    p2 = np.where(swap, q, p)
    q2 = np.where(swap, p, q)
    du = np.where(swap, -du, du)
    dv = np.where(swap, -dv, dv)
    code = p2 * np.int64(n_vertices) + q2
    uniq, inverse, mult = np.unique(code, return_inverse=True, return_counts=True)
    odd = mult % 2 == 1
    edge_p, edge_q = np.divmod(uniq[odd], np.int64(n_vertices))
    keep = odd[inverse]
    return StochasticGraph(
        lattice=lat,
        n_vertices=int(n_vertices),
        vertex_labels=labels[roots].copy(),
        vertex_sizes=size[roots].copy(),
        vertex_wraps=np.stack([wrapu[roots], wrapv[roots]], axis=1),
        members=members,
        edges=np.stack([edge_p, edge_q], axis=1),
        relations=np.stack([p2[keep], q2[keep]], axis=1),
        relation_deltas=np.stack([du[keep], dv[keep]], axis=1),
    )


def domain_sizes(graph: StochasticGraph) -> np.ndarray:
    """Domain sizes in vertex order (a copy, safe to sort in place)."""
    return graph.vertex_sizes.copy()
