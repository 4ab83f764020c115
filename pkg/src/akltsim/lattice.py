"""Honeycomb lattice on a torus with explicit winding bookkeeping.

Sites live on an ``n_u x n_v`` grid of two-site unit cells with periodic
boundaries, so there are ``N = 2 n_u n_v`` sites.  Cell ``(u, v)`` holds an A
site and a B site and the linear index is ``2 * (v * n_u + u) + sublattice``
with A = 0, B = 1.

The three bonds leaving an A site connect to the B sites of cells
``(u, v)``, ``(u+1, v)`` and ``(u, v+1)``; every bond therefore carries a
canonical cell displacement ``(du, dv)`` in ``{(0,0), (1,0), (0,1)}`` from the
A cell to the B cell *before* periodic wrapping.  Those displacements are what
the union-find machinery downstream uses to detect domains that wind around
the torus, so they are stored with every bond rather than recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["HoneycombLattice", "build", "BOND_DISPLACEMENTS"]

# cell displacement of the B endpoint for the three bond types of an A site
BOND_DISPLACEMENTS = ((0, 0), (1, 0), (0, 1))

# embedding used only for drawing: bond length 1, Bravais vectors length sqrt(3)
_A1 = np.array([np.sqrt(3.0) / 2.0, 1.5])
_A2 = np.array([-np.sqrt(3.0) / 2.0, 1.5])
_DELTA_AB = np.array([0.0, -1.0])


@dataclass(frozen=True, eq=False)
class HoneycombLattice:
    """Immutable torus honeycomb with precomputed adjacency tables."""

    n_u: int
    n_v: int
    n_sites: int
    # neighbors[i, k] is the k-th neighbour of site i; slot k is the bond type,
    # so A(c) slot k touches B(c + BOND_DISPLACEMENTS[k]) and vice versa.
    neighbors: np.ndarray = field(repr=False)
    # bonds[j] = (a_site, b_site, du, dv) with the canonical A-to-B displacement
    bonds: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)

    @property
    def n_bonds(self) -> int:
        return self.bonds.shape[0]

    def site_index(self, u: int, v: int, sublattice: int) -> int:
        if sublattice not in (0, 1):
            raise ValueError(f"sublattice must be 0 (A) or 1 (B), got {sublattice}")
        return 2 * ((v % self.n_v) * self.n_u + (u % self.n_u)) + sublattice

    def site_cell(self, site: int) -> tuple[int, int, int]:
        """Inverse of :meth:`site_index`: return ``(u, v, sublattice)``."""
        cell, subl = divmod(int(site), 2)
        v, u = divmod(cell, self.n_u)
        return u, v, subl

    def faces(self) -> np.ndarray:
        """All hexagonal plaquettes as ``(n_u * n_v, 6)`` site indices in cyclic order.

        The face attached to cell ``(u, v)`` is the closed walk
        A(u,v), B(u,v), A(u,v-1), B(u+1,v-1), A(u+1,v-1), B(u+1,v); its
        signed displacement sum vanishes, which the tests use as a
        consistency check on the bond table.
        """
        out = np.empty((self.n_u * self.n_v, 6), dtype=np.int64)
        k = 0
        for v in range(self.n_v):
            for u in range(self.n_u):
                out[k] = (
                    self.site_index(u, v, 0),
                    self.site_index(u, v, 1),
                    self.site_index(u, v - 1, 0),
                    self.site_index(u + 1, v - 1, 1),
                    self.site_index(u + 1, v - 1, 0),
                    self.site_index(u + 1, v, 1),
                )
                k += 1
        return out

    def translations(self) -> np.ndarray:
        """The two torus translation vectors of the embedding, shape (2, 2)."""
        return np.array([self.n_u * _A1, self.n_v * _A2])

    def as_dict(self) -> dict:
        """JSON-serialisable description (used by the CLI export and renderer)."""
        return {
            "n_u": self.n_u,
            "n_v": self.n_v,
            "n_sites": self.n_sites,
            "bonds": self.bonds.tolist(),
            "positions": self.positions.tolist(),
        }


def build(n_u: int, n_v: int) -> HoneycombLattice:
    """Construct the periodic honeycomb with ``2 * n_u * n_v`` sites."""
    if n_u < 1 or n_v < 1:
        raise ValueError(f"cell counts must be >= 1, got ({n_u}, {n_v})")
    n_sites = 2 * n_u * n_v
    neighbors = np.empty((n_sites, 3), dtype=np.int64)
    bonds = np.empty((3 * n_u * n_v, 4), dtype=np.int64)
    positions = np.empty((n_sites, 2), dtype=np.float64)

    def idx(u: int, v: int, subl: int) -> int:
        return 2 * ((v % n_v) * n_u + (u % n_u)) + subl

    j = 0
    for v in range(n_v):
        for u in range(n_u):
            a = idx(u, v, 0)
            positions[a] = u * _A1 + v * _A2
            positions[a + 1] = positions[a] + _DELTA_AB
            for k, (du, dv) in enumerate(BOND_DISPLACEMENTS):
                b = idx(u + du, v + dv, 1)
                neighbors[a, k] = b
                neighbors[b, k] = a
                bonds[j] = (a, b, du, dv)
                j += 1
    return HoneycombLattice(
        n_u=n_u,
        n_v=n_v,
        n_sites=n_sites,
        neighbors=neighbors,
        bonds=bonds,
        positions=positions,
    )
