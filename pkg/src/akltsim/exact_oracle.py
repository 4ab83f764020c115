"""Exact references for small lattices: dense state vectors and enumeration.

Two independent routes to the outcome distribution keep the sampler honest:

* :func:`enumerate_distribution` evaluates the closed-form weight
  ``((a^2-1)/2)^{N_z} 2^{|V|-|E|}`` for every one of the ``3^N`` label
  configurations and normalises in log2 space;
* :func:`build_peps_state` contracts the tensor-network form of the deformed
  ground state into a dense ``4^N`` vector, and
  :func:`quantum_distribution` applies every combination of site filters to
  it, so the probabilities come straight from the Born rule with no reference
  to the combinatorial formula.

Site tensors carry a physical leg (dimension 4) and three virtual legs
(dimension 2, one per lattice bond slot); the virtual coefficient depends
only on the number of raised virtual indices, so the legs are
interchangeable.  With these tensors the bond state is the symmetric pair
``(|00> + |11>)/sqrt(2)``, i.e. virtual legs are simply contracted against
each other (the overall factor drops out at normalisation).

Conventions: amplitude index is base 4 with site 0 most significant (plain
C-order reshape); outcome/configuration index is base 3 with site 0 least
significant, shared with the sampler's histogram.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _kernels
from .config_model import _bond_columns, z_factor_log2
from .lattice import HoneycombLattice
from .spin_algebra import filter_deformed

__all__ = [
    "OutcomeDistribution",
    "PepsState",
    "enumerate_distribution",
    "build_peps_state",
    "ghz_state",
    "quantum_outcome_probability",
    "quantum_distribution",
    "total_variation_distance",
]

_MAX_ENUM_SITES = 14
_MAX_STATE_SITES = 10


@dataclass
class OutcomeDistribution:
    """Exact outcome probabilities for every base-3 configuration code."""

    lattice: HoneycombLattice
    a_squared: float
    log2_weights: np.ndarray = field(repr=False)
    probabilities: np.ndarray = field(repr=False)


@dataclass
class PepsState:
    """Dense ground-state vector at deformation ``a_squared``."""

    lattice: HoneycombLattice
    a_squared: float
    amplitudes: np.ndarray = field(repr=False)


def enumerate_distribution(lattice: HoneycombLattice, a_squared: float) -> OutcomeDistribution:
    """Exhaustive outcome distribution from the domain-counting weight."""
    n = lattice.n_sites
    if n > _MAX_ENUM_SITES:
        raise ValueError(
            f"enumeration over 3^{n} configurations refused (limit {_MAX_ENUM_SITES} sites)"
        )
    zfac = z_factor_log2(a_squared)
    ba, bb, _, _ = _bond_columns(lattice)
    n_z, v, e = _kernels._enumerate_stats(n, ba, bb)
    log2_w = v.astype(np.float64) - e
    if np.isfinite(zfac):
        log2_w += n_z * zfac
    else:
        log2_w[n_z > 0] = -np.inf
    top = np.max(log2_w[np.isfinite(log2_w)])
    p = np.exp2(log2_w - top)
    p /= p.sum()
    return OutcomeDistribution(lattice, float(a_squared), log2_w, p)


def _site_tensors(a_squared: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-sublattice tensors T[p, i, j, k]; coefficients depend on i+j+k only."""
    inv_a = 1.0 / np.sqrt(float(a_squared))
    t_a = np.zeros((4, 2, 2, 2))
    t_b = np.zeros((4, 2, 2, 2))
    a_coeff = (1.0, -inv_a, inv_a, -1.0)   # physical index = number of raised legs
    b_coeff = (1.0, inv_a, inv_a, 1.0)
    for i, j, k in product((0, 1), repeat=3):
        ones = i + j + k
        t_a[ones, i, j, k] = a_coeff[ones]
        t_b[3 - ones, i, j, k] = b_coeff[ones]
    return t_a, t_b


def build_peps_state(lattice: HoneycombLattice, a_squared: float) -> PepsState:
    """Contract the site tensors into a normalised dense vector."""
    n = lattice.n_sites
    if n > _MAX_STATE_SITES:
        raise ValueError(
            f"dense amplitudes for {n} sites refused (limit {_MAX_STATE_SITES})"
        )
    if not np.isfinite(a_squared) or a_squared <= 0.0:
        raise ValueError(f"a_squared must be positive and finite, got {a_squared!r}")
    t_a, t_b = _site_tensors(a_squared)
    legs = np.empty((n, 3), dtype=np.int64)
    for j, (a, b, _, _) in enumerate(lattice.bonds):
        legs[a, j % 3] = j
        legs[b, j % 3] = j
    operands = []
    for site in range(n):
        operands.append(t_a if site % 2 == 0 else t_b)
        operands.append([site] + [n + int(x) for x in legs[site]])
    raw = np.einsum(*operands, list(range(n)), optimize=True)
    amp = raw.reshape(-1).astype(np.complex128)
    amp /= np.linalg.norm(amp)
    return PepsState(lattice, float(a_squared), amp)


def ghz_state(lattice: HoneycombLattice) -> np.ndarray:
    """The ``a -> infinity`` limit: two staggered extremal-z patterns.

    The relative sign is ``(-1)**(N/2)``, one minus sign per A site from the
    all-raised branch of the A tensor.
    """
    n = lattice.n_sites
    if n > _MAX_STATE_SITES:
        raise ValueError(f"dense amplitudes for {n} sites refused (limit {_MAX_STATE_SITES})")
    code_up = 0
    code_down = 0
    for site in range(n):
        weight = 4 ** (n - 1 - site)
        code_up += (0 if site % 2 == 0 else 3) * weight
        code_down += (3 if site % 2 == 0 else 0) * weight
    psi = np.zeros(4 ** n, dtype=np.complex128)
    psi[code_up] = 1.0 / np.sqrt(2.0)
    psi[code_down] = (-1.0) ** (n // 2) / np.sqrt(2.0)
    return psi


def _filters(a_squared: float) -> list[np.ndarray]:
    return [filter_deformed(axis, a_squared) for axis in ("x", "y", "z")]


def quantum_outcome_probability(peps: PepsState, labels) -> float:
    """Born probability of one outcome: ``|| (F_b1 x ... x F_bN) |psi> ||^2``."""
    n = peps.lattice.n_sites
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ValueError(f"labels must have shape ({n},), got {labels.shape}")
    filters = _filters(peps.a_squared)
    vec = peps.amplitudes
    for site in range(n):
        t3 = vec.reshape(4 ** site, 4, -1)
        vec = np.einsum("ab,ibj->iaj", filters[labels[site]], t3).reshape(-1)
    return float(np.real(np.vdot(vec, vec)))


def quantum_distribution(peps: PepsState) -> np.ndarray:
    """Born probabilities for all 3^N outcomes, base-3 indexed like enumeration.

    Depth-first over sites, reusing the partially filtered vector of every
    prefix; sums to 1 up to roundoff by filter completeness, and no
    renormalisation is applied so tests can check exactly that.
    """
    n = peps.lattice.n_sites
    filters = _filters(peps.a_squared)
    out = np.zeros(3 ** n)

    def descend(vec: np.ndarray, site: int, code: int) -> None:
        if site == n:
            out[code] = float(np.real(np.vdot(vec, vec)))
            return
        t3 = vec.reshape(4 ** site, 4, -1)
        step = 3 ** site
        for lab in range(3):
            child = np.einsum("ab,ibj->iaj", filters[lab], t3).reshape(-1)
            descend(child, site + 1, code + lab * step)

    descend(peps.amplitudes, 0, 0)
    return out


def total_variation_distance(p, q) -> float:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())
