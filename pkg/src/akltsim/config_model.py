"""Filter-outcome configurations and their statistical weight.

A configuration assigns one measurement axis to every site; axes are encoded
as small integers ``X = 0``, ``Y = 1``, ``Z = 2``.  The outcome probability
factorises over three summary statistics,

    p(sigma, a)  propto  ((a^2 - 1) / 2)^{N_z} * 2^{|V| - |E|},

where ``N_z`` counts z-labelled sites, ``|V|`` is the number of domains
(connected clusters of equal-label sites) and ``|E|`` counts the lattice
bonds whose endpoints carry different labels, with multiplicity.  All weight
arithmetic happens in log2 space; at ``a^2 = 1`` configurations containing a
z site have weight zero and get ``-inf``.

The same measure reads as a three-state Potts model with inverse temperature
``ln 2`` and a field ``log2(a^2 - 1) - 1`` on the z state, which is what
:func:`potts_parameters` reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattice import HoneycombLattice

__all__ = [
    "X_LABEL",
    "Y_LABEL",
    "Z_LABEL",
    "LABEL_CHARS",
    "FilterConfiguration",
    "ConfigStatistics",
    "PottsParameters",
    "compute_statistics",
    "log2_weight",
    "flip_log2_weight_delta",
    "potts_parameters",
    "z_factor_log2",
]

X_LABEL, Y_LABEL, Z_LABEL = 0, 1, 2
LABEL_CHARS = "XYZ"
_CHAR_TO_LABEL = {c: i for i, c in enumerate(LABEL_CHARS)}


@dataclass
class FilterConfiguration:
    """Axis labels for every site of a lattice, stored as int8."""

    lattice: HoneycombLattice
    labels: np.ndarray

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int8)
        if self.labels.shape != (self.lattice.n_sites,):
            raise ValueError(
                f"labels must have shape ({self.lattice.n_sites},), got {self.labels.shape}"
            )
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() > 2):
            raise ValueError("labels must take values in {0, 1, 2}")

    def to_text(self) -> str:
        """One character per site in index order, e.g. ``\"XXYZ\"``."""
        return "".join(LABEL_CHARS[v] for v in self.labels)

    @classmethod
    def from_text(cls, lattice: HoneycombLattice, text: str) -> "FilterConfiguration":
        if len(text) != lattice.n_sites:
            raise ValueError(
                f"expected {lattice.n_sites} label characters, got {len(text)}"
            )
        try:
            labels = np.array([_CHAR_TO_LABEL[c] for c in text.upper()], dtype=np.int8)
        except KeyError as exc:
            raise ValueError(f"invalid label character {exc.args[0]!r}") from None
        return cls(lattice, labels)


@dataclass(frozen=True)
class ConfigStatistics:
    """The three numbers the outcome weight depends on."""

    n_z: int
    n_domains: int
    n_interdomain_bonds: int


@dataclass(frozen=True)
class PottsParameters:
    """Couplings of the equivalent three-state Potts measure.

    The weight is ``exp(beta * (|V| - |E| + field * N_z))`` with
    ``beta = ln 2``; the field shifts the z state and diverges logarithmically
    toward ``a^2 = 1``.
    """

    beta: float
    field: float


def _bond_columns(lattice: HoneycombLattice):
    b = lattice.bonds
    return (
        np.ascontiguousarray(b[:, 0]),
        np.ascontiguousarray(b[:, 1]),
        np.ascontiguousarray(b[:, 2]),
        np.ascontiguousarray(b[:, 3]),
    )


def compute_statistics(config: FilterConfiguration) -> ConfigStatistics:
    """Recount (N_z, |V|, |E|) from scratch."""
    ba, bb, bdu, bdv = _bond_columns(config.lattice)
    n_z, n_dom, n_inter, _, _, _ = _kernels._graph_summary(config.labels, ba, bb, bdu, bdv)
    return ConfigStatistics(int(n_z), int(n_dom), int(n_inter))


def z_factor_log2(a_squared: float) -> float:
    """``log2((a^2 - 1) / 2)``, the per-z-site weight exponent; -inf at ``a^2 = 1``."""
    a2 = float(a_squared)
    if not np.isfinite(a2) or a2 < 1.0:
        raise ValueError(
            f"the outcome measure is defined for a_squared >= 1, got {a_squared!r}"
        )
    if a2 == 1.0:
        return -np.inf
    return float(np.log2((a2 - 1.0) / 2.0))


def log2_weight(stats: ConfigStatistics, a_squared: float) -> float:
    """Unnormalised log2 outcome weight of a configuration with these statistics."""
    zfac = z_factor_log2(a_squared)
    base = float(stats.n_domains - stats.n_interdomain_bonds)
    if stats.n_z == 0:
        return base
    return base + stats.n_z * zfac


def flip_log2_weight_delta(
    config: FilterConfiguration, site: int, new_label: int, a_squared: float,
    buffers: _kernels.WorkBuffers | None = None,
) -> float:
    """log2 weight change if ``site`` switched to ``new_label``; the config is not modified.

    This is the quantity the Metropolis acceptance uses; it is computed
    incrementally from the local neighbourhood instead of a global recount.
    """
    if not 0 <= site < config.lattice.n_sites:
        raise ValueError(f"site {site} out of range")
    if new_label not in (X_LABEL, Y_LABEL, Z_LABEL):
        raise ValueError(f"new_label must be 0, 1 or 2, got {new_label!r}")
    zfac = z_factor_log2(a_squared)
    if buffers is None:
        buffers = _kernels.WorkBuffers.for_sites(config.lattice.n_sites)
    d_nz, d_v, d_e = _kernels._flip_delta(
        config.labels, config.lattice.neighbors, site, new_label,
        buffers.vstamp, buffers.vtree, buffers.queue,
        buffers.head, buffers.tail, buffers.stamp,
    )
    delta = float(d_v - d_e)
    if d_nz != 0:
        delta += d_nz * zfac
    return delta


def potts_parameters(a_squared: float) -> PottsParameters:
    """Potts couplings (beta, field) equivalent to the outcome measure.

    At ``a_squared == 1`` the field is ``-inf``: outcomes with any Z label
    carry zero weight, matching :func:`z_factor_log2`.
    """
    a2 = float(a_squared)
    if not np.isfinite(a2) or a2 < 1.0:
        raise ValueError(
            f"the Potts mapping needs a_squared >= 1, got {a_squared!r}"
        )
    field = float(np.log2(a2 - 1.0) - 1.0) if a2 > 1.0 else -np.inf
    return PottsParameters(beta=float(np.log(2.0)), field=field)
