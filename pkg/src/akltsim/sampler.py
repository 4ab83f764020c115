"""Metropolis sampler for the filter-outcome distribution.

Single-site updates with a symmetric proposal (uniform site, uniform over the
two other labels) and acceptance ratio ``2**dlog2w``, where the log2 weight
change comes from the incremental domain bookkeeping in ``_kernels``.  The
chain starts from independent per-site draws with

    p_z = m / (1 + m),   m = |a^2 - 1| / 4,   p_x = p_y = (1 - p_z) / 2,

which matches the single-site outcome statistics and keeps the start close to
the bulk of the measure even deep in the deformed regimes.

Randomness comes from one ``numpy`` PCG64 generator per chain, seeded through
``SeedSequence``; the jitted kernels continue the same stream, so a run is a
pure function of its settings.  Sweeps are ``N`` proposed flips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config_model import (
    FilterConfiguration,
    ConfigStatistics,
    _bond_columns,
    log2_weight,
    z_factor_log2,
)
from .lattice import HoneycombLattice, build

__all__ = [
    "SamplerSettings",
    "SampleRecord",
    "RunResult",
    "ConsistencyError",
    "initial_configuration",
    "run",
    "sample_histogram",
    "spawn_seeds",
]


class ConsistencyError(RuntimeError):
    """Incremental statistics drifted from a full recount (paranoid mode)."""


@dataclass(frozen=True)
class SamplerSettings:
    """Everything that determines a sampling run, including its randomness."""

    a_squared: float
    n_u: int
    n_v: int
    n_samples: int
    seed: int
    burn_in_sweeps: int = 1000
    thin_sweeps: int = 10
    # recount statistics from scratch at every record and fail loudly on drift
    paranoid: bool = False

    def validate(self) -> None:
        z_factor_log2(self.a_squared)
        if self.n_u < 1 or self.n_v < 1:
            raise ValueError(f"cell counts must be >= 1, got ({self.n_u}, {self.n_v})")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.burn_in_sweeps < 0:
            raise ValueError(f"burn_in_sweeps must be >= 0, got {self.burn_in_sweeps}")
        if self.thin_sweeps < 1:
            raise ValueError(f"thin_sweeps must be >= 1, got {self.thin_sweeps}")


@dataclass(frozen=True)
class SampleRecord:
    """Summary of one kept sample; exactly the columns of the CSV export."""

    sweep: int
    n_z: int
    n_domains: int
    n_interdomain_bonds: int
    log2_weight: float
    max_domain: int
    spanning: bool
    crossing: bool


@dataclass
class RunResult:
    settings: SamplerSettings
    lattice: HoneycombLattice
    records: list = field(repr=False)
    final_config: FilterConfiguration = field(repr=False)
    acceptance_rate: float = 0.0


def initial_configuration(
    lattice: HoneycombLattice, a_squared: float, rng: np.random.Generator
) -> FilterConfiguration:
    """Independent per-site label draws biased toward z away from ``a^2 = 3``."""
    z_factor_log2(a_squared)
    m = abs(float(a_squared) - 1.0) / 4.0
    p_z = m / (1.0 + m)
    u = rng.random(lattice.n_sites)
    labels = np.where(u < p_z, 2, np.where(u < p_z + (1.0 - p_z) / 2.0, 0, 1))
    return FilterConfiguration(lattice, labels.astype(np.int8))


def spawn_seeds(master_seed: int, count: int) -> list[int]:
    """Derive ``count`` independent 64-bit chain seeds from one master seed."""
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def run(settings: SamplerSettings) -> RunResult:
    """Run one chain and return per-sample graph summaries."""
    settings.validate()
    lat = build(settings.n_u, settings.n_v)
    n = lat.n_sites
    rng = np.random.default_rng(np.random.SeedSequence(settings.seed))
    config = initial_configuration(lat, settings.a_squared, rng)
    labels = config.labels
    zfac = z_factor_log2(settings.a_squared)
    ba, bb, bdu, bdv = _bond_columns(lat)
    buf = _kernels.WorkBuffers.for_sites(n)

    n_z, n_dom, n_inter, _, _, _ = _kernels._graph_summary(labels, ba, bb, bdu, bdv)
    running = np.array([n_z, n_dom, n_inter], dtype=np.int64)

    def block(n_sweeps: int) -> int:
        acc, d_nz, d_v, d_e = _kernels._metropolis_block(
            labels, lat.neighbors, rng, zfac, n_sweeps * n,
            buf.vstamp, buf.vtree, buf.queue, buf.head, buf.tail, buf.stamp,
        )
        running[0] += d_nz
        running[1] += d_v
        running[2] += d_e
        return int(acc)

    accepted = block(settings.burn_in_sweeps)
    records = []
    for i in range(settings.n_samples):
        accepted += block(settings.thin_sweeps)
        n_z, n_dom, n_inter, mx, span, cross = _kernels._graph_summary(
            labels, ba, bb, bdu, bdv
        )
        if settings.paranoid and not (
            running[0] == n_z and running[1] == n_dom and running[2] == n_inter
        ):
            raise ConsistencyError(
                f"incremental statistics {tuple(int(x) for x in running)} != "
                f"recount {(int(n_z), int(n_dom), int(n_inter))} at sample {i}"
            )
        stats = ConfigStatistics(int(n_z), int(n_dom), int(n_inter))
        records.append(
            SampleRecord(
                sweep=settings.burn_in_sweeps + (i + 1) * settings.thin_sweeps,
                n_z=stats.n_z,
                n_domains=stats.n_domains,
                n_interdomain_bonds=stats.n_interdomain_bonds,
                log2_weight=log2_weight(stats, settings.a_squared),
                max_domain=int(mx),
                spanning=bool(span),
                crossing=bool(cross),
            )
        )
    total_steps = (settings.burn_in_sweeps + settings.n_samples * settings.thin_sweeps) * n
    return RunResult(
        settings=settings,
        lattice=lat,
        records=records,
        final_config=FilterConfiguration(lat, labels),
        acceptance_rate=accepted / total_steps if total_steps else 0.0,
    )


def sample_histogram(settings: SamplerSettings) -> np.ndarray:
    """Histogram of kept samples over all 3^N configurations (small lattices).

    Configurations are indexed base 3 with site 0 least significant, matching
    :func:`akltsim.exact_oracle.enumerate_distribution`.
    """
    settings.validate()
    lat = build(settings.n_u, settings.n_v)
    n = lat.n_sites
    if n > 12:
        raise ValueError(f"histogram sampling is limited to 12 sites, lattice has {n}")
    rng = np.random.default_rng(np.random.SeedSequence(settings.seed))
    config = initial_configuration(lat, settings.a_squared, rng)
    labels = config.labels
    zfac = z_factor_log2(settings.a_squared)
    buf = _kernels.WorkBuffers.for_sites(n)
    _kernels._metropolis_block(
        labels, lat.neighbors, rng, zfac, settings.burn_in_sweeps * n,
        buf.vstamp, buf.vtree, buf.queue, buf.head, buf.tail, buf.stamp,
    )
    hist = np.zeros(3 ** n, dtype=np.int64)
    _kernels._sample_histogram(
        labels, lat.neighbors, rng, zfac, settings.n_samples,
        settings.thin_sweeps * n, hist,
        buf.vstamp, buf.vtree, buf.queue, buf.head, buf.tail, buf.stamp,
    )
    return hist
