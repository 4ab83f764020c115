"""Filter-outcome statistics of deformed AKLT states on the honeycomb torus.

Single-site filters applied to a deformed AKLT ground state produce random
outcome patterns whose distribution depends only on coarse counting
statistics of the pattern.  This package samples that distribution exactly
with a Metropolis chain, reduces each pattern to a stochastic graph of
correlated domains, and locates the deformation where macroscopic domains
and lattice-crossing graphs appear.

Layout:

- :mod:`akltsim.spin_algebra` -- spin-3/2 operators, deformation and filters
- :mod:`akltsim.lattice` -- periodic honeycomb lattice bookkeeping
- :mod:`akltsim.config_model` -- outcome configurations and their weights
- :mod:`akltsim.domain_reduction` -- configurations to stochastic graphs
- :mod:`akltsim.sampler` -- Metropolis sampling of the outcome distribution
- :mod:`akltsim.analysis` -- scaling and percolation studies, critical point
- :mod:`akltsim.exact_oracle` -- brute-force enumeration and exact states
- :mod:`akltsim.figures` -- deterministic SVG rendering
- :mod:`akltsim.cli_io` -- command-line interface and file formats
"""

__version__ = "0.1.0"

from .analysis import (
    CriticalPointError,
    DomainScalingCurve,
    PercolationStudy,
    domain_scaling_study,
    estimate_critical_point,
    graph_crossing,
    percolation_study,
    spanning_domain,
)
from .config_model import (
    ConfigStatistics,
    FilterConfiguration,
    compute_statistics,
    log2_weight,
    potts_parameters,
)
from .domain_reduction import StochasticGraph, reduce_configuration
from .exact_oracle import (
    build_peps_state,
    enumerate_distribution,
    ghz_state,
    quantum_distribution,
    total_variation_distance,
)
from .lattice import HoneycombLattice, build
from .sampler import RunResult, SampleRecord, SamplerSettings, run
from .spin_algebra import completeness_residual, filter_deformed, subunit_operators

__all__ = [
    "__version__",
    "CriticalPointError",
    "DomainScalingCurve",
    "PercolationStudy",
    "domain_scaling_study",
    "estimate_critical_point",
    "graph_crossing",
    "percolation_study",
    "spanning_domain",
    "ConfigStatistics",
    "FilterConfiguration",
    "compute_statistics",
    "log2_weight",
    "potts_parameters",
    "StochasticGraph",
    "reduce_configuration",
    "build_peps_state",
    "enumerate_distribution",
    "ghz_state",
    "quantum_distribution",
    "total_variation_distance",
    "HoneycombLattice",
    "build",
    "RunResult",
    "SampleRecord",
    "SamplerSettings",
    "run",
    "completeness_residual",
    "filter_deformed",
    "subunit_operators",
]
