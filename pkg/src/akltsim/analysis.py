"""Statistics over sampled graphs: scaling fits, percolation curves, critical point.

The two study drivers run one Metropolis chain per (deformation, size) cell,
with chain seeds spawned deterministically from the base seed, and reduce the
kept samples to the summary the acceptance questions need: mean largest
domain for the scaling study, spanning/crossing frequencies for the
percolation study.  Cells are distributed over a thread pool sized by the
``AKLTSIM_WORKERS`` environment variable (default: the CPU count); the jitted
chains release the GIL, and per-cell seeding makes results independent of
scheduling order.

The critical point is located where the spanning curves of the smallest and
largest lattice cross: the difference ``d(a) = P_large - P_small`` is
negative below the transition and positive above, so the estimate is the
linearly interpolated zero of ``d`` after its deepest dip.  If the curves
coincide everywhere the crossing is undefined and the estimate falls back to
the first grid point with spanning probability >= 1/2.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import sampler
from .domain_reduction import StochasticGraph

__all__ = [
    "CriticalPointError",
    "InsufficientSamplesError",
    "FitResult",
    "DomainScalingCurve",
    "PercolationStudy",
    "CriticalPointEstimate",
    "spanning_domain",
    "graph_crossing",
    "wilson_interval",
    "integrated_autocorrelation_time",
    "domain_scaling_study",
    "percolation_study",
    "estimate_critical_point",
]


class CriticalPointError(RuntimeError):
    """No crossing of the spanning curves on the scanned grid."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InsufficientSamplesError(RuntimeError):
    """Too few samples per cell for the requested reduction."""


def spanning_domain(graph: StochasticGraph) -> bool:
    """Does any single domain wind around the torus?"""
    return bool(graph.vertex_wraps.any())


def graph_crossing(graph: StochasticGraph) -> bool:
    """Does any component of the parity graph wind around the torus?

    Walks the stored bond relations with an offset union-find, so two
    parallel edges that reach around the torus in different ways are detected
    as a winding loop; a wrapping member domain also makes its component
    cross, provided the component has at least one edge.
    """
    n = graph.n_vertices
    parent = list(range(n))
    offu = [0] * n
    offv = [0] * n
    windu = [False] * n
    windv = [False] * n
    has_edge = [False] * n

    def find(i: int) -> tuple[int, int, int]:
        root = i
        while parent[root] != root:
            root = parent[root]
        j, au, av = i, 0, 0
        while parent[j] != j:
            au += offu[j]
            av += offv[j]
            j = parent[j]
        j, cu, cv = i, au, av
        while parent[j] != j:
            su, sv, p = offu[j], offv[j], parent[j]
            parent[j], offu[j], offv[j] = root, cu, cv
            cu -= su
            cv -= sv
            j = p
        return root, au, av

    for (p, q), (du, dv) in zip(graph.relations, graph.relation_deltas):
        rp, au, av = find(int(p))
        rq, bu, bv = find(int(q))
        wu = au + int(du) - bu
        wv = av + int(dv) - bv
        if rp == rq:
            windu[rp] = windu[rp] or wu != 0
            windv[rp] = windv[rp] or wv != 0
            has_edge[rp] = True
        else:
            parent[rq] = rp
            offu[rq] = wu
            offv[rq] = wv
            windu[rp] = windu[rp] or windu[rq]
            windv[rp] = windv[rp] or windv[rq]
            has_edge[rp] = True
    for i in range(n):
        root, _, _ = find(i)
        if windu[root] or windv[root]:
            return True
        if has_edge[root] and bool(graph.vertex_wraps[i].any()):
            return True
    return False


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the bound is exactly 0 (or 1) at the boundary; avoid losing a ulp
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


def integrated_autocorrelation_time(series) -> float:
    """Geyer initial-positive-sequence estimate, in units of kept samples."""
    x = np.asarray(series, dtype=np.float64)
    n = x.size
    if n < 4:
        return 1.0
    x = x - x.mean()
    var = float(np.dot(x, x)) / n
    if var == 0.0:
        return 1.0
    acf = np.correlate(x, x, mode="full")[n - 1:] / (n * var)
    tau = 1.0
    t = 1
    while t + 1 < n:
        pair = acf[t] + acf[t + 1]
        if pair <= 0.0:
            break
        tau += 2.0 * pair
        t += 2
    return float(max(tau, 1.0))


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def _least_squares(x: np.ndarray, y: np.ndarray) -> FitResult:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return FitResult(float(slope), float(intercept), r2)


def _dims_for_sites(n_sites: int) -> tuple[int, int]:
    k = math.isqrt(max(n_sites, 1) // 2)
    if 2 * k * k != n_sites:
        raise ValueError(
            f"size {n_sites} is not 2*k^2; square tori are required for studies"
        )
    return k, k


def _worker_count() -> int:
    env = os.environ.get("AKLTSIM_WORKERS", "").strip()
    if env:
        count = int(env)
        if count < 1:
            raise ValueError(f"AKLTSIM_WORKERS must be >= 1, got {env!r}")
        return count
    return os.cpu_count() or 1


def _run_cells(cells: list) -> list:
    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        return list(pool.map(sampler.run, cells))


@dataclass
class DomainScalingCurve:
    """Mean largest-domain size against lattice size at one deformation."""

    a_squared: float
    sizes: np.ndarray
    mean_max_domain: np.ndarray
    std_error: np.ndarray
    tau: np.ndarray
    n_samples: int
    fit_log: FitResult
    fit_linear: FitResult


def domain_scaling_study(
    a_values, sizes, base: sampler.SamplerSettings
) -> list[DomainScalingCurve]:
    """Largest-domain scaling curves, one per deformation value."""
    a_values = [float(a) for a in a_values]
    sizes = [int(s) for s in sizes]
    if base.n_samples < 4:
        raise InsufficientSamplesError(
            f"scaling fits need at least 4 samples per cell, got {base.n_samples}"
        )
    dims = [_dims_for_sites(s) for s in sizes]
    seeds = sampler.spawn_seeds(base.seed, len(a_values) * len(sizes))
    cells = [
        replace(base, a_squared=a, n_u=u, n_v=v, seed=seeds[i * len(sizes) + j])
        for i, a in enumerate(a_values)
        for j, (u, v) in enumerate(dims)
    ]
    results = _run_cells(cells)
    curves = []
    for i, a in enumerate(a_values):
        means = np.empty(len(sizes))
        errs = np.empty(len(sizes))
        taus = np.empty(len(sizes))
        for j in range(len(sizes)):
            series = np.array(
                [r.max_domain for r in results[i * len(sizes) + j].records], dtype=np.float64
            )
            taus[j] = integrated_autocorrelation_time(series)
            means[j] = series.mean()
            # correlated-mean standard error: naive error inflated by sqrt(tau)
            errs[j] = series.std(ddof=1) * math.sqrt(taus[j] / series.size)
        xs = np.asarray(sizes, dtype=np.float64)
        curves.append(
            DomainScalingCurve(
                a_squared=a,
                sizes=np.asarray(sizes),
                mean_max_domain=means,
                std_error=errs,
                tau=taus,
                n_samples=base.n_samples,
                fit_log=_least_squares(np.log(xs), means),
                fit_linear=_least_squares(xs, means),
            )
        )
    return curves


@dataclass
class PercolationStudy:
    """Spanning and crossing frequencies over an (size, deformation) grid."""

    a_grid: np.ndarray
    sizes: np.ndarray
    spanning_probability: np.ndarray = field(repr=False)
    spanning_counts: np.ndarray = field(repr=False)
    crossing_frequency: np.ndarray = field(repr=False)
    ci_low: np.ndarray = field(repr=False)
    ci_high: np.ndarray = field(repr=False)
    n_samples: int = 0


def percolation_study(a_grid, sizes, base: sampler.SamplerSettings) -> PercolationStudy:
    """Spanning probability P(a^2) for each lattice size, with Wilson intervals."""
    a_grid = np.asarray([float(a) for a in a_grid])
    sizes = np.asarray([int(s) for s in sizes])
    if base.n_samples < 4:
        raise InsufficientSamplesError(
            f"percolation frequencies need at least 4 samples per cell, got {base.n_samples}"
        )
    dims = [_dims_for_sites(int(s)) for s in sizes]
    seeds = sampler.spawn_seeds(base.seed, sizes.size * a_grid.size)
    cells = [
        replace(base, a_squared=float(a), n_u=u, n_v=v, seed=seeds[i * a_grid.size + j])
        for i, (u, v) in enumerate(dims)
        for j, a in enumerate(a_grid)
    ]
    results = _run_cells(cells)
    shape = (sizes.size, a_grid.size)
    counts = np.zeros(shape, dtype=np.int64)
    crossing = np.zeros(shape)
    lo = np.zeros(shape)
    hi = np.zeros(shape)
    for i in range(sizes.size):
        for j in range(a_grid.size):
            records = results[i * a_grid.size + j].records
            counts[i, j] = sum(r.spanning for r in records)
            crossing[i, j] = sum(r.crossing for r in records) / len(records)
            lo[i, j], hi[i, j] = wilson_interval(int(counts[i, j]), len(records))
    return PercolationStudy(
        a_grid=a_grid,
        sizes=sizes,
        spanning_probability=counts / base.n_samples,
        spanning_counts=counts,
        crossing_frequency=crossing,
        ci_low=lo,
        ci_high=hi,
        n_samples=base.n_samples,
    )


@dataclass
class CriticalPointEstimate:
    a_squared_critical: float
    uncertainty: float
    slope_ratio: float
    size_pair: tuple
    diagnostics: dict = field(repr=False, default_factory=dict)


def _locate_crossing(grid: np.ndarray, p_small: np.ndarray, p_large: np.ndarray) -> float:
    d = p_large - p_small
    if float(np.max(np.abs(d))) < 1e-9:
        # degenerate: both sizes give the same curve, take its midpoint crossing
        above = np.flatnonzero(p_large >= 0.5)
        if above.size == 0:
            raise CriticalPointError(
                "curves coincide and never reach 1/2 on the grid",
                {"grid": grid.tolist(), "p": p_large.tolist()},
            )
        return float(grid[above[0]])
    start = int(np.argmin(d))
    for i in range(start, d.size - 1):
        if d[i] == 0.0:
            return float(grid[i])
        if d[i] < 0.0 <= d[i + 1]:
            frac = -d[i] / (d[i + 1] - d[i])
            return float(grid[i] + frac * (grid[i + 1] - grid[i]))
    if d[d.size - 1] == 0.0:
        return float(grid[-1])
    raise CriticalPointError(
        "spanning curves do not cross on the scanned grid",
        {"grid": grid.tolist(), "d": d.tolist(),
         "p_small": p_small.tolist(), "p_large": p_large.tolist()},
    )


def estimate_critical_point(
    study: PercolationStudy,
    n_bootstrap: int = 1000,
    bootstrap_seed: int = 0,
) -> CriticalPointEstimate:
    """Crossing point of the smallest-size and largest-size spanning curves.

    The uncertainty is the standard deviation of the estimate under binomial
    resampling of every cell count; resamples whose curves fail to cross are
    dropped (their number is reported in the diagnostics).
    """
    if study.sizes.size < 2:
        raise ValueError("critical point estimation needs at least two lattice sizes")
    if study.a_grid.size < 2:
        raise ValueError("critical point estimation needs at least two grid points")
    i_small = int(np.argmin(study.sizes))
    i_large = int(np.argmax(study.sizes))
    p_small = study.spanning_probability[i_small]
    p_large = study.spanning_probability[i_large]
    estimate = _locate_crossing(study.a_grid, p_small, p_large)

    j = int(np.argmin(np.abs(study.a_grid - estimate)))
    slope_small = np.gradient(p_small, study.a_grid)[j]
    slope_large = np.gradient(p_large, study.a_grid)[j]
    slope_ratio = float(abs(slope_large) / abs(slope_small)) if slope_small != 0 else float("inf")

    rng = np.random.default_rng(bootstrap_seed)
    n = study.n_samples
    hits = []
    for _ in range(n_bootstrap):
        ks = rng.binomial(n, np.clip(p_small, 0.0, 1.0)) / n
        kl = rng.binomial(n, np.clip(p_large, 0.0, 1.0)) / n
        try:
            hits.append(_locate_crossing(study.a_grid, ks, kl))
        except CriticalPointError:
            continue
    uncertainty = float(np.std(hits)) if len(hits) >= 2 else float("nan")
    return CriticalPointEstimate(
        a_squared_critical=float(estimate),
        uncertainty=uncertainty,
        slope_ratio=slope_ratio,
        size_pair=(int(study.sizes[i_small]), int(study.sizes[i_large])),
        diagnostics={
            "bootstrap_ok": len(hits),
            "bootstrap_total": n_bootstrap,
            "grid": study.a_grid.tolist(),
            "p_small": p_small.tolist(),
            "p_large": p_large.tolist(),
        },
    )
