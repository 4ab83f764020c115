"""Acceptance gate: ten headline checks, one verdict line each.

Each test prints `criterion NN [name]: PASS/FAIL (detail)`; run with
`pytest -v -s tests/test_acceptance.py` to see the lines as they complete.
Criteria 3 and 7 sample heavily and dominate the runtime; the whole gate
takes roughly 40 minutes on one core.
"""

import math

import numpy as np

from akltsim import analysis as an
from akltsim import cli_io
from akltsim import exact_oracle as eo
from akltsim import sampler
from akltsim import spin_algebra as sa
from akltsim.config_model import FilterConfiguration, compute_statistics, log2_weight
from akltsim.lattice import build


def _verdict(num, name, ok, detail):
    print(f"criterion {num:2d} [{name}]: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


def test_criterion_01_povm_completeness():
    worst = max(
        sa.completeness_residual(a2) for a2 in (1.0, 1.5, 2.0, 3.0, 5.0, 6.46, 10.0)
    )
    assert _verdict(1, "povm-completeness", worst < 1e-12,
                    f"max residual {worst:.2e}")


def test_criterion_02_projective_point():
    rows = sa.projective_basis_a1()
    residuals = [np.linalg.norm(rows @ rows.conj().T - np.eye(4))]
    fx = sa.filter_deformed("x", 1.0)
    fy = sa.filter_deformed("y", 1.0)
    for f in (fx, fy):
        residuals.append(np.linalg.norm(f - f.conj().T))
        residuals.append(np.linalg.norm(f @ f - f))
    residuals.append(np.linalg.norm(fx @ fy))
    worst = max(residuals)
    z_zero = bool(np.all(sa.filter_deformed("z", 1.0) == 0))
    assert _verdict(2, "projective-point", worst < 1e-12 and z_zero,
                    f"max residual {worst:.2e}, z filter zero: {z_zero}")


def test_criterion_03_oracle_triangle():
    dims = {2: (1, 1), 4: (2, 1), 6: (3, 1), 8: (2, 2)}
    worst_rel = 0.0
    worst_tv = 0.0
    for n, (nu, nv) in dims.items():
        lat = build(nu, nv)
        for k, a2 in enumerate((1.0, 2.0, 3.0, 5.0, 6.46)):
            exact = eo.enumerate_distribution(lat, a2).probabilities
            quantum = eo.quantum_distribution(eo.build_peps_state(lat, a2))
            support = (exact > 1e-30) | (quantum > 1e-30)
            rel = np.abs(exact - quantum)[support] / np.maximum(exact, quantum)[support]
            worst_rel = max(worst_rel, float(rel.max()))
            # sample enough that the expected finite-sample total variation,
            # sum(sqrt(p))/sqrt(2 pi M), sits at 0.008, under the 0.01 bar
            s = float(np.sqrt(exact).sum())
            m = max(10 ** 6, math.ceil((s / 0.008) ** 2 / (2 * math.pi)))
            settings = sampler.SamplerSettings(
                a_squared=a2, n_u=nu, n_v=nv, n_samples=m,
                seed=777000 + 100 * n + k, burn_in_sweeps=200, thin_sweeps=2)
            hist = sampler.sample_histogram(settings)
            tv = eo.total_variation_distance(hist / hist.sum(), exact)
            worst_tv = max(worst_tv, tv)
    ok = worst_rel < 1e-9 and worst_tv < 0.01
    assert _verdict(3, "oracle-triangle", ok,
                    f"max relative {worst_rel:.2e}, max TV {worst_tv:.4f}")


def test_criterion_04_aklt_point_weight():
    lat = build(10, 10)
    rng = np.random.default_rng(20260822)
    exact = True
    for _ in range(10 ** 4):
        labels = rng.integers(0, 3, size=lat.n_sites).astype(np.int8)
        stats = compute_statistics(FilterConfiguration(lat, labels))
        expected = float(stats.n_domains - stats.n_interdomain_bonds)
        if log2_weight(stats, 3.0) != expected:
            exact = False
            break
    assert _verdict(4, "aklt-point-weight", exact,
                    "10^4 configurations, log2 weight == |V| - |E| exactly")


def test_criterion_05_crossing_probability():
    failures = {}
    for a2 in (1.0, 3.0, 5.7):
        settings = sampler.SamplerSettings(
            a_squared=a2, n_u=20, n_v=20, n_samples=200,
            seed=int(a2 * 1000) + 5, burn_in_sweeps=300, thin_sweeps=3)
        records = sampler.run(settings).records
        failures[a2] = sum(1 for r in records if not r.crossing)
    ok = all(f == 0 for f in failures.values())
    assert _verdict(5, "crossing-probability", ok,
                    f"failures out of 200 per value: {failures}")


def test_criterion_06_domain_size_scaling():
    base = sampler.SamplerSettings(
        a_squared=3.0, n_u=1, n_v=1, n_samples=300,
        seed=20260822, burn_in_sweeps=400, thin_sweeps=5)
    curves = an.domain_scaling_study([3.0, 6.46], [200, 800, 3200, 7200], base)
    at3 = {c.a_squared: c for c in curves}[3.0]
    at_crit = {c.a_squared: c for c in curves}[6.46]
    log_wins = at3.fit_log.r_squared > at3.fit_linear.r_squared
    linear_competitive = at_crit.fit_linear.r_squared >= at_crit.fit_log.r_squared - 0.05
    ok = log_wins and linear_competitive
    assert _verdict(
        6, "domain-size-scaling", ok,
        f"a2=3: r2 log {at3.fit_log.r_squared:.4f} vs linear "
        f"{at3.fit_linear.r_squared:.4f}; a2=6.46: linear "
        f"{at_crit.fit_linear.r_squared:.4f} vs log {at_crit.fit_log.r_squared:.4f}")


def test_criterion_07_critical_point():
    grid = np.round(np.arange(5.8, 7.2001, 0.1), 10)
    base = sampler.SamplerSettings(
        a_squared=6.0, n_u=1, n_v=1, n_samples=520,
        seed=31415926, burn_in_sweeps=500, thin_sweeps=8)
    study = an.percolation_study(grid, [800, 3200], base)
    estimate = an.estimate_critical_point(study)
    in_window = 6.1 <= estimate.a_squared_critical <= 6.8
    steeper = estimate.slope_ratio > 1.0
    ok = in_window and steeper
    assert _verdict(
        7, "critical-point", ok,
        f"a2_c = {estimate.a_squared_critical:.3f} +/- {estimate.uncertainty:.3f}, "
        f"slope ratio {estimate.slope_ratio:.2f}")


def test_criterion_08_supercritical_step():
    probs = {}
    for a2, seed in ((5.0, 85), (8.0, 88)):
        settings = sampler.SamplerSettings(
            a_squared=a2, n_u=20, n_v=20, n_samples=500,
            seed=seed, burn_in_sweeps=300, thin_sweeps=3)
        records = sampler.run(settings).records
        probs[a2] = sum(1 for r in records if r.spanning) / len(records)
    ok = probs[5.0] < 0.05 and probs[8.0] > 0.95
    assert _verdict(8, "supercritical-step", ok,
                    f"spanning probability {probs[5.0]:.3f} at a2=5, "
                    f"{probs[8.0]:.3f} at a2=8")


def test_criterion_09_ghz_limit():
    lat = build(3, 1)
    peps = eo.build_peps_state(lat, 1e4)
    fidelity = abs(np.vdot(eo.ghz_state(lat), peps.amplitudes)) ** 2
    all_z = 0
    for seed in range(100):
        settings = sampler.SamplerSettings(
            a_squared=1e6, n_u=4, n_v=4, n_samples=1,
            seed=seed, burn_in_sweeps=50, thin_sweeps=1)
        final = sampler.run(settings).final_config
        all_z += int(np.all(final.labels == 2))
    ok = fidelity > 0.999 and all_z >= 95
    assert _verdict(9, "ghz-limit", ok,
                    f"6-site fidelity {fidelity:.6f}, all-Z runs {all_z}/100")


def test_criterion_10_determinism(tmp_path):
    args = ["--a2", "6.46", "--cells", "6", "6", "--samples", "40",
            "--seed", "10", "--burn-in", "80", "--thin", "2"]
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    assert cli_io.cli_main(["sample", *args, "--out", str(first)]) == 0
    assert cli_io.cli_main(["sample", *args, "--out", str(second)]) == 0
    sample_same = first.read_bytes() == second.read_bytes()

    study_args = ["analyze", "--mode", "percolation", "--a2-list", "5.0", "8.0",
                  "--sizes", "18", "32", "--samples", "20", "--burn-in", "60",
                  "--thin", "2", "--seed", "4"]
    cli_io.cli_main([*study_args, "--out-dir", str(tmp_path / "p1")])
    cli_io.cli_main([*study_args, "--out-dir", str(tmp_path / "p2")])
    table_same = ((tmp_path / "p1" / "percolation.csv").read_bytes()
                  == (tmp_path / "p2" / "percolation.csv").read_bytes())
    ok = sample_same and table_same
    assert _verdict(10, "determinism", ok,
                    f"sample rerun identical: {sample_same}, "
                    f"analyze rerun identical: {table_same}")
