"""Command-line front end: sampling runs, studies, oracle checks, rendering.

Every data-producing subcommand writes a JSON manifest alongside its outputs
with the fully resolved parameters, the package version, an environment
fingerprint and a content hash per file.  Nothing in an output depends on
wall-clock time, so rerunning a subcommand with the same arguments
reproduces every byte.

Exit codes: 0 success, 2 usage errors, 3 I/O errors, 4 estimation failures
(e.g. spanning curves that do not cross); the matching category is printed to
stderr as ``error:<category>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import platform
import sys
from dataclasses import asdict
from pathlib import Path

import numba
import numpy as np

from . import __version__, analysis, exact_oracle, sampler, spin_algebra
from .config_model import FilterConfiguration
from .domain_reduction import reduce_configuration
from .figures import RenderStyle, plot_percolation, plot_scaling, render_graph
from .lattice import build

__all__ = ["CSV_COLUMNS", "write_records_csv", "build_manifest", "cli_main"]

CSV_COLUMNS = (
    "sweep", "n_z", "n_domains", "n_interdomain_bonds",
    "log2_weight", "max_domain", "spanning", "crossing",
)


def write_records_csv(path, records) -> None:
    """Sample records as CSV; floats via repr, booleans as 0/1."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.sweep, r.n_z, r.n_domains, r.n_interdomain_bonds,
                repr(float(r.log2_weight)), r.max_domain,
                int(r.spanning), int(r.crossing),
            ])


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def build_manifest(command: str, parameters: dict, outputs: list) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "package_version": __version__,
        "environment": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "numba": numba.__version__,
        },
        "outputs": [
            {
                "path": Path(p).name,
                "bytes": Path(p).stat().st_size,
                "sha256": _sha256(p),
            }
            for p in outputs
        ],
    }


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _load_config(path: str) -> dict:
    p = Path(path)
    if p.suffix == ".json":
        return json.loads(p.read_text())
    if p.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:
            try:
                import tomli as tomllib
            except ModuleNotFoundError:
                raise ValueError(
                    "TOML configs need Python >= 3.11 or the tomli package; "
                    "use a JSON config instead"
                ) from None
        return tomllib.loads(p.read_text())
    raise ValueError(f"config file must end in .json or .toml, got {p.name!r}")


def _resolve(ns, key: str, default):
    """Precedence: explicit flag > config file entry > built-in default."""
    value = getattr(ns, key, None)
    if value is not None:
        return value
    if getattr(ns, "_config", None) and key in ns._config:
        return ns._config[key]
    return default


def _settings_from_args(ns, a_squared: float, cells, n_samples: int) -> sampler.SamplerSettings:
    return sampler.SamplerSettings(
        a_squared=float(a_squared),
        n_u=int(cells[0]),
        n_v=int(cells[1]),
        n_samples=int(n_samples),
        seed=int(_resolve(ns, "seed", 1)),
        burn_in_sweeps=int(_resolve(ns, "burn_in", 1000)),
        thin_sweeps=int(_resolve(ns, "thin", 10)),
        paranoid=bool(getattr(ns, "paranoid", False)),
    )


def _require(ns, key: str, flag: str):
    value = _resolve(ns, key, None)
    if value is None:
        raise ValueError(f"{flag} is required (flag or config entry)")
    return value


# ---------------------------------------------------------------- subcommands

def _cmd_sample(ns) -> int:
    settings = _settings_from_args(
        ns,
        a_squared=_require(ns, "a2", "--a2"),
        cells=_resolve(ns, "cells", (20, 20)),
        n_samples=_resolve(ns, "samples", 100),
    )
    result = sampler.run(settings)
    out = Path(_resolve(ns, "out", "samples.csv"))
    write_records_csv(out, result.records)
    manifest = build_manifest(
        "sample",
        {**asdict(settings), "acceptance_rate": repr(result.acceptance_rate)},
        [out],
    )
    _write_json(out.with_name(out.name + ".manifest.json"), manifest)
    print(f"wrote {out} ({len(result.records)} samples, acceptance {result.acceptance_rate:.3f})")
    return 0


def _cmd_analyze(ns) -> int:
    a_values = [float(a) for a in _require(ns, "a2_list", "--a2-list")]
    sizes = [int(s) for s in _require(ns, "sizes", "--sizes")]
    base = _settings_from_args(
        ns, a_squared=max(a_values), cells=(1, 1),
        n_samples=_resolve(ns, "samples", 200),
    )
    out_dir = Path(_resolve(ns, "out_dir", "analysis"))
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []

    if ns.mode == "scaling":
        curves = analysis.domain_scaling_study(a_values, sizes, base)
        csv_path = out_dir / "scaling.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["a_squared", "n_sites", "mean_max_domain",
                             "std_error", "tau", "n_samples"])
            for c in curves:
                for j, n_sites in enumerate(c.sizes):
                    writer.writerow([
                        repr(c.a_squared), int(n_sites),
                        repr(float(c.mean_max_domain[j])),
                        repr(float(c.std_error[j])),
                        repr(float(c.tau[j])), c.n_samples,
                    ])
        outputs.append(csv_path)
        fits_path = out_dir / "scaling_fits.json"
        _write_json(fits_path, {
            repr(c.a_squared): {"log": asdict(c.fit_log), "linear": asdict(c.fit_linear)}
            for c in curves
        })
        outputs.append(fits_path)
        if ns.plot:
            svg_path = out_dir / "scaling.svg"
            svg_path.write_text(plot_scaling(curves))
            outputs.append(svg_path)
        for c in curves:
            print(f"a^2={c.a_squared:g}: r2(log)={c.fit_log.r_squared:.4f} "
                  f"r2(linear)={c.fit_linear.r_squared:.4f}")
    else:
        study = analysis.percolation_study(a_values, sizes, base)
        csv_path = out_dir / "percolation.csv"
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["a_squared", "n_sites", "spanning_probability",
                             "ci_low", "ci_high", "crossing_frequency", "n_samples"])
            for i, n_sites in enumerate(study.sizes):
                for j, a in enumerate(study.a_grid):
                    writer.writerow([
                        repr(float(a)), int(n_sites),
                        repr(float(study.spanning_probability[i, j])),
                        repr(float(study.ci_low[i, j])),
                        repr(float(study.ci_high[i, j])),
                        repr(float(study.crossing_frequency[i, j])),
                        study.n_samples,
                    ])
        outputs.append(csv_path)
        estimate = None
        if len(sizes) >= 2:
            try:
                est = analysis.estimate_critical_point(study)
            except analysis.CriticalPointError:
                manifest = build_manifest("analyze", _analyze_params(ns, a_values, sizes, base), outputs)
                _write_json(out_dir / "manifest.json", manifest)
                print(f"wrote partial results to {out_dir}", file=sys.stderr)
                raise
            estimate = est.a_squared_critical
            est_path = out_dir / "critical_point.json"
            _write_json(est_path, {
                "a_squared_critical": est.a_squared_critical,
                "uncertainty": est.uncertainty,
                "slope_ratio": est.slope_ratio,
                "size_pair": list(est.size_pair),
                "diagnostics": est.diagnostics,
            })
            outputs.append(est_path)
            print(f"critical point: a^2 = {est.a_squared_critical:.3f} "
                  f"+/- {est.uncertainty:.3f} (slope ratio {est.slope_ratio:.2f})")
        if ns.plot:
            svg_path = out_dir / "percolation.svg"
            svg_path.write_text(plot_percolation(study, estimate))
            outputs.append(svg_path)

    manifest = build_manifest("analyze", _analyze_params(ns, a_values, sizes, base), outputs)
    _write_json(out_dir / "manifest.json", manifest)
    print(f"wrote {len(outputs)} files to {out_dir}")
    return 0


def _analyze_params(ns, a_values, sizes, base) -> dict:
    return {
        "mode": ns.mode,
        "a_values": a_values,
        "sizes": sizes,
        "settings": asdict(base),
    }


def _cmd_oracle_compare(ns) -> int:
    cells = _resolve(ns, "cells", (1, 1))
    a2 = float(_require(ns, "a2", "--a2"))
    lattice = build(int(cells[0]), int(cells[1]))
    dist = exact_oracle.enumerate_distribution(lattice, a2)
    peps = exact_oracle.build_peps_state(lattice, a2)
    quantum = exact_oracle.quantum_distribution(peps)
    p, q = dist.probabilities, quantum
    support = (p > 1e-30) | (q > 1e-30)
    rel = float(np.max(np.abs(p - q)[support] / np.maximum(p, q)[support]))
    print(f"max_relative_discrepancy={rel:.3e}")
    payload = {"a_squared": a2, "n_sites": lattice.n_sites,
               "max_relative_discrepancy": rel}
    n_samples = int(_resolve(ns, "samples", 0))
    if n_samples > 0:
        settings = _settings_from_args(ns, a_squared=a2, cells=cells, n_samples=n_samples)
        hist = sampler.sample_histogram(settings)
        tv = exact_oracle.total_variation_distance(hist / hist.sum(), p)
        print(f"total_variation={tv:.5f}")
        payload["total_variation"] = tv
        payload["n_samples"] = n_samples
    if ns.json:
        _write_json(ns.json, payload)
    return 0


def _cmd_povm_check(ns) -> int:
    a2 = float(_require(ns, "a2", "--a2"))
    residual = spin_algebra.completeness_residual(a2)
    print(f"completeness_residual={residual:.3e}")
    if ns.json:
        if a2 >= 1.0:
            named = {axis: spin_algebra.filter_deformed(axis, a2) for axis in "xyz"}
        else:
            kx, ky, e = spin_algebra.subunit_operators(a2)
            named = {"x_rescaled": kx, "y_rescaled": ky, "inner": e}
        payload = {
            "a_squared": a2,
            "completeness_residual": residual,
            "operators": {
                name: {"real": op.real.tolist(), "imag": op.imag.tolist()}
                for name, op in named.items()
            },
        }
        _write_json(ns.json, payload)
    return 0


def _cmd_render(ns) -> int:
    cells = _resolve(ns, "cells", (20, 20))
    lattice = build(int(cells[0]), int(cells[1]))
    if ns.labels_text is not None:
        config = FilterConfiguration.from_text(lattice, ns.labels_text)
        params = {"cells": list(cells), "labels_text": ns.labels_text}
    else:
        settings = _settings_from_args(
            ns,
            a_squared=_require(ns, "a2", "--a2"),
            cells=cells,
            n_samples=_resolve(ns, "samples", 1),
        )
        config = sampler.run(settings).final_config
        params = asdict(settings)
    graph = reduce_configuration(config)
    style = RenderStyle(show_lattice=not ns.no_lattice)
    out = Path(_resolve(ns, "out", "graph.svg"))
    out.write_text(render_graph(graph, style))
    outputs = [out]
    if ns.export_json:
        json_path = Path(ns.export_json)
        _write_json(json_path, graph.as_dict())
        outputs.append(json_path)
    _write_json(out.with_name(out.name + ".manifest.json"),
                build_manifest("render", params, outputs))
    print(f"wrote {out} ({graph.n_vertices} domains, {graph.n_edges} edges)")
    return 0


# -------------------------------------------------------------------- parser

def _add_sampling_flags(sp, include_cells=True):
    if include_cells:
        sp.add_argument("--cells", nargs=2, type=int, metavar=("U", "V"),
                        help="unit cells along the two torus directions")
    sp.add_argument("--seed", type=int, help="master RNG seed (default 1)")
    sp.add_argument("--burn-in", dest="burn_in", type=int,
                    help="burn-in sweeps before recording (default 1000)")
    sp.add_argument("--thin", type=int, help="sweeps between kept samples (default 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="akltsim",
        description="Sample and analyse filter-outcome statistics of deformed "
                    "honeycomb AKLT states.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("sample", help="run one Metropolis chain, write sample CSV")
    sp.add_argument("--a2", type=float, help="deformation a^2 (>= 1)")
    sp.add_argument("--samples", type=int, help="kept samples (default 100)")
    _add_sampling_flags(sp)
    sp.add_argument("--paranoid", action="store_true",
                    help="recount statistics every sample and fail on drift")
    sp.add_argument("--out", help="output CSV path (default samples.csv)")
    sp.add_argument("--config", help="JSON or TOML file with default parameters")
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("analyze", help="domain-scaling or percolation study")
    sp.add_argument("--mode", choices=("scaling", "percolation"), required=True)
    sp.add_argument("--a2-list", dest="a2_list", nargs="+", type=float,
                    help="deformation values (the grid, for percolation)")
    sp.add_argument("--sizes", nargs="+", type=int,
                    help="lattice sizes as site counts, each 2*k^2")
    sp.add_argument("--samples", type=int, help="kept samples per cell (default 200)")
    _add_sampling_flags(sp, include_cells=False)
    sp.add_argument("--out-dir", dest="out_dir", help="output directory (default analysis)")
    sp.add_argument("--plot", action="store_true", help="also write an SVG figure")
    sp.add_argument("--config", help="JSON or TOML file with default parameters")
    sp.set_defaults(func=_cmd_analyze)

    sp = sub.add_parser("oracle-compare",
                        help="exact state vs enumeration (vs sampler) on a tiny torus")
    sp.add_argument("--a2", type=float, help="deformation a^2 (>= 1)")
    sp.add_argument("--samples", type=int,
                    help="Metropolis samples for the empirical check (default 0: skip)")
    _add_sampling_flags(sp)
    sp.add_argument("--json", help="also write the discrepancy metrics as JSON")
    sp.set_defaults(func=_cmd_oracle_compare)

    sp = sub.add_parser("povm-check", help="completeness residual of the filter family")
    sp.add_argument("--a2", type=float, help="deformation a^2 (> 0)")
    sp.add_argument("--json", help="also export the operators as JSON")
    sp.set_defaults(func=_cmd_povm_check)

    sp = sub.add_parser("render", help="draw the reduced graph of a configuration")
    sp.add_argument("--a2", type=float, help="deformation a^2 (>= 1) to sample at")
    sp.add_argument("--samples", type=int,
                    help="samples to advance before rendering the final state (default 1)")
    _add_sampling_flags(sp)
    sp.add_argument("--labels-text", dest="labels_text",
                    help="render this exact configuration (one of XYZ per site) "
                         "instead of sampling")
    sp.add_argument("--no-lattice", dest="no_lattice", action="store_true",
                    help="skip the faint lattice background")
    sp.add_argument("--export-json", dest="export_json",
                    help="also export the reduced graph as JSON")
    sp.add_argument("--out", help="output SVG path (default graph.svg)")
    sp.set_defaults(func=_cmd_render)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        ns._config = _load_config(ns.config) if getattr(ns, "config", None) else None
        return ns.func(ns)
    except (ValueError, analysis.InsufficientSamplesError) as exc:
        print(f"error:usage: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return 3
    except (analysis.CriticalPointError, sampler.ConsistencyError) as exc:
        print(f"error:estimation: {exc}", file=sys.stderr)
        if isinstance(exc, analysis.CriticalPointError) and exc.diagnostics:
            print(json.dumps(exc.diagnostics, sort_keys=True), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(cli_main())
