"""Command-line interface: paper-figure regressions and generic scenario runs.

Exit codes: 0 success, 1 configuration error, 2 numerical error.  All
errors go to stderr with a machine-parseable "ERROR[code]:" prefix.  Output
is deterministic: byte-identical across runs and worker counts.
"""

import argparse
import os
import sys

import numpy as np

from . import dynamics as dyn
from . import network as net
from .config import BUILTIN_CONFIGS, parse_config
from .errors import ConfigError, PlasmonSimError
from .experiments import (
    anticrossing_branches,
    calibrate_fig3_couplings,
    enhancement_map,
    fig_strong_coupling_scenario,
    optimal_Q,
    run_fig1c,
    run_fig2,
    run_fig3_fig4,
)
from .results import ResultTable, scenario_metadata


def _parse_sweep(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--sweep expects start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--sweep values must be numbers, got {text!r}") from None
    if step <= 0 or stop <= start:
        raise ConfigError(f"--sweep needs stop > start and step > 0, got {text!r}")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def _write(table, out_dir, fmt):
    os.makedirs(out_dir, exist_ok=True)
    ext = "csv" if fmt == "csv" else "json"
    path = os.path.join(out_dir, f"{table.name}.{ext}")
    table.write(path, fmt)
    print(path)
    return path


def _spectral_grid(parsed, points_override, default_half_span=8e-3, default_points=2001):
    sweep = parsed.sweep
    start = sweep.get("start_ev")
    stop = sweep.get("stop_ev")
    points = points_override or sweep.get("points") or default_points
    if start is None or stop is None:
        delta0 = parsed.scenario.params.get("delta_0_ev", 0.0)
        start, stop = delta0 - default_half_span, delta0 + default_half_span
    return np.linspace(start, stop, int(points))


def cmd_fig1c(args):
    result = run_fig1c(points=args.grid or 2001)
    table = ResultTable.from_arrays(
        "fig1c",
        ("detuning_ev", "phi_rad_cavity", "phi_rad_bare", "phi_abs_cavity", "phi_abs_bare"),
        (result.detunings, result.rad_cavity, result.rad_bare,
         result.abs_cavity, result.abs_bare),
        scenario_metadata(result.scenario),
    )
    _write(table, args.out, args.format)
    return 0


def cmd_fig2(args):
    result = run_fig2(paper_exact=not args.first_principles, points=args.grid or 401)
    meta = scenario_metadata(result.scenario)
    meta["result.yield_at_delta0"] = result.yield_at_delta0
    meta["result.bare_yield_at_delta0"] = result.bare_yield_at_delta0
    meta["result.rad_enhancement_at_delta0"] = result.rad_enhancement_at_delta0
    table_yield = ResultTable.from_arrays(
        "fig2_yield",
        ("detuning_ev", "yield_cavity", "yield_bare", "abs_plasmon_norm"),
        (result.detunings, result.yield_cavity, result.yield_bare, result.abs_plasmon),
        meta,
    )
    table_power = ResultTable.from_arrays(
        "fig2_power",
        ("detuning_ev", "phi_rad_cavity", "phi_rad_bare"),
        (result.detunings, result.rad_cavity, result.rad_bare),
        meta,
    )
    _write(table_yield, args.out, args.format)
    _write(table_power, args.out, args.format)
    return 0


def _fig34_metadata(result):
    meta = scenario_metadata(result.scenario)
    for key, value in result.calibration.items():
        if key == "residuals":
            meta["calibration.residual_max"] = max(abs(r) for r in value)
        else:
            meta[f"calibration.{key}"] = value
    meta["result.settle_fs"] = result.settle_fs
    for label, count in sorted(result.trace_maxima.items()):
        meta[f"result.maxima_{label}"] = count
    return meta


def cmd_fig3(args):
    result = run_fig3_fig4(spectrum_points=args.grid or 2001)
    meta = _fig34_metadata(result)
    table_traces = ResultTable.from_arrays(
        "fig3_traces",
        ("time_fs", "pop_q1e3", "pop_q1e4", "pop_q1e5", "pop_no_cavity"),
        (result.times_fs, result.traces["q1e3"], result.traces["q1e4"],
         result.traces["q1e5"], result.traces["no_cavity"]),
        meta,
    )
    table_spec = ResultTable.from_arrays(
        "fig3_spectrum",
        ("detuning_ev", "phi_rad_cavity", "phi_rad_bare"),
        (result.spectrum.detunings, result.spectrum.radiative_total,
         result.spectrum_bare.radiative_total),
        meta,
    )
    _write(table_traces, args.out, args.format)
    _write(table_spec, args.out, args.format)
    return 0


def _branch_table(name, branchset, metadata):
    columns = ["delta_ec_ev"]
    arrays = [branchset.sweep_values]
    for b in range(branchset.n_branches):
        columns += [f"branch{b}_re_ev", f"branch{b}_im_ev"]
        arrays += [branchset.eigenvalues[:, b].real, branchset.eigenvalues[:, b].imag]
    return ResultTable.from_arrays(name, columns, arrays, metadata)


def cmd_fig4(args):
    result = run_fig3_fig4(spectrum_points=args.grid or 2001)
    meta = _fig34_metadata(result)
    meta["result.two_g_eff_ev"] = result.metrics.two_g_eff
    meta["result.kappa_1_ev"] = result.metrics.kappa_1
    meta["result.kappa_2_ev"] = result.metrics.kappa_2
    meta["result.cooperativity"] = result.metrics.cooperativity

    sweep = _parse_sweep(args.sweep) if args.sweep else 2e-3 * np.arange(-5, 6)
    branchset = anticrossing_branches(result.couplings, sweep_values=sweep)
    _write(_branch_table("fig4_branches", branchset, meta), args.out, args.format)

    detunings = np.linspace(-8e-3, 8e-3, args.grid or 801)
    rows_dec, rows_det, rows_pow = [], [], []
    for dec in sweep:
        scenario = fig_strong_coupling_scenario(1e4, result.couplings)
        params = dict(scenario.params)
        params["delta_ce_ev"] = -dec
        params["omega_c_ev"] = params["omega_e_ev"] - dec
        params["gamma_c_ev"] = params["omega_c_ev"] / params["q_factor"]
        shifted = type(scenario)(scenario.name, params, scenario.provenance, scenario.notes)
        h = shifted.hamiltonian()
        spec = dyn.emission_spectrum(h, detunings, shifted.channels(h), "emitter")
        rows_dec.append(np.full_like(detunings, dec))
        rows_det.append(detunings)
        rows_pow.append(spec.radiative_total)
    table = ResultTable.from_arrays(
        "fig4_spectra",
        ("delta_ec_ev", "detuning_ev", "phi_rad_total"),
        (np.concatenate(rows_dec), np.concatenate(rows_det), np.concatenate(rows_pow)),
        meta,
    )
    _write(table, args.out, args.format)
    return 0


def _load(args):
    if not args.config:
        raise ConfigError("this subcommand needs --config (a path or one of: "
                          + ", ".join(sorted(BUILTIN_CONFIGS)) + ")")
    return parse_config(args.config)


def cmd_spectrum(args):
    parsed = _load(args)
    scenario = parsed.scenario
    h = scenario.hamiltonian()
    channels = scenario.channels(h)
    grid = _spectral_grid(parsed, args.grid)
    drive = scenario.params.get("drive_mode", "emitter")
    amps, powers = dyn.steady_state_sweep(h, grid, drive, channels)
    spec = dyn.SpectrumResult(grid, tuple(channels), powers)
    # the vacuum port is coherent; report its interference part separately so
    # the diagonal (per-mode) decomposition is also available
    rad_vacuum = next(c for c in channels if c.id == "rad_vacuum")
    cross = dyn.channel_cross_term(rad_vacuum, h.labels, amps)
    table = ResultTable.from_arrays(
        "spectrum",
        ("detuning_ev", "phi_rad_total", "phi_rad_vacuum", "phi_rad_vacuum_cross",
         "phi_rad_cavity_port", "phi_ohmic_plasmon", "phi_ohmic_emitter"),
        (grid, spec.radiative_total, spec.powers["rad_vacuum"], cross,
         spec.powers["rad_cavity"], spec.powers["ohmic_plasmon"],
         spec.powers["ohmic_emitter"]),
        scenario_metadata(scenario),
    )
    _write(table, args.out, args.format)
    return 0


def cmd_yield(args):
    parsed = _load(args)
    scenario = parsed.scenario
    h = scenario.hamiltonian()
    h_bare = scenario.bare_hamiltonian()
    channels = scenario.channels(h)
    grid = _spectral_grid(parsed, args.grid)
    drive = scenario.params.get("drive_mode", "emitter")
    _, powers = dyn.steady_state_sweep(h, grid, drive, channels)
    _, powers_b = dyn.steady_state_sweep(h_bare, grid, drive, channels)
    table = ResultTable.from_arrays(
        "yield",
        ("detuning_ev", "yield_cavity", "yield_bare"),
        (grid, dyn.yield_from_powers(channels, powers),
         dyn.yield_from_powers(channels, powers_b)),
        scenario_metadata(scenario),
    )
    _write(table, args.out, args.format)
    return 0


def cmd_evolve(args):
    parsed = _load(args)
    scenario = parsed.scenario
    h = scenario.hamiltonian()
    points = args.grid or int(parsed.sweep.get("t_points", 4096))
    span_fs = parsed.sweep.get("t_span_fs")
    if span_fs is None:
        times_fs = dyn.default_time_grid(h, points)
    else:
        times_fs = np.linspace(0.0, span_fs, points)
    initial = np.zeros(len(h.modes), dtype=complex)
    initial[h.index("emitter")] = 1.0
    trace = dyn.evolve(h, initial, times_fs)
    table = ResultTable.from_arrays(
        "evolve",
        ("time_fs", "pop_plasmon", "pop_cavity", "pop_emitter", "pop_total"),
        (times_fs, trace.population("plasmon"), trace.population("cavity"),
         trace.population("emitter"), trace.total),
        scenario_metadata(scenario),
    )
    _write(table, args.out, args.format)
    return 0


def cmd_eigen(args):
    parsed = _load(args) if args.config else None
    sweep = _parse_sweep(args.sweep) if args.sweep else 2e-3 * np.arange(-5, 6)
    if parsed is not None and parsed.scenario.params.get("model") == "three_mode":
        scenario = parsed.scenario
        meta = scenario_metadata(scenario)
        mats = []
        for dec in sweep:
            params = dict(scenario.params)
            params["delta_ce_ev"] = -dec
            params["omega_c_ev"] = params["omega_e_ev"] - dec
            params["gamma_c_ev"] = params["omega_c_ev"] / params["q_factor"]
            shifted = type(scenario)(scenario.name, params, scenario.provenance)
            mats.append(shifted.hamiltonian().matrix)
        branchset = dyn.eigen_branches(mats, sweep)
    else:
        couplings, _ = calibrate_fig3_couplings()
        branchset = anticrossing_branches(couplings, sweep_values=sweep)
        meta = {"scenario": "fig4_default"}
    metrics = dyn.anticrossing_metrics(branchset)
    meta["result.two_g_eff_ev"] = metrics.two_g_eff
    meta["result.kappa_1_ev"] = metrics.kappa_1
    meta["result.kappa_2_ev"] = metrics.kappa_2
    meta["result.cooperativity"] = metrics.cooperativity
    _write(_branch_table("eigen", branchset, meta), args.out, args.format)
    return 0


def cmd_map(args):
    if args.config:
        sweep = parse_config(args.config).sweep
        d = np.geomspace(sweep.get("d_min_nm", 2.0), sweep.get("d_max_nm", 30.0),
                         int(sweep.get("d_points", 61)))
        q = np.geomspace(sweep.get("q_min", 1e2), sweep.get("q_max", 1e7),
                         int(sweep.get("q_points", 61)))
    else:
        n = args.grid or 61
        d = np.geomspace(2.0, 30.0, n)
        q = np.geomspace(1e2, 1e7, n)
    grid = enhancement_map(d, q)
    dd, qq = np.meshgrid(grid.d_nm, grid.q_factor, indexing="ij")
    table = ResultTable.from_arrays(
        "map",
        ("d_nm", "q_factor", "yield_enhancement", "power_enhancement"),
        (dd.ravel(), qq.ravel(), grid.yield_enhancement.ravel(),
         grid.power_enhancement.ravel()),
        {"scenario": "enhancement_map", "d_points": len(grid.d_nm),
         "q_points": len(grid.q_factor)},
    )
    _write(table, args.out, args.format)
    return 0


def cmd_optq(args):
    rows = []
    for d in args.d_nm:
        res = optimal_Q(d, objective=args.objective)
        rows.append((d, res.q_opt, res.value, res.objective, int(res.boundary)))
    table = ResultTable(
        "optq",
        ("d_nm", "q_opt", "value", "objective", "boundary"),
        rows,
        {"scenario": "optimal_q", "objective": args.objective},
    )
    _write(table, args.out, args.format)
    return 0


def cmd_validate(args):
    parsed = _load(args)
    scenario = parsed.scenario
    print(f"scenario {scenario.name}: OK")
    for key in sorted(scenario.params):
        prov = scenario.provenance.get(key, "")
        print(f"  {key} = {scenario.params[key]!r}" + (f"  [{prov}]" if prov else ""))
    for note in scenario.notes:
        print(f"  note: {note}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plasmonsim",
        description="Coupled-mode simulator for a microcavity-engineered plasmonic "
                    "nanoparticle interacting with a single quantum emitter.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, config=True, sweep=False):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default="./out", help="output directory (default ./out)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--grid", type=int, default=None, help="override grid point count")
        if config:
            p.add_argument("--config", default=None,
                           help="scenario config file or builtin name "
                                f"({', '.join(sorted(BUILTIN_CONFIGS))})")
        if sweep:
            p.add_argument("--sweep", default=None,
                           help="detuning sweep start:stop:step in eV (inclusive)")
        p.set_defaults(fn=fn)
        return p

    add("fig1c", cmd_fig1c, "MNP dissipation spectra with/without cavity", config=False)
    p2 = add("fig2", cmd_fig2, "quantum yield and radiated power spectra", config=False)
    p2.add_argument("--first-principles", action="store_true",
                    help="derive all couplings from the geometry instead of the quoted set")
    add("fig3", cmd_fig3, "Rabi oscillation traces and emission doublet", config=False)
    add("fig4", cmd_fig4, "anti-crossing eigen branches and spectra map",
        config=False, sweep=True)
    add("spectrum", cmd_spectrum, "emission spectrum of a configured scenario")
    add("yield", cmd_yield, "quantum yield spectrum of a configured scenario")
    add("evolve", cmd_evolve, "single-excitation time evolution of a configured scenario")
    add("eigen", cmd_eigen, "eigenvalue branches over emitter-cavity detuning", sweep=True)
    add("map", cmd_map, "(D, Q) enhancement maps")
    popt = add("optq", cmd_optq, "optimal cavity Q per emitter distance", config=False)
    popt.add_argument("--objective", choices=("yield", "power"), default="yield")
    popt.add_argument("--d-nm", type=float, action="append", default=None,
                      help="emitter distance(s) in nm (repeatable; default 5, 10, 15)")
    add("validate", cmd_validate, "parse and print a resolved scenario, run nothing")
    return parser


def _merge_sweep_values(argv):
    """Let --sweep accept values with a leading minus (e.g. -10e-3:10e-3:2e-3)."""
    merged = []
    i = 0
    while i < len(argv):
        if argv[i] == "--sweep" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"--sweep={argv[i + 1]}")
            i += 2
        else:
            merged.append(argv[i])
            i += 1
    return merged


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_sweep_values(list(argv)))
    if getattr(args, "d_nm", None) is None and args.command == "optq":
        args.d_nm = [5.0, 10.0, 15.0]
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"ERROR[config]: {exc}", file=sys.stderr)
        return 1
    except (PlasmonSimError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"ERROR[numeric]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
