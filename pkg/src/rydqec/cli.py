"""Command-line interface: code construction, layouts, gates, scheduling.

Every subcommand writes a JSON report embedding its config; CSV side files
carry plot-ready data (time traces, histograms, cycle-time sweeps).  Exit
codes: 0 success, 2 usage error, 3 unknown preset, 4 malformed config,
5 infeasible layout request.
"""

from __future__ import annotations

import configparser
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from .bbcode import (
    BBCodeSpec,
    PRESETS,
    UnknownPresetError,
    build_check_matrices,
    compute_k,
    get_preset,
    load_code_config,
    tanner_graph,
)
from .layout import (
    LayoutResult,
    Placement,
    SearchPolicy,
    TABLE_SEEDS,
    distance_histogram,
    evaluate_seed,
    fold,
    initial_placement,
    search_layouts,
    seed_from_strings,
    site_map,
    uc_reference_placement,
    edge_squared_distances,
)
from .pipeline import canonical_layout, canonical_schedule, canonical_seed
from .reports import build_report, resolve_output_dir, write_csv, write_report
from .rydgate import (
    GateContext,
    PulseParams,
    average_fidelity,
    bell_fidelity_phase_gate,
    fidelity_floor,
    gate_preset,
    optimize_pulse,
    phase_profile,
    rabi_envelope,
    simulate_gate,
    simulate_pair,
    simulate_single,
    GATE_TABLE,
)
from .scheduler import (
    TimingModel,
    assign_gate_classes,
    build_gate_list,
    certify_schedule,
    cycle_time,
    cycle_time_upper_bound,
    greedy_schedule,
    sweep_cycle_time,
    SERIAL_CLASS_IDS,
)

EXIT_UNKNOWN_PRESET = 3
EXIT_BAD_CONFIG = 4
EXIT_INFEASIBLE = 5

TABLE_I_DMAX = {
    "[[72,12,6]]": 5.0,
    "[[90,8,10]]": 10.0,
    "[[108,8,10]]": 7.0,
    "[[144,12,12]]": 7.211103,
    "[[288,12,18]]": 7.211103,
}


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _resolve_code(code: str | None, config: str | None) -> BBCodeSpec:
    if config:
        try:
            return load_code_config(config)
        except FileNotFoundError:
            _fail(EXIT_BAD_CONFIG, f"config file not found: {config}")
        except ValueError as exc:
            _fail(EXIT_BAD_CONFIG, str(exc))
    if not code:
        _fail(EXIT_BAD_CONFIG, "either a code preset or --config is required")
    try:
        return get_preset(code)
    except UnknownPresetError as exc:
        _fail(EXIT_UNKNOWN_PRESET, str(exc))
    raise AssertionError("unreachable")


def _read_ini(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        _fail(EXIT_BAD_CONFIG, f"config file not found: {path}")
    return parser


def _layout_results_dict(result: LayoutResult) -> dict:
    return {
        "seed": result.seed.as_strings(),
        "grid": [result.placement.grid_rows, result.placement.grid_cols],
        "d2_max": result.d2_max,
        "d_max": result.d_max,
        "positions": result.placement.as_dict(),
    }


def _load_layout(path: str, spec: BBCodeSpec) -> LayoutResult:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        results = data.get("results", data)
        seed = seed_from_strings(results["seed"], spec)
        rows, cols = results["grid"]
        half = spec.l * spec.m
        arrays = {}
        for kind in "LRXZ":
            arr = np.empty((half, 2), dtype=np.int64)
            for i in range(half):
                arr[i] = results["positions"][f"{kind}{i}"]
            arrays[kind] = arr
        placement = Placement(
            grid_rows=rows,
            grid_cols=cols,
            pos_l=arrays["L"],
            pos_r=arrays["R"],
            pos_x=arrays["X"],
            pos_z=arrays["Z"],
        )
        placement.validate_distinct()
        d2 = int(edge_squared_distances(placement, tanner_graph(spec)).max())
        return LayoutResult(seed=seed, placement=placement, d2_max=d2)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        _fail(EXIT_BAD_CONFIG, f"malformed layout file {path}: {exc}")
    raise AssertionError("unreachable")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
@click.option("--output-dir", default=None, help="Report directory (env RYDQEC_OUTPUT_DIR).")
@click.option("--seed", "rng_seed", default=0, show_default=True, help="Global RNG seed.")
@click.option("--jobs", default=1, show_default=True, help="Worker processes for searches.")
@click.option("--budget-secs", default=0.0, show_default=True, help="Time budget for searches (0 = unbounded).")
@click.pass_context
def main(ctx, output_dir, rng_seed, jobs, budget_secs):
    """Bivariate bicycle codes on neutral-atom grids: layouts, gates, schedules."""
    ctx.ensure_object(dict)
    ctx.obj["output_dir"] = resolve_output_dir(output_dir)
    ctx.obj["rng_seed"] = rng_seed
    ctx.obj["jobs"] = jobs
    ctx.obj["budget_secs"] = budget_secs


@main.group()
def code():
    """Construct and validate code definitions."""


@code.command("build")
@click.argument("preset", required=False)
@click.option("--config", default=None, help="INI file with a [code] section.")
@click.option("--matrices/--no-matrices", default=False, help="Embed H_X/H_Z rows in the report.")
@click.pass_context
def code_build(ctx, preset, config, matrices):
    """Build check matrices and report n, k, row weights and commutation."""
    spec = _resolve_code(preset, config)
    t0 = time.perf_counter()
    hx, hz = build_check_matrices(spec)
    k = compute_k(hx, hz)
    commutes = not ((hx @ hz.T) % 2).any()
    results = {
        "code": spec.describe(),
        "n": spec.n,
        "k": k,
        "declared_k": spec.declared_k,
        "declared_d": spec.declared_d,
        "figure_of_merit": round(spec.figure_of_merit, 6),
        "row_weight_x": [int(w) for w in sorted(set(hx.sum(axis=1).tolist()))],
        "row_weight_z": [int(w) for w in sorted(set(hz.sum(axis=1).tolist()))],
        "hx_hz_commute": commutes,
        "tanner_edges": 6 * spec.n,
    }
    if matrices:
        results["hx"] = ["".join(map(str, row)) for row in hx.tolist()]
        results["hz"] = ["".join(map(str, row)) for row in hz.tolist()]
    report = build_report(
        {"command": "code build", "preset": preset, "config": config},
        results,
        {"wall_secs": time.perf_counter() - t0},
    )
    path = write_report(ctx.obj["output_dir"] / "code_build.json", report)
    click.echo(f"{spec.describe()}: k={k} commute={commutes} -> {path}")
    if k != spec.declared_k or not commutes:
        sys.exit(1)


@code.command("check")
@click.argument("preset", required=False)
@click.option("--config", default=None)
def code_check(preset, config):
    """Validate a code definition (preset or config file)."""
    spec = _resolve_code(preset, config)
    hx, hz = build_check_matrices(spec)
    problems = []
    if ((hx @ hz.T) % 2).any():
        problems.append("H_X and H_Z do not commute")
    if set(hx.sum(axis=1)) != {6} or set(hz.sum(axis=1)) != {6}:
        problems.append("row weight is not 6")
    if compute_k(hx, hz) != spec.declared_k:
        problems.append("computed k differs from declared k")
    if problems:
        _fail(EXIT_BAD_CONFIG, "; ".join(problems))
    click.echo(f"{spec.describe()}: ok")


@main.group()
def layout():
    """Optimize and inspect planar qubit layouts."""


@layout.command("optimize")
@click.argument("preset", required=False)
@click.option("--config", default=None)
@click.option("--search/--no-search", default=False, help="Run the seed search instead of the published seed.")
@click.option("--full-r", type=click.Choice(["auto", "yes", "no"]), default="auto")
@click.option("--no-fold", is_flag=True, help="Skip the dilation/fold remapping.")
@click.option("--no-refine", is_flag=True, help="Keep the plain matching witness (no reference-distribution refinement).")
@click.pass_context
def layout_optimize(ctx, preset, config, search, full_r, no_fold, no_refine):
    """Minimize the maximum check communication distance for a code."""
    spec = _resolve_code(preset, config)
    t0 = time.perf_counter()
    extra: dict = {}
    if search:
        policy = SearchPolicy(
            full_r=None if full_r == "auto" else (full_r == "yes"),
            time_budget_secs=ctx.obj["budget_secs"],
            jobs=ctx.obj["jobs"],
            apply_fold=not no_fold,
        )
        outcome = search_layouts(spec, policy)
        result = outcome.result
        extra = {"seeds_evaluated": outcome.seeds_evaluated, "search_exhausted": outcome.exhausted}
    else:
        try:
            if spec.name in TABLE_SEEDS and not no_fold and not no_refine:
                result = canonical_layout(spec)
            else:
                result = evaluate_seed(canonical_seed(spec), spec, apply_fold=not no_fold)
        except KeyError:
            _fail(EXIT_UNKNOWN_PRESET, f"no published seed for {spec.describe()}; use --search")
        except RuntimeError as exc:
            _fail(EXIT_INFEASIBLE, str(exc))
    hist = distance_histogram(result.placement, tanner_graph(spec))
    results = _layout_results_dict(result) | extra | {
        "histogram": [
            {"d2": d2, "distance": d, "count": c} for d2, d, c in hist.entries
        ]
    }
    report = build_report(
        {
            "command": "layout optimize",
            "code": spec.name or spec.describe(),
            "search": search,
            "full_r": full_r,
            "fold": not no_fold,
            "seed": ctx.obj["rng_seed"],
        },
        results,
        {"wall_secs": time.perf_counter() - t0},
    )
    out = ctx.obj["output_dir"]
    path = write_report(out / "layout.json", report)
    write_csv(
        out / "layout_histogram.csv",
        [{"d2": d2, "distance": d, "count": c} for d2, d, c in hist.entries],
        ["d2", "distance", "count"],
    )
    click.echo(f"{spec.name or spec.describe()}: D_max = {result.d_max} -> {path}")


@layout.command("fold")
@click.argument("preset", required=False)
@click.option("--config", default=None)
def layout_fold(preset, config):
    """Print the folded data-qubit site map for the published seed."""
    spec = _resolve_code(preset, config)
    try:
        seed = canonical_seed(spec)
    except KeyError as exc:
        _fail(EXIT_UNKNOWN_PRESET, str(exc))
    placement = fold(initial_placement(seed, spec))
    click.echo(site_map(placement))


@layout.command("show")
@click.argument("preset", required=False)
@click.option("--config", default=None)
@click.option("--uc", is_flag=True, help="Show the unfolded column-major reference layout instead.")
def layout_show(preset, config, uc):
    """Print the complete optimized site map (checks included)."""
    spec = _resolve_code(preset, config)
    if uc:
        placement = uc_reference_placement(spec)
        d2 = int(edge_squared_distances(placement, tanner_graph(spec)).max())
        click.echo(site_map(placement))
        click.echo(f"D_max = {round(float(np.sqrt(d2)), 6)}")
        return
    try:
        result = canonical_layout(spec)
    except KeyError as exc:
        _fail(EXIT_UNKNOWN_PRESET, str(exc))
    click.echo(site_map(result.placement))
    click.echo(f"D_max = {result.d_max}")


@layout.command("histogram")
@click.argument("preset", required=False)
@click.option("--config", default=None)
@click.option("--layout-file", default=None, help="Layout report JSON to measure instead of the canonical layout.")
@click.pass_context
def layout_histogram(ctx, preset, config, layout_file):
    """Emit the communication-distance histogram as CSV."""
    spec = _resolve_code(preset, config)
    if layout_file:
        result = _load_layout(layout_file, spec)
    else:
        try:
            result = canonical_layout(spec)
        except KeyError as exc:
            _fail(EXIT_UNKNOWN_PRESET, str(exc))
    hist = distance_histogram(result.placement, tanner_graph(spec))
    rows = [{"d2": d2, "distance": d, "count": c} for d2, d, c in hist.entries]
    path = write_csv(ctx.obj["output_dir"] / "histogram.csv", rows, ["d2", "distance", "count"])
    for row in rows:
        click.echo(f"D={row['distance']:<9} count={row['count']}")
    click.echo(f"total={hist.total} -> {path}")


def _pulse_from_options(row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level):
    if row is not None:
        preset = gate_preset(row)
        return preset.params, preset.context
    missing = [n for n, v in [("--omega", omega), ("--freq", freq), ("--tau", tau),
                              ("--t-gate", t_gate), ("--interaction", interaction),
                              ("--lifetime", lifetime)] if v is None]
    if missing:
        _fail(EXIT_BAD_CONFIG, f"missing required pulse options: {', '.join(missing)}")
    params = PulseParams(
        omega0_mhz=omega,
        delta0_mhz=delta0 or 0.0,
        mod_amp=amp or 0.0,
        mod_freq_mhz=freq,
        tau_ns=tau,
        t_gate_ns=t_gate,
    )
    context = GateContext(interaction_mhz=interaction, lifetime_us=lifetime, level_label=level or "")
    return params, context


_PULSE_OPTIONS = [
    click.option("--row", type=int, default=None, help="Published gate row 1..17."),
    click.option("--omega", type=float, default=None, help="Peak Rabi frequency Omega/2pi (MHz)."),
    click.option("--delta0", type=float, default=None, help="Static detuning Delta0/2pi (MHz)."),
    click.option("--amp", type=float, default=None, help="Phase modulation amplitude (rad)."),
    click.option("--freq", type=float, default=None, help="Phase modulation frequency (MHz)."),
    click.option("--tau", type=float, default=None, help="Modulation envelope width (ns)."),
    click.option("--t-gate", type=float, default=None, help="Gate duration (ns)."),
    click.option("--interaction", type=float, default=None, help="Blockade strength V/2pi (MHz)."),
    click.option("--lifetime", type=float, default=None, help="Rydberg lifetime (us)."),
    click.option("--level", default=None, help="Rydberg level label (metadata)."),
]


def _with_pulse_options(fn):
    for opt in reversed(_PULSE_OPTIONS):
        fn = opt(fn)
    return fn


def _sim_results_dict(row, params, context, res):
    eps_min, ratio = fidelity_floor(context, res.epsilon)
    return {
        "row": row,
        "pulse": {
            "omega0_mhz": params.omega0_mhz,
            "delta0_mhz": params.delta0_mhz,
            "mod_amp": params.mod_amp,
            "mod_freq_mhz": params.mod_freq_mhz,
            "tau_ns": params.tau_ns,
            "t_gate_ns": params.t_gate_ns,
        },
        "context": {
            "interaction_mhz": context.interaction_mhz,
            "lifetime_us": context.lifetime_us,
            "level": context.level_label,
        },
        "a01": round(res.a01, 9),
        "a11": round(res.a11, 9),
        "gate_phase_rad": round(res.gate_phase, 9),
        "t_rydberg_ns": round(res.t_rydberg_ns, 4),
        "f_average": round(res.f_average, 9),
        "fidelity": round(res.fidelity, 9),
        "epsilon": round(res.epsilon, 9),
        "epsilon_min": round(eps_min, 9),
        "epsilon_over_min": round(ratio, 4),
        "norm_drift": res.norm_drift,
    }


@main.group()
def gate():
    """Simulate and optimize long-range Rydberg CZ pulses."""


@gate.command("simulate")
@_with_pulse_options
@click.option("--traces/--no-traces", default=False, help="Also write the population/pulse CSV.")
@click.pass_context
def gate_simulate(ctx, row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level, traces):
    """Run the CZ pipeline and report amplitudes, phase and fidelities."""
    params, context = _pulse_from_options(row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level)
    t0 = time.perf_counter()
    res = simulate_gate(params, context)
    report = build_report(
        {"command": "gate simulate", "row": row, "seed": ctx.obj["rng_seed"]},
        _sim_results_dict(row, params, context, res),
        {"wall_secs": time.perf_counter() - t0},
    )
    path = write_report(ctx.obj["output_dir"] / "gate_simulate.json", report)
    if traces:
        _write_traces(ctx.obj["output_dir"] / "gate_traces.csv", params, context)
    click.echo(
        f"F = {res.fidelity:.4f} (F_ave {res.f_average:.5f}, T_R {res.t_rydberg_ns:.1f} ns, "
        f"phi {res.gate_phase:+.4f} rad) -> {path}"
    )


def _write_traces(path, params, context):
    single = simulate_single(params)
    pair = simulate_pair(params, context)
    ts = single.times_ns
    rows = []
    for i, t in enumerate(ts):
        rows.append(
            {
                "t_ns": round(float(t), 4),
                "omega_mhz": round(float(rabi_envelope(t, params)), 6),
                "phase_rad": round(float(phase_profile(t, params)), 6),
                "p_g": round(float(single.ground_pop[i]), 9),
                "p_r": round(float(single.rydberg_pop[i]), 9),
                "p_gg": round(float(pair.gg_pop[i]), 9),
                "p_gr": round(float(pair.single_pop[i]), 9),
                "p_rr": round(float(pair.double_pop[i]), 9),
            }
        )
    return write_csv(path, rows, ["t_ns", "omega_mhz", "phase_rad", "p_g", "p_r", "p_gg", "p_gr", "p_rr"])


@gate.command("trace")
@_with_pulse_options
@click.pass_context
def gate_trace(ctx, row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level):
    """Write the pulse and population time series as CSV."""
    params, context = _pulse_from_options(row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level)
    path = _write_traces(ctx.obj["output_dir"] / "gate_traces.csv", params, context)
    click.echo(f"traces -> {path}")


@gate.command("optimize")
@_with_pulse_options
@click.option("--budget", type=int, default=400, show_default=True, help="Simulation-call budget.")
@click.option("--restarts", type=int, default=8, show_default=True)
@click.pass_context
def gate_optimize(ctx, row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level, budget, restarts):
    """Search pulse parameters maximizing the decay-corrected fidelity."""
    params, context = _pulse_from_options(row, omega, delta0, amp, freq, tau, t_gate, interaction, lifetime, level)
    t0 = time.perf_counter()
    out = optimize_pulse(context, params, budget=budget, restarts=restarts, seed=ctx.obj["rng_seed"])
    results = _sim_results_dict(row, out.params, context, out.result)
    results["evaluations"] = out.evaluations
    results["budget_exhausted"] = out.budget_exhausted
    report = build_report(
        {"command": "gate optimize", "row": row, "budget": budget, "restarts": restarts,
         "seed": ctx.obj["rng_seed"]},
        results,
        {"wall_secs": time.perf_counter() - t0},
    )
    path = write_report(ctx.obj["output_dir"] / "gate_optimize.json", report)
    click.echo(f"best F = {out.result.fidelity:.5f} after {out.evaluations} evaluations -> {path}")


def _schedule_for(ctx, spec, layout_file, rng_seed, restarts, serial_policy):
    if layout_file:
        result = _load_layout(layout_file, spec)
    else:
        try:
            result = canonical_layout(spec)
        except KeyError as exc:
            _fail(EXIT_UNKNOWN_PRESET, str(exc))
    serial: tuple[int, ...] | None
    if serial_policy == "reference":
        serial = SERIAL_CLASS_IDS
    elif serial_policy == "none":
        serial = ()
    else:
        serial = None  # pipeline default
    run = canonical_schedule(spec, rng_seed=rng_seed, restarts=restarts, layout=result,
                             serial_class_ids=serial)
    return result, run.schedule


@main.command("schedule")
@click.argument("preset", required=False)
@click.option("--config", default=None)
@click.option("--layout-file", default=None, help="Layout report JSON (default: canonical layout).")
@click.option("--restarts", type=int, default=50, show_default=True)
@click.option("--serial-classes", type=click.Choice(["auto", "reference", "none"]), default="auto")
@click.option("--t-switch", type=float, default=1.5, show_default=True)
@click.option("--t-op", type=float, default=0.0, show_default=True)
@click.option("--t-meas", type=float, default=0.0, show_default=True)
@click.pass_context
def schedule_cmd(ctx, preset, config, layout_file, restarts, serial_classes, t_switch, t_op, t_meas):
    """Group all check CZs into slots and evaluate the cycle-time model."""
    spec = _resolve_code(preset, config)
    t0 = time.perf_counter()
    result, sched = _schedule_for(ctx, spec, layout_file, ctx.obj["rng_seed"], restarts, serial_classes)
    gates = build_gate_list(result.placement, tanner_graph(spec), sched.classes)
    worst = certify_schedule(sched, gates)
    timing = TimingModel(t_switch_us=t_switch, t_op_us=t_op, t_meas_us=t_meas)
    breakdown = cycle_time(sched, timing)
    results = {
        "code": spec.name or spec.describe(),
        "d_max": result.d_max,
        "summary": sched.summary(),
        "serial_class_ids": list(sched.serial_class_ids),
        "max_crosstalk": round(worst, 6),
        "timing": {"t_switch_us": t_switch, "t_op_us": t_op, "t_meas_us": t_meas},
        "cycle": {
            "illumination_us": round(breakdown.illumination_us, 3),
            "local_fixed_us": breakdown.local_fixed_us,
            "switch_units": breakdown.switch_units,
            "switching_us": round(breakdown.switching_us, 3),
            "total_us": round(breakdown.total_us, 3),
            "total_ms": round(breakdown.total_ms, 6),
        },
        "slots": [
            {
                "subcircuit": s.subcircuit,
                "class_id": s.class_id,
                "illumination_ns": s.illumination_ns,
                "gates": [[g.check_id, g.data_id] for g in s.gates],
            }
            for s in sched.slots
        ],
    }
    report = build_report(
        {"command": "schedule", "code": spec.name, "seed": ctx.obj["rng_seed"],
         "restarts": restarts, "serial_classes": serial_classes},
        results,
        {"wall_secs": time.perf_counter() - t0},
    )
    path = write_report(ctx.obj["output_dir"] / "schedule.json", report)
    click.echo(
        f"slots={sched.n_slots} illumination={sched.illumination_us:.1f}us "
        f"cycle={breakdown.total_ms:.4f}ms max_x={worst:.4f} -> {path}"
    )


@main.group(name="cycle-time")
def cycle_time_group():
    """Cycle-time sweeps and bounds."""


@cycle_time_group.command("sweep")
@click.argument("preset", required=False)
@click.option("--config", default=None)
@click.option("--layout-file", default=None)
@click.option("--restarts", type=int, default=50, show_default=True)
@click.option("--t-switch-max", type=float, default=3.0, show_default=True)
@click.option("--t-switch-step", type=float, default=0.1, show_default=True)
@click.option("--op-meas", default="0:0,1:10,1:25,1:50",
              help="Comma-separated t_op:t_meas pairs in us.")
@click.pass_context
def cycle_sweep(ctx, preset, config, layout_file, restarts, t_switch_max, t_switch_step, op_meas):
    """Write cycle time vs beam-switching time curves as CSV."""
    spec = _resolve_code(preset, config)
    try:
        pairs = [tuple(float(v) for v in item.split(":")) for item in op_meas.split(",")]
        if any(len(p) != 2 for p in pairs):
            raise ValueError
    except ValueError:
        _fail(EXIT_BAD_CONFIG, f"malformed --op-meas value: {op_meas!r}")
    _, sched = _schedule_for(ctx, spec, layout_file, ctx.obj["rng_seed"], restarts, "auto")
    values = np.round(np.arange(0.0, t_switch_max + 1e-9, t_switch_step), 9)
    rows = sweep_cycle_time(sched, values.tolist(), pairs)
    path = write_csv(
        ctx.obj["output_dir"] / "cycle_time_sweep.csv",
        rows,
        ["t_switch_us", "t_op_us", "t_meas_us", "total_us", "total_ms"],
    )
    click.echo(f"{len(rows)} rows (slope {sched.n_slots + 4} us/us) -> {path}")


@main.command("reproduce-all")
@click.option("--quick", is_flag=True, help="Skip the [[288,12,18]] seed search.")
@click.option("--search", is_flag=True, help="Also run the restricted seed searches (slow).")
@click.option("--restarts", type=int, default=50, show_default=True)
@click.pass_context
def reproduce_all(ctx, quick, search, restarts):
    """Re-derive the headline numbers and print PASS/FAIL per criterion."""
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append((name, ok, detail))
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

    # code construction
    for name, spec in PRESETS.items():
        hx, hz = build_check_matrices(spec)
        ok = (
            not ((hx @ hz.T) % 2).any()
            and set(hx.sum(axis=1)) == {6}
            and compute_k(hx, hz) == spec.declared_k
        )
        record(f"code {name}", ok, f"k={compute_k(hx, hz)}")

    # layout seeds
    for name, spec in PRESETS.items():
        result = evaluate_seed(canonical_seed(spec), spec)
        ok = abs(result.d_max - TABLE_I_DMAX[name]) < 1e-6
        record(f"layout seed {name}", ok, f"D_max={result.d_max}")

    if search:
        for name in PRESETS:
            if quick and name == "[[288,12,18]]":
                click.echo(f"SKIP  layout search {name} (--quick)")
                continue
            spec = PRESETS[name]
            outcome = search_layouts(
                spec,
                SearchPolicy(
                    full_r=False,
                    jobs=ctx.obj["jobs"],
                    time_budget_secs=ctx.obj["budget_secs"],
                ),
            )
            ok = abs(outcome.result.d_max - TABLE_I_DMAX[name]) < 1e-6
            record(
                f"layout search {name}",
                ok,
                f"D_max={outcome.result.d_max} seeds={outcome.seeds_evaluated} exhausted={outcome.exhausted}",
            )

    # histogram
    spec = PRESETS["[[144,12,12]]"]
    lay = canonical_layout(spec)
    hist = distance_histogram(lay.placement, tanner_graph(spec))
    expected_counts = (80, 4, 88, 16, 12, 12, 56, 112, 24, 4, 8, 112, 48, 16, 52, 4, 216)
    record(
        "histogram [[144,12,12]]",
        hist.counts == expected_counts and hist.total == 864,
        f"{len(hist.entries)} classes, total {hist.total}",
    )

    # gate table regression
    worst_dev = 0.0
    all_ok = True
    for preset in GATE_TABLE:
        res = simulate_gate(preset.params, preset.context)
        dev = abs(res.fidelity - preset.fidelity)
        worst_dev = max(worst_dev, dev)
        all_ok &= dev <= 1e-3 and res.fidelity >= 0.999
    record("gate table (17 rows)", all_ok, f"max |dF| = {worst_dev:.1e}")
    g17 = simulate_gate(GATE_TABLE[16].params, GATE_TABLE[16].context)
    eps_min, ratio = fidelity_floor(GATE_TABLE[16].context, g17.epsilon)
    record(
        "gate 17 window",
        0.9988 <= g17.fidelity <= 0.9996 and 1.8 <= ratio <= 2.6,
        f"F={g17.fidelity:.5f} eps/eps_min={ratio:.2f}",
    )

    # fidelity formula oracle
    rng = np.random.default_rng(ctx.obj["rng_seed"])
    agree = all(
        abs(average_fidelity(1.0, 1.0, phi) - (bell_fidelity_phase_gate(0.0, phi) * 16 + 4) / 20)
        <= 1e-12
        for phi in rng.uniform(-np.pi, np.pi, 1000)
    )
    exact = average_fidelity(1, 1, np.pi) == 1.0 and average_fidelity(1, 1, 0.0) == 0.4
    record("fidelity formulas", agree and exact, "phase-gate chain to 1e-12")

    # schedule
    run = canonical_schedule(spec, rng_seed=ctx.obj["rng_seed"], restarts=restarts, layout=lay)
    sched = run.schedule
    gates = build_gate_list(lay.placement, tanner_graph(spec), sched.classes)
    worst = certify_schedule(sched, gates)
    serial = sched.slots_for_classes(range(12, 18))
    breakdown = cycle_time(sched, TimingModel(t_switch_us=1.5))
    ub = cycle_time_upper_bound(144, 0.48, TimingModel(t_switch_us=1.5))
    record(
        "schedule slots",
        serial == 448 and sched.n_slots <= 700,
        f"slots={sched.n_slots} serial={serial} max_x={worst:.4f}",
    )
    record(
        "cycle time",
        abs(breakdown.total_ms - 1.28) <= 0.02 and abs(sched.illumination_us - 234) <= 5,
        f"{breakdown.total_ms:.4f} ms, illumination {sched.illumination_us:.1f} us",
    )
    record("upper bound", abs(ub * 1e-3 - 1.72) <= 0.01, f"{ub * 1e-3:.4f} ms")

    # Fig 4 sweep data
    rows = sweep_cycle_time(sched, [0.0, 1.5, 3.0], [(0.0, 0.0), (1.0, 10.0)])
    path = write_csv(
        ctx.obj["output_dir"] / "cycle_time_sweep.csv",
        rows,
        ["t_switch_us", "t_op_us", "t_meas_us", "total_us", "total_ms"],
    )
    click.echo(f"sweep -> {path}")

    n_fail = sum(1 for _, ok, _ in checks if not ok)
    click.echo(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    sys.exit(1 if n_fail else 0)


if __name__ == "__main__":
    main()
