"""Command-line front end: parameter presets, fidelity sweeps, fusion reports.

Subcommands
-----------
params  print a parameter preset, its antiblockade check and optimal time
evolve  fidelity-vs-time CSV for the full, effective and dissipative runs
sweep   1- or 2-axis fidelity grid over gamma / delta_omega / delta_t / time
fuse    branch table and CSV for a GHZ or W fusion run

Configuration is a flat ``key = value`` text file (# comments) plus the
command-line overrides --config/--out/--steps/--seed. Every command is
deterministic: the same invocation writes byte-identical output. Exit
codes: 0 success, 2 config/usage error, 3 invalid physics parameters,
4 register size cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .core import DimensionMismatchError, InvalidStateError
from .dynamics import EvolutionSpec, default_steps, pair_state
from .fusion import (
    SizeCapError,
    extract_pair_channel,
    fusion_fidelity,
    ideal_gate,
    make_ghz,
    make_w,
    run_fusion,
    sample_branch,
)
from .hamiltonians import AtomParams, PRESETS, PhysicsError, pair_gate_target

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_SIZE = 4

COMP_LABELS = ("00", "01", "10", "11")
PARAM_KEYS = ("omega_a", "omega_b", "delta_a", "delta_b", "delta_rr", "gamma")
AXIS_NAMES = ("gamma", "delta_omega", "delta_t", "time")


class ConfigError(ValueError):
    """Malformed configuration or usage."""


def _fmt(x):
    return f"{x:.9g}"


def load_config(path):
    """Flat key = value file; repeated ``axis`` keys accumulate."""
    cfg = {"axis": []}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "axis":
            cfg["axis"].append(value)
        else:
            cfg[key] = value
    return cfg


def _get_float(cfg, key, default):
    if key not in cfg:
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} is not a number: {cfg[key]!r}") from exc


def _get_int(cfg, key, default):
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} is not an integer: {cfg[key]!r}") from exc


def build_params(cfg):
    """AtomParams from preset plus individual overrides."""
    preset = cfg.get("preset", "fig2")
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r} (choose from {sorted(PRESETS)})")
    base = PRESETS[preset]()
    fields = {key: _get_float(cfg, key, getattr(base, key)) for key in PARAM_KEYS}
    return AtomParams(**fields), preset


def parse_axes(cfg):
    """[(name, values)] from ``axis = name min max points`` lines."""
    axes = []
    for spec in cfg["axis"]:
        parts = spec.split()
        if len(parts) != 4:
            raise ConfigError(f"axis needs 'name min max points', got {spec!r}")
        name, lo_s, hi_s, n_s = parts
        if name not in AXIS_NAMES:
            raise ConfigError(f"unknown axis {name!r} (choose from {AXIS_NAMES})")
        try:
            lo, hi, n = float(lo_s), float(hi_s), int(n_s)
        except ValueError as exc:
            raise ConfigError(f"bad axis numbers in {spec!r}") from exc
        if n < 2:
            raise ConfigError("axis needs at least 2 points")
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise ConfigError(f"axis range [{lo}, {hi}] is degenerate or not finite")
        axes.append((name, np.linspace(lo, hi, n)))
    if not 1 <= len(axes) <= 2:
        raise ConfigError("sweep needs 1 or 2 axis lines")
    names = [name for name, _ in axes]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate axis names")
    if sum(name in ("delta_t", "time") for name in names) > 1:
        raise ConfigError("at most one time-like axis")
    return axes


def _resolve_states(cfg):
    initial = cfg.get("initial", "00")
    if initial not in COMP_LABELS:
        raise ConfigError(f"initial state must be one of {COMP_LABELS}")
    target_key = cfg.get("target", "auto")
    if target_key == "auto":
        target = pair_gate_target(initial).amps
    elif target_key in COMP_LABELS:
        target = pair_state(target_key).amps
    else:
        raise ConfigError("target must be 'auto' or a computational pair label")
    return initial, target


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows, footer):
    lines = [",".join(header)]
    lines += [",".join(cells) for cells in rows]
    lines += [f"# {entry}" for entry in footer]
    return "\n".join(lines) + "\n"


def _footer(params, preset, steps, extra=()):
    units = "MHz, time in microseconds" if preset == "physical" else "units of omega_b"
    footer = [
        "params: " + " ".join(f"{k}={_fmt(getattr(params, k))}" for k in PARAM_KEYS),
        f"preset: {preset}",
        f"steps: {steps}",
        f"units: {units}",
    ]
    footer.extend(extra)
    return footer


def cmd_params(args):
    if args.preset not in PRESETS:
        raise ConfigError(f"unknown preset {args.preset!r} (choose from {sorted(PRESETS)})")
    p = PRESETS[args.preset]()
    unit = "MHz" if args.preset == "physical" else "omega_b units"
    time_unit = "us" if args.preset == "physical" else "1/omega_b"
    lines = [f"preset: {args.preset}  ({unit})"]
    for key in PARAM_KEYS:
        lines.append(f"  {key} = {_fmt(getattr(p, key))}")
    ab = "satisfied" if p.antiblockade_satisfied else "NOT satisfied"
    lines.append(f"antiblockade delta_a + delta_b = delta_rr: {ab}")
    t0 = p.optimal_time
    lines.append(f"optimal time t0 = pi*delta/omega^2 = {_fmt(t0)} {time_unit}"
                 f" ({_fmt(t0 / math.pi)} pi)")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _record_plan(time_points, dt_star):
    """Snap requested times onto the integrator grid; returns (indices, steps)."""
    idx = np.rint(np.asarray(time_points) / dt_star).astype(np.int64)
    steps = int(idx.max())
    return idx, steps


def _grid_fidelities(params, gammas, time_points, target, initial, steps_anchor):
    """Fidelity matrix (len(gammas), len(times)) for one drive setting.

    All runs share the step size anchored at the optimal time so that grid
    points at identical absolute times agree across commands to round-off.
    """
    dt_star = params.optimal_time / steps_anchor
    rec_idx, steps = _record_plan(time_points, dt_star)
    rec_sorted = np.unique(rec_idx)
    psi0 = pair_state(initial).amps
    if all(g == 0.0 for g in gammas):
        out = _run_recorded_pure(params, "full", psi0, dt_star, steps, rec_sorted)
        vals = np.abs(out @ np.asarray(target).conj()) ** 2
        grid = np.tile(vals, (len(gammas), 1))
    else:
        rho0 = np.outer(psi0, psi0.conj())
        rhos = _run_recorded_lindblad(params, np.stack([rho0] * len(gammas)),
                                      list(gammas), dt_star, steps, rec_sorted)
        tvec = np.asarray(target)
        grid = np.real(np.einsum("i,rbij,j->br", tvec.conj(), rhos, tvec))
    lookup = {int(i): pos for pos, i in enumerate(rec_sorted)}
    cols = [lookup[int(i)] for i in rec_idx]
    return np.clip(grid[:, cols], 0.0, 1.0)


def _run_recorded_pure(params, source, psi0, dt, steps, rec_idx):
    from .dynamics import _pure_generator, _rk4_stacked

    spec = EvolutionSpec(params=params, t_final=max(steps, 1) * dt, source=source,
                         steps=max(steps, 1))
    static, freqs, mats = _pure_generator(spec)
    out = _rk4_stacked(static, freqs, mats, psi0[None, :], dt, steps, rec_idx)
    return out[:, 0, :]


def _run_recorded_lindblad(params, rho_batch, gammas, dt, steps, rec_idx):
    from .dynamics import _commutator_superops, _dissipator_superop, _rk4_stacked

    b = rho_batch.shape[0]
    freqs, mats = _commutator_superops(params)
    y0 = rho_batch.reshape(b, 81)
    if all(g == gammas[0] for g in gammas):
        static = _dissipator_superop(gammas[0]) if gammas[0] > 0 else None
        out = _rk4_stacked(static, freqs, mats, y0, dt, steps, rec_idx)
    else:
        unit = _dissipator_superop(1.0)
        out = _rk4_stacked(None, freqs, mats, y0, dt, steps, rec_idx,
                           row_mat=unit, row_scale=gammas)
    return out.reshape(len(rec_idx), b, 9, 9)


def cmd_evolve(args):
    cfg = load_config(args.config) if args.config else {"axis": []}
    params, preset = build_params(cfg)
    if not params.symmetric_drive:
        raise PhysicsError("evolve compares against the effective model and needs "
                           "omega_a = omega_b, delta_a = delta_b")
    initial, target9 = _resolve_states(cfg)
    t0 = params.optimal_time
    t_final = _get_float(cfg, "t_final", t0)
    if not (math.isfinite(t_final) and t_final > 0):
        raise ConfigError("t_final must be positive and finite")
    rows = _get_int(cfg, "rows", 401)
    if rows < 2:
        raise ConfigError("rows must be at least 2")
    default_curve = params.gamma if params.gamma > 0 else 0.001 * params.omega_b
    gamma_curve = _get_float(cfg, "gamma_curve", default_curve)
    if gamma_curve < 0:
        raise PhysicsError("gamma_curve must be non-negative")
    steps_anchor = args.steps or default_steps(params, t0, "full")

    times = np.linspace(0.0, t_final, rows)
    base0 = params.with_gamma(0.0)
    f_full = _grid_fidelities(base0, [0.0], times, target9, initial, steps_anchor)[0]
    f_gamma = _grid_fidelities(base0, [gamma_curve], times, target9, initial,
                               steps_anchor)[0]

    # effective-model curve on the 5-state space, same step grid
    psi5 = pair_state(initial, "pair5")
    tgt5 = _embed9_to5(target9)
    dt_star = t0 / steps_anchor
    rec_idx, steps = _record_plan(times, dt_star)
    rec_sorted = np.unique(rec_idx)
    out5 = _run_recorded_pure(base0, "effective", psi5, dt_star, steps, rec_sorted)
    lookup = {int(i): pos for pos, i in enumerate(rec_sorted)}
    f_eff = np.clip(np.abs(out5[[lookup[int(i)] for i in rec_idx], :]
                           @ tgt5.conj()) ** 2, 0.0, 1.0)

    rows_out = [[_fmt(t), _fmt(ff), _fmt(fe), _fmt(fg)]
                for t, ff, fe, fg in zip(times, f_full, f_eff, f_gamma)]
    target_note = cfg.get("target", "auto")
    if target_note == "auto":
        target_note = "optimal-time gate target"
    footer = _footer(params, preset, steps_anchor,
                     [f"gamma_curve: {_fmt(gamma_curve)}",
                      f"initial: {initial}", f"target: {target_note}"])
    _emit(_csv_text(["time", "f_full", "f_eff", "f_full_gamma"], rows_out, footer),
          args.out)
    return EXIT_OK


def _embed9_to5(vec9):
    from .hamiltonians import PAIR5_IN_9

    return np.asarray(vec9)[list(PAIR5_IN_9)]


def cmd_sweep(args):
    if not args.config:
        raise ConfigError("sweep requires --config with axis definitions")
    cfg = load_config(args.config)
    params, preset = build_params(cfg)
    axes = parse_axes(cfg)
    initial, target9 = _resolve_states(cfg)
    t0 = params.optimal_time
    steps_anchor = args.steps or default_steps(params, t0, "full")

    names = [name for name, _ in axes]
    values = {name: vals for name, vals in axes}
    gammas = values.get("gamma", np.array([params.gamma]))
    if np.any(gammas < 0):
        raise PhysicsError("gamma axis must be non-negative")
    domegas = values.get("delta_omega", np.array([
        (params.omega_a - params.omega_b) / params.omega_b]))
    if "delta_t" in values:
        times = values["delta_t"] * t0
    elif "time" in values:
        times = values["time"]
    else:
        times = np.array([t0])
    if np.any(times < 0):
        raise ConfigError("time axis must be non-negative")

    # results indexed [gamma, delta_omega, time]
    shape = (len(gammas), len(domegas), len(times))
    result = np.empty(shape)
    for oi, dom in enumerate(domegas):
        run_params = params.with_omega_mismatch(float(dom))
        result[:, oi, :] = _grid_fidelities(run_params, list(gammas), times,
                                            target9, initial, steps_anchor)

    axis_pos = {"gamma": 0, "delta_omega": 1, "delta_t": 2, "time": 2}
    header = names + ["fidelity"]
    rows_out = []

    def value_of(name, idx):
        raw = values[name][idx]
        return _fmt(raw)

    if len(axes) == 1:
        name = names[0]
        for i, _ in enumerate(values[name]):
            sel = [0, 0, 0]
            sel[axis_pos[name]] = i
            rows_out.append([value_of(name, i), _fmt(result[tuple(sel)])])
    else:
        n0, n1 = names
        for i in range(len(values[n0])):
            for j in range(len(values[n1])):
                sel = [0, 0, 0]
                sel[axis_pos[n0]] = i
                sel[axis_pos[n1]] = j
                rows_out.append([value_of(n0, i), value_of(n1, j),
                                 _fmt(result[tuple(sel)])])

    footer = _footer(params, preset, steps_anchor,
                     [f"initial: {initial}",
                      f"axes: {' | '.join(names)}",
                      f"t0: {_fmt(t0)}"])
    _emit(_csv_text(header, rows_out, footer), args.out)
    return EXIT_OK


def cmd_fuse(args):
    if args.m < 2 or args.n < 2:
        raise ConfigError("fusion needs m, n >= 2")
    if args.m + args.n > 12:
        raise SizeCapError(f"m + n = {args.m + args.n} exceeds the size cap of 12")
    maker = make_ghz if args.protocol == "ghz" else make_w
    reg_a = maker(args.m, "alice")
    reg_b = maker(args.n, "bob")
    if args.gate == "ideal":
        gate = ideal_gate()
        gate_note = "ideal closed-form gate at optimal time"
    else:
        params = PRESETS["physical"]()
        gate = extract_pair_channel(params, steps=args.steps)
        gate_note = "channel extracted at the physical preset"
    branches = run_fusion(reg_a, reg_b, gate, protocol=args.protocol)

    header = ["outcome", "probability", "verdict", "corrected_fidelity"]
    rows_out = []
    table = [f"fusion {args.protocol} m={args.m} n={args.n}  ({gate_note})",
             f"{'outcome':>8} {'probability':>14} {'verdict':>8} "
             f"{'corrected_fid':>14}  correction"]
    for br in branches:
        fid_s = _fmt(br.corrected_fidelity) if br.corrected_fidelity is not None else ""
        rows_out.append([br.outcome, _fmt(br.probability), br.verdict, fid_s])
        table.append(f"{br.outcome:>8} {_fmt(br.probability):>14} {br.verdict:>8} "
                     f"{fid_s:>14}  {br.correction or ''}")
    success = sum(br.probability for br in branches if br.verdict == "success")
    table.append(f"total success probability: {_fmt(success)}")
    fus_fid = fusion_fidelity(gate, args.protocol, args.m, args.n)
    table.append(f"branch-weighted gate fidelity: {_fmt(fus_fid)}")
    if args.seed is not None:
        rng = np.random.default_rng(args.seed)
        shot = sample_branch(branches, rng)
        table.append(f"sampled outcome (seed {args.seed}): {shot.outcome} "
                     f"[{shot.verdict}]")
    print("\n".join(table))
    if args.out:
        footer = [f"protocol: {args.protocol}", f"m: {args.m}", f"n: {args.n}",
                  f"gate: {args.gate}",
                  f"total_success_probability: {_fmt(success)}",
                  f"fusion_fidelity: {_fmt(fus_fid)}"]
        _emit(_csv_text(header, rows_out, footer), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rydfuse",
        description="Rydberg antiblockade pair-gate simulator and entangled-state fusion")
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--out", help="output CSV path (default: stdout)")
    parser.add_argument("--steps", type=int, help="override the integrator step count")
    parser.add_argument("--seed", type=int, help="PRNG seed for the sampling demo")
    sub = parser.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("params", help="print a parameter preset")
    p_params.add_argument("preset", help="fig2 or physical")

    sub.add_parser("evolve", help="fidelity-vs-time CSV (full, effective, dissipative)")
    sub.add_parser("sweep", help="fidelity grid over config-defined axes")

    p_fuse = sub.add_parser("fuse", help="run a fusion protocol and report branches")
    p_fuse.add_argument("protocol", choices=("ghz", "w"))
    p_fuse.add_argument("m", type=int)
    p_fuse.add_argument("n", type=int)
    p_fuse.add_argument("gate", choices=("ideal", "physical"))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.steps is not None and args.steps < 1:
        print("error: --steps must be positive", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {"params": cmd_params, "evolve": cmd_evolve,
                "sweep": cmd_sweep, "fuse": cmd_fuse}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsError, InvalidStateError, DimensionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
