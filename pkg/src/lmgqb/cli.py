"""Command-line interface: single evolutions, sweeps, universality scans,
dispersive validations, classical integrations and power-law fits.

Units are fixed here once and for all: energies in omega_z, times in
1/omega_z, powers in omega_z^2, with omega_z = 1 internally.  Every output
file is paired with a ``<output>.manifest.json`` recording the exact
invocation, so any run can be reproduced with ``lmgqb rerun``.

CSV bodies are deterministic: fixed column order, rows sorted by the
documented keys, floats rendered as shortest round-trip decimals.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import multiprocessing
import os
import sys

import numpy as np

from . import __version__, classical, dicke, dynamics, metrics, perturbation, scaling, spin

OUTDIR_ENV = "LMGQB_OUTDIR"
OMEGA_Z = 1.0


# ---------------------------------------------------------------------------
# output plumbing

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value).replace(",", ";").replace("\n", " ")


def _jsonable(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return str(value)


def _resolve_output(path: str | None, default_name: str) -> str:
    if path:
        return path
    outdir = os.environ.get(OUTDIR_ENV, ".")
    return os.path.join(outdir, default_name)


def _write_table(path: str, header: list[str], rows: list[list], fmt: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    if fmt == "json":
        records = [
            {key: _jsonable(val) for key, val in zip(header, row)} for row in rows
        ]
        with open(path, "w") as fh:
            json.dump(records, fh, indent=1)
            fh.write("\n")
    else:
        lines = [",".join(header)]
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def _write_manifest(command: str, argv: list[str], args, outputs: list[str]) -> str:
    params = {
        k: _jsonable(v)
        for k, v in vars(args).items()
        if k != "func" and not callable(v)
    }
    manifest = {
        "command": command,
        "argv": argv,
        "parameters": params,
        "version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    path = outputs[0] + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    return path


def _write_gnuplot(csv_path: str, ycols: list[tuple[int, str]], logscale: bool) -> str:
    path = csv_path + ".gp"
    lines = [
        f"# companion plot script for {csv_path}",
        'set datafile separator ","',
        "set key autotitle columnhead",
    ]
    if logscale:
        lines.append("set logscale xy")
    plots = ", ".join(
        f'"{csv_path}" using 1:{col} with linespoints title "{name}"'
        for col, name in ycols
    )
    lines.append(f"plot {plots}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _parse_n_range(text: str) -> list[int]:
    """start:stop:step with inclusive stop, e.g. 10:60:5."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected start:stop[:step]")
    start, stop = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return list(range(start, stop + 1, step))


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _n_values(args) -> list[int]:
    if args.n_list:
        return sorted(set(args.n_list))
    if args.n_range:
        return args.n_range
    raise SystemExit("one of --n-range or --n-list is required")


# ---------------------------------------------------------------------------
# commands

def cmd_evolve(args, argv) -> int:
    sector = spin.build_sector(args.n_tls)
    horizon = args.horizon
    if horizon is None:
        horizon = 10.0 * 2.0 * math.pi / dynamics.effective_frequency(
            OMEGA_Z, args.g, args.n_tls
        )
    grid = np.linspace(0.0, horizon, args.samples)
    config = dynamics.ProtocolConfig(
        omega_z=OMEGA_Z, g=args.g, t_grid=grid, tau_c=args.tau_c
    )
    traj = dynamics.run_protocol(config, sector, with_states=args.with_states)
    series = metrics.compute_metrics(traj, config)

    capacity = args.n_tls * OMEGA_Z
    header = ["t", "e_b_norm", "power_norm", "ergotropy_single", "magnetization"]
    columns = [
        grid,
        series.e_b / capacity,
        series.power / (capacity * OMEGA_Z),
        series.ergotropy_single / OMEGA_Z,
        series.magnetization,
    ]
    if args.with_perturbative:
        header += ["e_b_norm_pert", "power_norm_pert"]
        columns.append(perturbation.e_weak(grid, args.g, OMEGA_Z, args.n_tls) / capacity)
        columns.append(
            np.atleast_1d(perturbation.p_weak(grid, args.g, OMEGA_Z, args.n_tls))
            / (capacity * OMEGA_Z)
        )
    rows = [list(vals) for vals in zip(*columns)]

    out = _resolve_output(args.output, f"evolve_n{args.n_tls}.{args.format}")
    _write_table(out, header, rows, args.format)
    outputs = [out]
    if args.with_states:
        states_path = out + ".states.npz"
        np.savez(states_path, times=grid, amplitudes=traj.states)
        outputs.append(states_path)
    if args.gnuplot:
        outputs.append(_write_gnuplot(out, [(2, "e_b_norm"), (4, "ergotropy_single")], False))
    _write_manifest("evolve", argv, args, outputs)
    return 0


def _sweep_rows(outcomes) -> list[list]:
    rows = []
    for oc in sorted(outcomes, key=lambda o: (o.n_tls, o.g)):
        if oc.ok:
            s = oc.summary
            rows.append([oc.n_tls, oc.g, s.e_max, s.t_e, s.p_max, s.t_p, "ok"])
        else:
            rows.append([oc.n_tls, oc.g, None, None, None, None, oc.error])
    return rows


def cmd_sweep(args, argv) -> int:
    g_values = list(args.g_list) if args.g_list else [args.g]
    if not g_values or g_values[0] is None:
        raise SystemExit("one of --g or --g-list is required")
    n_values = _n_values(args)
    tasks = [
        (n, g, OMEGA_Z, args.horizon_periods, args.samples)
        for n in n_values
        for g in g_values
    ]
    if args.jobs > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            outcomes = pool.starmap(scaling.sweep_point, tasks)
    else:
        outcomes = [scaling.sweep_point(*t) for t in tasks]

    rows = _sweep_rows(outcomes)
    header = ["n_tls", "g", "e_max", "t_e", "p_max", "t_p", "status"]
    out = _resolve_output(args.output, f"sweep.{args.format}")
    _write_table(out, header, rows, args.format)
    outputs = [out]
    if args.gnuplot:
        outputs.append(_write_gnuplot(out, [(3, "e_max"), (5, "p_max")], True))
    _write_manifest("sweep", argv, args, outputs)
    return 0 if all(oc.ok for oc in outcomes) else 1


def cmd_universality(args, argv) -> int:
    n_values = _n_values(args)
    tasks = [(n, g, OMEGA_Z) for g in args.g_list for n in n_values]
    if args.jobs > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            rows_raw = pool.starmap(scaling.universality_point, tasks)
    else:
        rows_raw = [scaling.universality_point(*t) for t in tasks]
    rows_raw = sorted(rows_raw, key=lambda r: (r.big_g, r.g, r.n_tls))

    header = ["g", "n_tls", "G", "e_max_norm", "e_reach_norm", "status"]
    rows = [
        [r.g, r.n_tls, r.big_g, r.e_max_norm, r.e_reach_norm, "ok" if r.ok else r.error]
        for r in rows_raw
    ]
    out = _resolve_output(args.output, f"universality.{args.format}")
    _write_table(out, header, rows, args.format)
    outputs = [out]
    if args.gnuplot:
        outputs.append(_write_gnuplot(out, [(4, "e_max_norm")], False))
    _write_manifest("universality", argv, args, outputs)

    good = [r for r in rows_raw if r.ok]
    if len({r.big_g for r in good}) >= 3:
        crossing = scaling.detect_crossover(
            np.array([r.big_g for r in good]), np.array([r.e_max_norm for r in good])
        )
        print(f"slope crossover detected near G = {crossing!r} (units of omega_z)")
    return 0 if all(r.ok for r in rows_raw) else 1


def cmd_validate_dispersive(args, argv) -> int:
    omega_cs = list(args.omega_c_list) if args.omega_c_list else [args.omega_c]
    if not omega_cs or omega_cs[0] is None:
        raise SystemExit("one of --omega-c or --omega-c-list is required")
    kind = "two" if args.two_photon else "single"
    enhancement = 2 * args.initial_photons + 1 if kind == "two" else 1

    rows = []
    all_ok = True
    for omega_c in omega_cs:
        lam = args.lam
        if args.fixed_g is not None:
            lam = math.sqrt(args.fixed_g * omega_c / (4.0 * enhancement))
        elif lam is None:
            raise SystemExit("one of --lambda or --fixed-g is required")
        try:
            config = dicke.DickeConfig(
                n_tls=args.n_tls,
                omega_z=OMEGA_Z,
                omega_c=omega_c,
                lam=lam,
                n_max=args.n_max,
                coupling_kind=kind,
                initial_photons=args.initial_photons,
            )
            report = dicke.validate_mapping(config, horizon=args.horizon, samples=args.samples)
        except (ValueError, RuntimeError) as err:
            rows.append([omega_c, lam, None, None, None, None, None, None, None, str(err)])
            all_ok = False
            continue
        status = "ok"
        if not report.truncation_ok:
            status = "truncation-leak"
            all_ok = False
        rows.append(
            [
                omega_c,
                lam,
                report.g_mapped,
                report.dev_rms,
                report.dev_max,
                report.truncation_ok,
                report.dispersive_ratio,
                report.regime_ok,
                report.e_max_rel_dev,
                status,
            ]
        )
    header = [
        "omega_c",
        "lambda",
        "g_mapped",
        "dev_rms",
        "dev_max",
        "truncation_ok",
        "dispersive_ratio",
        "regime_ok",
        "e_max_rel_dev",
        "status",
    ]
    out = _resolve_output(args.output, f"validate_dispersive.{args.format}")
    _write_table(out, header, rows, args.format)
    _write_manifest("validate-dispersive", argv, args, [out])
    return 0 if all_ok else 1


def cmd_classical(args, argv) -> int:
    initial = classical.ClassicalState(q_tilde=args.q0, p_tilde=args.p0)
    traj = classical.integrate_classical(
        initial, args.g, args.n_tls, OMEGA_Z, horizon=args.horizon, dt=args.dt
    )
    stride = max(1, len(traj.times) // args.max_rows)
    header = ["t", "q_tilde", "p_tilde", "h_cl"]
    rows = [
        [traj.times[i], traj.q_tilde[i], traj.p_tilde[i], traj.h_cl[i]]
        for i in range(0, len(traj.times), stride)
    ]
    out = _resolve_output(args.output, f"classical.{args.format}")
    _write_table(out, header, rows, args.format)
    outputs = [out]
    if args.gnuplot:
        outputs.append(_write_gnuplot(out, [(2, "q_tilde")], False))
    _write_manifest("classical", argv, args, outputs)
    return 0


def _read_table(path: str) -> tuple[list[str], list[dict]]:
    if path.endswith(".json"):
        with open(path) as fh:
            records = json.load(fh)
        header = list(records[0].keys()) if records else []
        return header, records
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    header = lines[0].split(",")
    records = [dict(zip(header, ln.split(","))) for ln in lines[1:]]
    return header, records


def cmd_fit(args, argv) -> int:
    header, records = _read_table(args.input)
    for col in (args.x_column, args.column):
        if col not in header:
            raise SystemExit(f"column {col!r} not found in {args.input} (has {header})")
    pairs = []
    for rec in records:
        if str(rec.get("status", "ok")) != "ok":
            continue
        try:
            pairs.append((float(rec[args.x_column]), float(rec[args.column])))
        except (TypeError, ValueError):
            continue
    if not pairs:
        raise SystemExit("no usable rows in input table")
    n, y = np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])
    result = scaling.fit_power_law(n, y, with_offset=args.with_offset)

    out = _resolve_output(args.output, "fit.json")
    payload = {
        "input": args.input,
        "x_column": args.x_column,
        "column": args.column,
        "a": result.a,
        "b": result.b,
        "c": result.c,
        "residual": result.residual,
        "model_kind": result.model_kind,
        "points": len(pairs),
    }
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    with open(out, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    _write_manifest("fit", argv, args, [out])
    print(f"{args.column} ~ a*N^b: a={result.a!r} b={result.b!r} c={result.c!r}")
    return 0


def cmd_rerun(args, argv) -> int:
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    stored_argv = manifest["argv"]
    print(f"rerunning: lmgqb {' '.join(stored_argv)}")
    return main(stored_argv)


# ---------------------------------------------------------------------------
# parser

def _add_output_opts(sub, default_format="csv"):
    sub.add_argument("--output", help="output file (default: into $LMGQB_OUTDIR)")
    sub.add_argument("--format", choices=("csv", "json"), default=default_format)
    sub.add_argument("--gnuplot", action="store_true", help="emit a companion plot script")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmgqb",
        description=(
            "Collective-spin quantum battery simulator. Energies in units of "
            "omega_z, times in 1/omega_z, powers in omega_z^2."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    ev = subs.add_parser("evolve", help="time series for one (N, g) point")
    ev.add_argument("--n-tls", type=int, required=True)
    ev.add_argument("--g", type=float, required=True, help="coupling in units of omega_z")
    ev.add_argument("--horizon", type=float, default=None,
                    help="evolution horizon (default: 10 periods of max(omega_z, g*N))")
    ev.add_argument("--samples", type=int, default=2000)
    ev.add_argument("--tau-c", type=float, default=math.inf,
                    help="switch-off time (default: never)")
    ev.add_argument("--with-states", action="store_true",
                    help="also store state amplitudes in <output>.states.npz")
    ev.add_argument("--with-perturbative", action="store_true",
                    help="add weak-coupling overlay columns")
    _add_output_opts(ev)
    ev.set_defaults(func=cmd_evolve)

    sw = subs.add_parser("sweep", help="charging summaries over (N, g)")
    sw.add_argument("--g", type=float, default=None)
    sw.add_argument("--g-list", type=_parse_float_list, default=None)
    sw.add_argument("--n-range", type=_parse_n_range, default=None,
                    help="start:stop:step, stop inclusive")
    sw.add_argument("--n-list", type=lambda s: [int(x) for x in s.split(",")], default=None)
    sw.add_argument("--horizon-periods", type=float, default=10.0)
    sw.add_argument("--samples", type=int, default=2000)
    sw.add_argument("--jobs", type=int, default=1)
    _add_output_opts(sw)
    sw.set_defaults(func=cmd_sweep)

    un = subs.add_parser("universality", help="collapse table in G = g*N")
    un.add_argument("--g-list", type=_parse_float_list, required=True)
    un.add_argument("--n-range", type=_parse_n_range, default=None)
    un.add_argument("--n-list", type=lambda s: [int(x) for x in s.split(",")], default=None)
    un.add_argument("--jobs", type=int, default=1)
    _add_output_opts(un)
    un.set_defaults(func=cmd_universality)

    va = subs.add_parser("validate-dispersive", help="full Dicke vs mapped spin model")
    va.add_argument("--n-tls", type=int, required=True)
    va.add_argument("--omega-c", type=float, default=None)
    va.add_argument("--omega-c-list", type=_parse_float_list, default=None)
    va.add_argument("--lambda", dest="lam", type=float, default=None)
    va.add_argument("--fixed-g", type=float, default=None,
                    help="hold the mapped g fixed by solving for lambda per omega_c")
    va.add_argument("--two-photon", action="store_true")
    va.add_argument("--initial-photons", type=int, default=0)
    va.add_argument("--n-max", type=int, default=16)
    va.add_argument("--horizon", type=float, default=None)
    va.add_argument("--samples", type=int, default=4001)
    _add_output_opts(va)
    va.set_defaults(func=cmd_validate_dispersive)

    cl = subs.add_parser("classical", help="integrate the classical limit")
    cl.add_argument("--g", type=float, required=True)
    cl.add_argument("--n-tls", type=int, required=True)
    cl.add_argument("--horizon", type=float, required=True)
    cl.add_argument("--dt", type=float, default=None)
    cl.add_argument("--q0", type=float, default=-1.0 + classical.DEFAULT_SEED_DISPLACEMENT)
    cl.add_argument("--p0", type=float, default=0.0)
    cl.add_argument("--max-rows", type=int, default=10000,
                    help="decimate output to at most this many rows")
    _add_output_opts(cl)
    cl.set_defaults(func=cmd_classical)

    ft = subs.add_parser("fit", help="power-law fit of a sweep column")
    ft.add_argument("--input", required=True)
    ft.add_argument("--column", required=True)
    ft.add_argument("--x-column", default="n_tls")
    ft.add_argument("--with-offset", action="store_true")
    ft.add_argument("--output", default=None)
    ft.set_defaults(func=cmd_fit)

    rr = subs.add_parser("rerun", help="reproduce a run from its manifest")
    rr.add_argument("--manifest", required=True)
    rr.set_defaults(func=cmd_rerun)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    argv_list = list(sys.argv[1:]) if argv is None else list(argv)
    return args.func(args, argv_list)


if __name__ == "__main__":
    sys.exit(main())
