"""Command-line front end.

Subcommands: check, run, fit-debye, soil-model, apparent, doi, breakdown.
Data goes to files or standard output; progress and diagnostics go to
standard error.  Exit codes: 0 success, 1 I/O error, 2 validation or
argument error, 3 non-finite fields mid-run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .breakdown import (DisruptiveEffectModel, LeaderProgressionModel,
                        evaluate_breakdown)
from .engine import RunConfig, build_simulation
from .errors import (ComputationError, EmfdtdError, FitError, ParameterError,
                     RunAborted, ValidationError)
from .model import load_model, parse, validate
from .probes import CsvRecorder, read_probe_csv
from .soil import (ElectrodeArray, PsoSettings, SoilSampleSet, apparent_from_vi,
                   depth_of_investigation, fit_debye, soil_model_properties,
                   soil_model_sweep)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def cmd_check(args) -> int:
    try:
        text = _read_text(args.model)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    commands, diags = parse(text)
    if not diags:
        try:
            validate(commands)
        except ValidationError as exc:
            diags = exc.diagnostics
    if diags:
        for d in diags:
            print(d.format(args.model), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_run(args) -> int:
    config = RunConfig(
        model_path=args.model,
        output_path=args.output,
        threads=args.threads,
        cfl_override=args.cfl,
        progress=args.progress,
    )
    try:
        model = load_model(config.model_path)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        for d in exc.diagnostics:
            print(d.format(config.model_path), file=sys.stderr)
        return EXIT_INVALID
    sim = build_simulation(model, cfl_override=config.cfl_override)
    try:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as f:
            recorder = CsvRecorder(f, sim.probe_names, sim.spec.dt)
            sim.run(
                threads=config.threads,
                on_record=recorder.record,
                progress=config.progress,
            )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RunAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _load_sweep_csv(path: str) -> SoilSampleSet:
    """CSV columns freq,sigma,eps_r -> complex permittivity samples."""
    rows = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            parts = [float(p) for p in line.split(",")]
            rows.append(parts)
    if not rows:
        raise FitError(f"no samples in {path}")
    from .constants import EPS0

    freqs, eps = [], []
    for f_hz, sigma, eps_r in rows:
        w = 2.0 * math.pi * f_hz
        freqs.append(f_hz)
        eps.append(eps_r - 1j * sigma / (w * EPS0))
    return SoilSampleSet(freqs=tuple(freqs), eps=tuple(eps))


def cmd_fit_debye(args) -> int:
    sigma0 = args.sigma0
    if args.csv:
        try:
            samples = _load_sweep_csv(args.csv)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        freqs = np.logspace(math.log10(args.fmin), math.log10(args.fmax), args.points)
        samples = soil_model_sweep(args.soil_model, args.rho0, freqs)
        if sigma0 is None:
            sigma0 = 1.0 / args.rho0
    settings = PsoSettings(
        particles=args.particles,
        iterations=args.iterations,
        inertia=args.inertia,
        cognitive=args.cognitive,
        social=args.social,
        tau_bounds=(args.tau_min, args.tau_max),
    )
    fit = fit_debye(samples, args.poles, seed=args.seed, settings=settings,
                    sigma0=sigma0)
    print(f"sigma0, mS/m    {fit.sigma0 * 1e3:.3f}")
    print(f"eps_inf         {fit.eps_inf:.3f}")
    for p, (de, tau) in enumerate(fit.poles, start=1):
        print(f"d_eps{p}          {de:.3f}")
        print(f"tau{p}, s         {tau:.3e}")
    print(f"residual (rel)  {fit.residual:.3e}")
    if fit.warning:
        print(f"warning: {fit.warning}", file=sys.stderr)
    return EXIT_OK


def cmd_soil_model(args) -> int:
    if args.sweep:
        fmin, fmax, points = args.sweep
        freqs = np.logspace(math.log10(fmin), math.log10(fmax), int(points))
        print("freq,sigma,eps_r")
        for f in freqs:
            sigma, eps_r = soil_model_properties(args.soil_model, args.rho0, float(f))
            print(f"{f:.9e},{sigma:.9e},{eps_r:.9e}")
        return EXIT_OK
    sigma, eps_r = soil_model_properties(args.soil_model, args.rho0, args.freq)
    print(f"sigma, S/m  {sigma:.6e}")
    print(f"eps_r       {eps_r:.6f}")
    return EXIT_OK


def _array_from_args(args) -> ElectrodeArray:
    if args.array == "general4":
        if args.positions is None:
            raise ParameterError("general4 needs --positions x1,y1,...,x4,y4")
        vals = [float(v) for v in args.positions.split(",")]
        if len(vals) != 8:
            raise ParameterError("--positions needs 8 comma-separated values")
        pos = tuple((vals[i], vals[i + 1]) for i in range(0, 8, 2))
        return ElectrodeArray(kind="general4", positions=pos)
    kind = args.array.replace("-", "_")
    return ElectrodeArray(kind=kind, a=args.a, n=args.n)


def cmd_apparent(args) -> int:
    try:
        names, data = read_probe_csv(args.csv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for col in (args.voltage_col, args.current_col):
        if col not in names:
            raise ParameterError(f"column {col!r} not in {args.csv}")
    t = data[:, names.index("time")]
    v = data[:, names.index(args.voltage_col)]
    i = data[:, names.index(args.current_col)]
    dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    array = _array_from_args(args)
    freqs = None
    if args.fmax is not None:
        base = np.fft.rfftfreq(v.size, dt)[1:]
        freqs = base[base <= args.fmax]
    table = apparent_from_vi(v, i, array, dt, freqs=freqs)
    print("freq,rho_a,eps_a,valid")
    for f, r, e, ok in zip(table.freqs, table.rho_a, table.eps_a, table.valid):
        print(f"{f:.9e},{r:.9e},{e:.9e},{int(ok)}")
    return EXIT_OK


def cmd_doi(args) -> int:
    value = depth_of_investigation(args.a, args.n, method=args.method)
    print(f"{value:.6f}")
    return EXIT_OK


def cmd_breakdown(args) -> int:
    try:
        names, data = read_probe_csv(args.csv)
        params = json.loads(_read_text(args.params))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.column not in names:
        raise ParameterError(f"column {args.column!r} not in {args.csv}")
    t = data[:, names.index("time")]
    v = data[:, names.index(args.column)]
    dt = float(t[1] - t[0]) if t.size > 1 else 1.0
    kind = params.pop("kind", "disruptive_effect")
    if kind == "disruptive_effect":
        model = DisruptiveEffectModel(**params)
    elif kind == "leader_progression":
        model = LeaderProgressionModel(**params)
    else:
        raise ParameterError(f"unknown breakdown model kind {kind!r}")
    t_bd = evaluate_breakdown(v, dt, model)
    print("none" if t_bd is None else f"{t_bd:.9e}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emfdtd",
        description="FDTD electromagnetic transient solver and soil toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a model file and write probe CSV")
    p.add_argument("model")
    p.add_argument("--output", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--cfl", type=float, default=None)
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("fit-debye", help="fit Debye parameters to a spectrum")
    p.add_argument("--csv", help="input CSV with columns freq,sigma,eps_r")
    p.add_argument("--model", dest="soil_model", choices=["messier", "alipio_visacro", "portela"])
    p.add_argument("--rho0", type=float)
    p.add_argument("--fmin", type=float, default=100.0)
    p.add_argument("--fmax", type=float, default=4e6)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--poles", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma0", type=float, default=None)
    p.add_argument("--particles", type=int, default=40)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--inertia", type=float, default=0.7)
    p.add_argument("--cognitive", type=float, default=1.5)
    p.add_argument("--social", type=float, default=1.5)
    p.add_argument("--tau-min", type=float, default=1e-9)
    p.add_argument("--tau-max", type=float, default=1e-3)
    p.set_defaults(func=cmd_fit_debye)

    p = sub.add_parser("soil-model", help="evaluate a soil model")
    p.add_argument("soil_model", choices=["messier", "alipio_visacro", "portela"])
    p.add_argument("--rho0", type=float, required=True)
    p.add_argument("--freq", type=float)
    p.add_argument("--sweep", nargs=3, type=float, metavar=("FMIN", "FMAX", "POINTS"))
    p.set_defaults(func=cmd_soil_model)

    p = sub.add_parser("apparent", help="apparent soil properties from V/I CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--voltage-col", default="voltage0")
    p.add_argument("--current-col", default="current0")
    p.add_argument("--array", choices=["wenner", "dipole-dipole", "general4"], required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--positions")
    p.add_argument("--fmax", type=float, default=None)
    p.set_defaults(func=cmd_apparent)

    p = sub.add_parser("doi", help="depth of investigation of a dipole-dipole array")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["roy_apparao", "barker"], default="roy_apparao")
    p.set_defaults(func=cmd_doi)

    p = sub.add_parser("breakdown", help="evaluate breakdown on a probe CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--column", default="voltage0")
    p.add_argument("--params", required=True, help="JSON model-parameter file")
    p.set_defaults(func=cmd_breakdown)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FitError, ComputationError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RunAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except EmfdtdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
