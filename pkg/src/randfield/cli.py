"""Command-line pipeline driver.

Subcommands cover the full loop: ``simulate`` draws field realizations,
``microstructure`` builds Voronoi surrogates, ``project`` grids scattered
data, ``periodogram`` trims and averages realizations into a PSD estimate,
``fit`` identifies model parameters, ``homogeneity`` checks the ensemble,
and ``report`` emits empirical-vs-fitted cut tables for plotting.

Every run writes a ``manifest.json`` (subcommand, parameters, package
version, seed) next to its outputs so any result can be reproduced
exactly. Exit codes: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .diagnostics import homogeneity_curves
from .fitting import FitOptions, fit_psd, select_model
from .grid import (Ensemble, GridField, GridSpec, load_grid, load_scattered,
                   project_scattered, save_grid, trim_margin)
from .microstructure import (sample_orientations, surrogate_stress_field,
                             voronoi_tessellation)
from .models import (FAMILIES, load_model, model_from_dict, model_to_dict)
from .spectral import Periodogram, average_periodogram
from .synthesis import METHODS, SynthesisPlan, simulate_ensemble
from .windows import WINDOW_KINDS

_FMT = "%.17g"


def _threads_default() -> int:
    env = os.environ.get("RFID_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _out_dir(out: str, is_dir: bool) -> Path:
    path = Path(out)
    d = path if is_dir else (path.parent if str(path.parent) else Path("."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write_manifest(directory: Path, subcommand: str, params: dict) -> None:
    manifest = {
        "package": "randfield",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": params,
    }
    with open(directory / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_ensemble(directory: str) -> Ensemble:
    paths = sorted(Path(directory).glob("*.rfg"))
    if not paths:
        raise ValueError(f"no .rfg files in {directory}")
    return Ensemble(tuple(load_grid(p) for p in paths),
                    tuple(p.name for p in paths))


def save_periodogram(p: Periodogram, path) -> None:
    """RFGRID file on the frequency grid plus a key=value sidecar."""
    fx, fy = p.freq_x(), p.freq_y()
    spec = GridSpec(p.spec.nx, p.spec.ny, float(fx[1] - fx[0]), float(fy[1] - fy[0]),
                    float(fx[0]), float(fy[0]))
    save_grid(GridField(spec, p.values), path)
    with open(str(path) + ".meta", "w") as fh:
        fh.write(f"window={p.window}\n")
        fh.write(f"n_averaged={p.n_averaged}\n")
        fh.write(f"demean={int(p.demean)}\n")
        fh.write(f"dx={_FMT % p.spec.dx}\n")
        fh.write(f"dy={_FMT % p.spec.dy}\n")
        fh.write(f"origin_x={_FMT % p.spec.origin_x}\n")
        fh.write(f"origin_y={_FMT % p.spec.origin_y}\n")


def load_periodogram(path) -> Periodogram:
    g = load_grid(path)
    meta: dict[str, str] = {}
    with open(str(path) + ".meta") as fh:
        for line in fh:
            line = line.strip()
            if line:
                key, _, val = line.partition("=")
                meta[key] = val
    dx, dy = float(meta["dx"]), float(meta["dy"])
    spec = GridSpec(g.spec.nx, g.spec.ny, dx, dy,
                    float(meta.get("origin_x", "0")), float(meta.get("origin_y", "0")))
    p = Periodogram(spec, g.values, meta.get("window", "blackman"),
                    int(meta.get("n_averaged", "1")), bool(int(meta.get("demean", "1"))))
    if not math.isclose(g.spec.dx, p.freq_x()[1] - p.freq_x()[0], rel_tol=1e-9):
        raise ValueError(f"{path}: frequency spacing inconsistent with sidecar dx")
    return p


def _grid_spec_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--nx", type=int, required=True)
    sub.add_argument("--ny", type=int, required=True)
    sub.add_argument("--dx", type=float, required=True)
    sub.add_argument("--dy", type=float, required=True)
    sub.add_argument("--origin-x", type=float, default=0.0)
    sub.add_argument("--origin-y", type=float, default=0.0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfid",
        description="Identify and simulate homogeneous 2D Gaussian random fields.")
    parser.add_argument("--version", action="version", version=f"rfid {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("simulate", help="draw field realizations from a model")
    p.add_argument("--model", required=True, help="model parameter JSON file")
    _grid_spec_args(p)
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--method", choices=METHODS, default="circulant-embedding")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--embedding-factor", type=int, default=2)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")

    p = subs.add_parser("microstructure", help="Voronoi aggregate and surrogate stress field")
    p.add_argument("--grains", type=int, required=True)
    _grid_spec_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--literal-uniform-phi", action="store_true",
                   help="sample Phi uniformly on [0, pi] instead of sphere-uniform")
    p.add_argument("--surrogate", help="surrogate parameter JSON "
                   "(base_mean, schmid_gain, intra_model)")
    p.add_argument("--out", required=True, help="output directory")

    p = subs.add_parser("project", help="project scattered CSV data onto a grid")
    p.add_argument("--input", required=True, help="CSV with header x,y,value")
    _grid_spec_args(p)
    p.add_argument("--method", choices=("nearest", "idw"), default="idw")
    p.add_argument("--power", type=float, default=2.0)
    p.add_argument("--neighbors", type=int, default=4)
    p.add_argument("--out", required=True, help="output RFGRID file")

    p = subs.add_parser("periodogram", help="averaged modified periodogram of a directory "
                        "of RFGRID realizations")
    p.add_argument("--input", required=True, help="directory of .rfg files")
    p.add_argument("--window", choices=("rect",) + WINDOW_KINDS, default="blackman")
    demean = p.add_mutually_exclusive_group()
    demean.add_argument("--demean", dest="demean", action="store_true", default=True)
    demean.add_argument("--no-demean", dest="demean", action="store_false")
    p.add_argument("--trim", type=float, default=0.1,
                   help="margin fraction discarded per edge before analysis")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", required=True, help="output periodogram file")

    p = subs.add_parser("fit", help="fit PSD model families to a periodogram")
    p.add_argument("--periodogram", required=True)
    p.add_argument("--family", action="append", choices=FAMILIES, required=True,
                   help="model family; repeat to select the best of several")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multistarts", type=int, default=8)
    p.add_argument("--max-iterations", type=int, default=200)
    p.add_argument("--out", required=True, help="output JSON report")

    p = subs.add_parser("homogeneity", help="CV convergence curves of ensemble moments")
    p.add_argument("--input", required=True, help="directory of .rfg files")
    p.add_argument("--out", required=True, help="output directory")

    p = subs.add_parser("report", help="empirical vs fitted periodogram cut tables")
    p.add_argument("--fit", required=True, help="fit JSON from the fit subcommand")
    p.add_argument("--periodogram", required=True)
    p.add_argument("--cuts", default="x,y,diag", help="comma list from {x, y, diag}")
    p.add_argument("--out", required=True, help="output CSV file")
    return parser


def _cmd_simulate(args) -> int:
    model = load_model(args.model)
    spec = GridSpec(args.nx, args.ny, args.dx, args.dy, args.origin_x, args.origin_y)
    plan = SynthesisPlan(model, spec, args.method, args.mean, args.seed,
                         args.embedding_factor)
    workers = args.threads if args.threads is not None else _threads_default()
    ens = simulate_ensemble(plan, args.count, workers=workers)
    out = _out_dir(args.out, is_dir=True)
    for i, f in enumerate(ens.fields, start=1):
        save_grid(f, out / f"real_{i:04d}.rfg")
    _write_manifest(out, "simulate", {
        "model": model_to_dict(model), "nx": args.nx, "ny": args.ny,
        "dx": args.dx, "dy": args.dy, "origin_x": args.origin_x,
        "origin_y": args.origin_y, "mean": args.mean, "method": args.method,
        "seed": args.seed, "count": args.count,
        "embedding_factor": args.embedding_factor})
    return 0


def _cmd_microstructure(args) -> int:
    spec = GridSpec(args.nx, args.ny, args.dx, args.dy, args.origin_x, args.origin_y)
    tess = voronoi_tessellation(args.grains, spec, args.seed)
    oris = sample_orientations(args.grains, args.seed,
                               sphere_uniform=not args.literal_uniform_phi)
    out = _out_dir(args.out, is_dir=True)
    save_grid(GridField(spec, tess.grain_map.astype(float)), out / "grains.rfg")
    with open(out / "orientations.csv", "w") as fh:
        fh.write("grain,phi1,Phi,phi2\n")
        for i, o in enumerate(oris):
            fh.write(f"{i},{_FMT % o.phi1},{_FMT % o.Phi},{_FMT % o.phi2}\n")
    params = {"grains": args.grains, "nx": args.nx, "ny": args.ny, "dx": args.dx,
              "dy": args.dy, "origin_x": args.origin_x, "origin_y": args.origin_y,
              "seed": args.seed, "literal_uniform_phi": args.literal_uniform_phi}
    if args.surrogate:
        with open(args.surrogate) as fh:
            sur = json.load(fh)
        field = surrogate_stress_field(
            tess, oris, float(sur["base_mean"]), float(sur["schmid_gain"]),
            model_from_dict(sur["intra_model"]), seed=args.seed)
        save_grid(field, out / "surrogate.rfg")
        params["surrogate"] = sur
    _write_manifest(out, "microstructure", params)
    return 0


def _cmd_project(args) -> int:
    data = load_scattered(args.input)
    spec = GridSpec(args.nx, args.ny, args.dx, args.dy, args.origin_x, args.origin_y)
    field = project_scattered(data, spec, args.method, args.power, args.neighbors)
    out = Path(args.out)
    _out_dir(args.out, is_dir=False)
    save_grid(field, out)
    _write_manifest(out.parent, "project", {
        "input": args.input, "nx": args.nx, "ny": args.ny, "dx": args.dx,
        "dy": args.dy, "origin_x": args.origin_x, "origin_y": args.origin_y,
        "method": args.method, "power": args.power, "neighbors": args.neighbors})
    return 0


def _cmd_periodogram(args) -> int:
    window = "rectangular" if args.window == "rect" else args.window
    ens = _load_ensemble(args.input)
    trimmed = Ensemble(tuple(trim_margin(f, args.trim) for f in ens.fields), ens.labels)
    workers = args.threads if args.threads is not None else _threads_default()
    pgram = average_periodogram(trimmed, window, args.demean, workers=workers)
    out = Path(args.out)
    _out_dir(args.out, is_dir=False)
    save_periodogram(pgram, out)
    _write_manifest(out.parent, "periodogram", {
        "input": args.input, "window": args.window, "demean": args.demean,
        "trim": args.trim, "n_realizations": len(ens)})
    return 0


def _cmd_fit(args) -> int:
    pgram = load_periodogram(args.periodogram)
    options = FitOptions(max_iterations=args.max_iterations,
                         n_multistarts=args.multistarts, seed=args.seed)
    families = args.family
    result = (fit_psd(pgram, families[0], options) if len(families) == 1
              else select_model(pgram, families, options))
    report = {
        "family": result.model.family,
        "parameters": {n: getattr(result.model, n) for n in result.model.param_names()},
        "epsilon": result.epsilon,
        "iterations": result.iterations,
        "converged": result.converged,
        "start_index": result.start_index,
        "zero_bin_excluded": pgram.demean,
        "options": {"max_iterations": options.max_iterations,
                    "damping_init": options.damping_init,
                    "parameter_tolerance": options.parameter_tolerance,
                    "residual_tolerance": options.residual_tolerance,
                    "n_multistarts": options.n_multistarts,
                    "seed": options.seed},
    }
    out = Path(args.out)
    _out_dir(args.out, is_dir=False)
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out.parent, "fit", {
        "periodogram": args.periodogram, "families": families, "seed": args.seed,
        "multistarts": args.multistarts, "max_iterations": args.max_iterations})
    return 0


def _fmt_cv(v: float) -> str:
    return "n/a" if math.isnan(v) else _FMT % v


def _cmd_homogeneity(args) -> int:
    ens = _load_ensemble(args.input)
    report = homogeneity_curves(ens)
    out = _out_dir(args.out, is_dir=True)
    with open(out / "curves.csv", "w") as fh:
        fh.write("K,cv_mean,cv_var\n")
        for k, cm, cv in zip(report.k_values, report.cv_mean, report.cv_var):
            fh.write(f"{k},{_fmt_cv(cm)},{_fmt_cv(cv)}\n")
    save_grid(report.final_mean_field, out / "mean_field.rfg")
    save_grid(report.final_var_field, out / "var_field.rfg")
    _write_manifest(out, "homogeneity", {
        "input": args.input, "n_realizations": len(ens),
        "frac_decreasing_mean": report.frac_decreasing_mean,
        "frac_decreasing_var": report.frac_decreasing_var})
    return 0


def _cmd_report(args) -> int:
    with open(args.fit) as fh:
        fit = json.load(fh)
    model = model_from_dict({"family": fit["family"], **fit["parameters"]})
    pgram = load_periodogram(args.periodogram)
    from .models import psd_eval  # local import keeps module deps one-way
    fx, fy = pgram.freq_x(), pgram.freq_y()
    cuts = [c.strip() for c in args.cuts.split(",") if c.strip()]
    unknown = [c for c in cuts if c not in ("x", "y", "diag")]
    if unknown:
        raise ValueError(f"unknown cuts: {unknown}")
    ic, jc = pgram.spec.nx // 2, pgram.spec.ny // 2
    rows = []
    for cut in cuts:
        if cut == "x":
            for i in range(pgram.spec.nx):
                rows.append(("x", fx[i], fy[jc], pgram.values[jc, i]))
        elif cut == "y":
            for j in range(pgram.spec.ny):
                rows.append(("y", fx[ic], fy[j], pgram.values[j, ic]))
        else:
            for k in range(min(pgram.spec.nx, pgram.spec.ny)):
                rows.append(("diag", fx[k], fy[k], pgram.values[k, k]))
    out = Path(args.out)
    _out_dir(args.out, is_dir=False)
    with open(out, "w") as fh:
        fh.write("cut,fx,fy,empirical,fitted\n")
        for cut, gx, gy, emp in rows:
            fitted = float(psd_eval(model, gx, gy))
            fh.write(f"{cut},{_FMT % gx},{_FMT % gy},{_FMT % emp},{_FMT % fitted}\n")
    _write_manifest(out.parent, "report", {
        "fit": args.fit, "periodogram": args.periodogram, "cuts": cuts})
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "microstructure": _cmd_microstructure,
    "project": _cmd_project,
    "periodogram": _cmd_periodogram,
    "fit": _cmd_fit,
    "homogeneity": _cmd_homogeneity,
    "report": _cmd_report,
}


def run(argv) -> int:
    """Execute one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return _COMMANDS[args.subcommand](args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"rfid {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
