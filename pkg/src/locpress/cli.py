"""Command-line front end.

Four subcommands: `pressure` (transfer data over a coefficient grid),
`rotset` (rotation cloud + hull as CSV, with an SVG figure in the
planar case), `localized` (direct sweeps and/or dual solves with an
optional cross-check), and `gallery` (the bundled worked examples with
their claim reports and the reference figure).

Exit codes: 0 success, 1 claim failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings as _warnings

import numpy as np

from .gallery import run_gallery
from .localized import (
    LocalizedQuery,
    UnsupportedQueryError,
    direct_count,
    localized_entropy_dual,
    variational_check,
)
from .potentials import FishPotential, fish_class_potential
from .report import ConfigError, RunConfig, cloud_rows, render_rotation_figure, write_csv
from .rotation import convex_hull, fish_vertices, rotation_cloud, vertex_orbit_generator
from .shift import TransitionSystem
from .transfer import PotentialFamily, pressure_detail

USAGE_EXIT = 2


def _out_path(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _load_config(args) -> RunConfig:
    if args.config is None:
        return RunConfig({})
    return RunConfig.load(args.config)


def _resolve_system(args, config: RunConfig) -> TransitionSystem:
    if args.system is not None:
        return TransitionSystem.preset(args.system)
    return config.system()


def _resolve_potential(args, config: RunConfig, ts: TransitionSystem):
    spec = args.potential
    if spec is None:
        return config.potential(ts)
    if spec == "zero":
        from .potentials import constant

        return constant(ts, 0.0)
    if spec == "fish-figure1":
        return FishPotential.figure1()
    if spec.startswith("indicator:"):
        from .potentials import indicator

        word = tuple(int(c) for c in spec.split(":", 1)[1])
        return indicator(ts, word)
    raise ConfigError(
        f"unknown potential spec {spec!r}; use zero, fish-figure1, indicator:WORD, "
        "or a config file"
    )


def cmd_pressure(args) -> int:
    config = _load_config(args)
    ts = _resolve_system(args, config)
    pot = _resolve_potential(args, config, ts)
    if isinstance(pot, FishPotential):
        print("pressure works on locally constant potentials; use a truncation",
              file=sys.stderr)
        return USAGE_EXIT
    grid = config.floats("pressure", "t_grid", args.t_grid)
    if not grid:
        grid = [0.0]
    rows = []
    if pot.dim == 1 and all(isinstance(g, float) for g in grid):
        coeff_rows = [[g] for g in grid]
    else:
        coeff_rows = [list(np.full(pot.dim, g)) for g in grid]
    family = PotentialFamily(ts, [pot]) if _is_mixing_quiet(ts) else None
    for coeffs in coeff_rows:
        t = np.asarray(coeffs, dtype=float)
        if family is not None:
            mu = family.equilibrium(t)
            rv = family.moments(mu)
            rows.append((*t, mu.pressure, mu.entropy, *rv))
        else:
            from .potentials import affine_combination

            detail = pressure_detail(ts, affine_combination(ts, [(t, pot)]))
            rows.append((*t, detail.value, math.nan, *([math.nan] * pot.dim)))
    header = [f"t{i+1}" for i in range(pot.dim)] + ["pressure", "entropy"] + [
        f"rv{i+1}" for i in range(pot.dim)
    ]
    path = _out_path(args.out, "pressure.csv")
    write_csv(path, header, rows, comments=[f"seed={args.seed}"])
    print(path)
    return 0


def _is_mixing_quiet(ts) -> bool:
    from .shift import is_mixing

    return is_mixing(ts)


def cmd_rotset(args) -> int:
    config = _load_config(args)
    ts = _resolve_system(args, config)
    pot = _resolve_potential(args, config, ts)
    points = int(config.get("rotset", "points", args.points))
    max_period = int(config.get("rotset", "max_period", args.max_period))
    fan_j_max = int(config.get("rotset", "fan_j_max", args.fan_j_max))
    want_fan = args.fan or str(config.get("rotset", "fan", "no")).lower() in ("yes", "true", "1")

    extras = []
    if isinstance(pot, FishPotential):
        extras = [vertex_orbit_generator(pot.geometry, i, j)
                  for i in (1, 2) for j in range(pot.alpha + 1, max_period + 1)]
        extras.append((0, 0, 0, 2, 2, 2))
    enumerate_period = max_period
    est = ts.alphabet_size ** enumerate_period / max(enumerate_period, 1)
    while enumerate_period > 2 and est > 4 * points + 50_000:
        enumerate_period -= 1
        est = ts.alphabet_size ** enumerate_period / enumerate_period
    cloud = rotation_cloud(ts, pot, enumerate_period, extra_generators=extras)
    if len(cloud) < points:
        cloud = rotation_cloud(ts, pot, max_period, limit=max(points, len(cloud)),
                               extra_generators=extras)
    header, rows = cloud_rows(cloud)
    csv_path = _out_path(args.out, "rotset.csv")
    write_csv(csv_path, header, rows, comments=[f"seed={args.seed}",
                                                f"potential={cloud.potential_id}"])
    print(csv_path)
    if cloud.dim == 2:
        hull = convex_hull(cloud.points)
        fan = None
        curve = None
        if isinstance(pot, FishPotential):
            curve = pot.geometry
            if want_fan:
                fan = fish_vertices(pot.geometry, fan_j_max)
        svg_path = _out_path(args.out, "rotset.svg")
        render_rotation_figure(svg_path, cloud, hull=hull, fan=fan, curve=curve,
                               title=f"rotation set ({len(cloud)} orbit points)")
        print(svg_path)
        hull_header = [f"coord{i+1}" for i in range(2)]
        write_csv(_out_path(args.out, "rotset_hull.csv"), hull_header,
                  [tuple(map(float, v)) for v in hull.vertices],
                  comments=[f"area={hull.area!r}"])
    else:
        print("figure skipped: cloud dimension is not 2", file=sys.stderr)
    return 0


def cmd_localized(args) -> int:
    config = _load_config(args)
    ts = _resolve_system(args, config)
    pot = _resolve_potential(args, config, ts)
    w = config.floats("localized", "w", args.w)
    if not w:
        print("localized needs --w (or [localized] w in the config)", file=sys.stderr)
        return USAGE_EXIT
    r_values = config.floats("localized", "r", args.r) or [0.05]
    depths = config.ints("localized", "depth", args.depth) or [1]
    horizons = config.ints("localized", "horizons", args.nmax) or [8, 12, 16, 20]
    bins = int(config.get("localized", "bins", args.bins))
    grid = int(config.get("localized", "grid", args.grid))

    mode = args.mode or str(config.get("localized", "mode", "both"))
    rows = []
    wrote = []
    if mode in ("direct", "both", "check"):
        tasks = []
        for r in r_values:
            for k in depths:
                query = LocalizedQuery(ts, None, pot, w, r, depth=k,
                                       horizons=tuple(horizons), bin_divisor=bins)
                for n in horizons:
                    tasks.append((n, k, r, query))

        def run_task(task):
            n, k, r, query = task
            try:
                bracket = direct_count(query, n)
            except UnsupportedQueryError as exc:
                return (n, k, r, None, str(exc))
            lo, hi = bracket.rates(n)
            return (n, k, r, (lo, hi), None)

        if args.threads > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                results = list(pool.map(run_task, tasks))
        else:
            results = [run_task(t) for t in tasks]
        for n, k, r, rates, err in results:
            if rates is None:
                print(f"direct count skipped (n={n}, k={k}): {err}", file=sys.stderr)
            else:
                rows.append((n, k, r, rates[0], rates[1]))
        path = _out_path(args.out, "localized_direct.csv")
        write_csv(path, ["n", "k", "r", "lower_rate", "upper_rate"], rows,
                  comments=[f"seed={args.seed}", f"w={' '.join(map(str, w))}"])
        wrote.append(path)

    if mode in ("dual", "both", "check"):
        dual_rows = []
        try:
            if isinstance(pot, FishPotential):
                cls_pot = fish_class_potential(pot, min(pot.truncation_depth, 6))
                cls_ts = TransitionSystem.preset("full2")
                res = localized_entropy_dual(cls_ts, cls_pot, w)
            else:
                res = localized_entropy_dual(ts, pot, w)
        except ValueError as exc:
            print(f"dual solve refused: {exc}", file=sys.stderr)
            return 1
        dual_rows.append((*w, *res.t_star, res.value, res.converged, res.iterations))
        header = [f"w{i+1}" for i in range(len(w))] + \
                 [f"t{i+1}" for i in range(len(res.t_star))] + \
                 ["value", "converged", "iters"]
        path = _out_path(args.out, "localized_dual.csv")
        write_csv(path, header, dual_rows, comments=[f"seed={args.seed}"])
        wrote.append(path)

    if mode == "check" or args.check:
        if isinstance(pot, FishPotential):
            print("cross-check runs on locally constant potentials", file=sys.stderr)
            return USAGE_EXIT
        report = variational_check(ts, None, pot, w, r_values, depths, horizons)
        path = _out_path(args.out, "localized_check.csv")
        write_csv(
            path,
            ["n", "k", "r", "lower_rate", "upper_rate", "dual", "slack", "dominated"],
            [(g.n, g.k, g.r, g.lower_rate, g.upper_rate, g.dual_value, g.slack,
              g.dominated) for g in report.rows],
            comments=[f"violations={report.violations}"],
        )
        wrote.append(path)
        verdict = "dual dominates every direct rate within slack" if report.ok \
            else f"{report.violations} rates exceed the dual value beyond slack"
        print(f"check: {verdict}")
    for path in wrote:
        print(path)
    return 0


def cmd_gallery(args) -> int:
    config = _load_config(args)
    only = args.only or config.get("gallery", "only")
    points = int(config.get("gallery", "points", args.points))
    report = run_gallery(only=only, seed=args.seed, points=points)
    rows = report.rows()
    path = _out_path(args.out, "gallery.csv")
    write_csv(path, ["example", "claim", "expected", "measured", "tol", "pass", "anchor"],
              rows, comments=[f"seed={args.seed}"])
    print(path)
    for model in report.models:
        if model.name == "fish" and "cloud" in model.potentials:
            cloud = model.potentials["cloud"]
            hull = convex_hull(cloud.points)
            fan = model.potentials.get("fan")
            svg = _out_path(args.out, "fish.svg")
            render_rotation_figure(
                svg, cloud, hull=hull, fan=fan,
                curve=model.potentials["Phi"].geometry,
                title=f"rotation set of the run-length potential "
                      f"({len(cloud)} orbit points)")
            print(svg)
    for row in rows:
        status = row[5]
        if status != "pass":
            print(f"FAIL {row[0]}/{row[1]}: expected {row[2]}, measured {row[3]}",
                  file=sys.stderr)
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locpress",
        description="localized pressure, rotation sets, and equilibrium states "
                    "on subshifts of finite type",
    )
    parser.add_argument("--config", help="path to a [section] key=value config file")
    parser.add_argument("--system", default=None,
                        help="system preset (full2, full4, golden, fishA)")
    parser.add_argument("--potential", default=None,
                        help="potential spec: zero | fish-figure1 | indicator:WORD")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for direct sweeps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", help="pressure/entropy/rotation table on a grid")
    p.add_argument("--t-grid", default="0", help="coefficient grid, space separated")
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("rotset", help="rotation cloud, hull, and figure")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--max-period", type=int, default=14)
    p.add_argument("--fan", action="store_true", help="overlay the vertex fan")
    p.add_argument("--fan-j-max", type=int, default=14)
    p.set_defaults(func=cmd_rotset)

    p = sub.add_parser("localized", help="direct sweeps and dual solves")
    p.add_argument("--w", default=None, help="target vector, space separated")
    p.add_argument("--r", default=None, help="ball radii, space separated")
    p.add_argument("--depth", default=None, help="cylinder depths, space separated")
    p.add_argument("--nmax", default=None, help="horizons, space separated")
    p.add_argument("--bins", type=int, default=32, help="bins per radius")
    p.add_argument("--grid", type=int, default=24, help="fiber-scan grid size")
    p.add_argument("--mode", choices=["direct", "dual", "both", "check"], default=None)
    p.add_argument("--direct-only", dest="mode", action="store_const", const="direct")
    p.add_argument("--dual-only", dest="mode", action="store_const", const="dual")
    p.add_argument("--check", action="store_true", help="run the cross-check")
    p.set_defaults(func=cmd_localized)

    p = sub.add_parser("gallery", help="run the bundled worked examples")
    p.add_argument("--only", default=None, help="run a single example by name")
    p.add_argument("--points", type=int, default=1000)
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except UnsupportedQueryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
