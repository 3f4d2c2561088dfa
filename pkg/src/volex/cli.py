"""Command-line interface: run experiments, verify the math, manage voxel files.

Exit codes are script-friendly: 0 success/complete, 1 configuration or I/O
error, 2 iteration budget exhausted, 3 verification failure, 64 usage error.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from .errors import VolexError
from .grid import environment_hash, generate_boxes, generate_empty, load_environment, save_environment
from .objectives import ENV_MODES, WEIGHTINGS, ObjectiveSpec
from .planners import PlannerConfig
from .sensing import CameraModel
from .simulator import (BOUNDS_MODES, COORDINATORS, ExperimentConfig,
                        build_manifest, config_from_dict, exploration_volume,
                        load_manifest, run_experiment, write_manifest,
                        write_metrics_csv)
from .verify import DEFAULT_INSTANCES, SUITES, run_suites

EX_OK = 0
EX_CONFIG = 1
EX_BUDGET = 2
EX_VERIFY = 3
EX_USAGE = 64

# Default planner parameter sets. The myopic planner trades the discount and
# goal shaping differently, hence its own column.
_PLANNER_DEFAULTS = {
    "sequential": {"view_threshold": 900.0, "dist_factor": 500.0,
                   "discount": 0.7},
    "rsp": {"view_threshold": 900.0, "dist_factor": 500.0, "discount": 0.7},
    "myopic": {"view_threshold": 300.0, "dist_factor": 700.0,
               "discount": 1.0},
}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 64 on usage errors instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _extent(text):
    try:
        parts = tuple(float(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad extent {text!r}") from None
    if len(parts) != 3 or min(parts) <= 0:
        raise argparse.ArgumentTypeError(
            f"extent must be WxDxH in meters, got {text!r}")
    return parts


def _triple(text):
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coordinate {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return parts


def _pair(text):
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    if len(parts) != 2 or parts[0] > parts[1] or parts[0] <= 0:
        raise argparse.ArgumentTypeError(
            f"expected min,max with 0 < min <= max, got {text!r}")
    return parts


def _add_env_args(parser):
    parser.add_argument("--extent", type=_extent, default=(4.0, 4.0, 2.0),
                        help="environment size WxDxH in meters")
    parser.add_argument("--res", type=float, default=0.1,
                        help="cell size in meters")
    parser.add_argument("--boxes", type=int, default=8,
                        help="number of random boxes (boxes environments)")
    parser.add_argument("--box-size", type=_pair, default=(0.3, 0.8),
                        help="box edge range min,max in meters")


def build_parser():
    parser = _Parser(prog="volex",
                     description="Deterministic multi-robot exploration "
                                 "simulator and planner toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one exploration experiment")
    run.add_argument("--env", choices=("empty", "boxes", "file"),
                     default="boxes")
    run.add_argument("--env-path", default="",
                     help="voxel file (with --env file)")
    _add_env_args(run)
    run.add_argument("--robots", type=int, default=4)
    run.add_argument("--start", type=_triple, default=None,
                     help="start position x,y,z (default: extent center)")
    run.add_argument("--perturb", type=float, default=0.5,
                     help="start perturbation radius in meters")
    run.add_argument("--seed", type=int, default=None,
                     help="master seed (default: $VOLEX_SEED or 0)")
    run.add_argument("--planner", choices=COORDINATORS, default="sequential")
    run.add_argument("--rounds", type=int, default=3,
                     help="rsp round count")
    run.add_argument("--horizon", type=int, default=10)
    run.add_argument("--samples", type=int, default=200,
                     help="tree-search samples per robot per iteration")
    run.add_argument("--cp", type=float, default=1500.0,
                     help="tree-search exploration weight")
    run.add_argument("--lateral", action="store_true",
                     help="include lateral translations in the control set")
    run.add_argument("--view-threshold", type=float, default=None,
                     help="minimum optimistic view coverage for goals")
    run.add_argument("--dist-factor", type=float, default=None,
                     help="distance-reward scale")
    run.add_argument("--discount", type=float, default=None,
                     help="per-step reward discount")
    run.add_argument("--weighting", choices=WEIGHTINGS,
                     default="scaled-entropy")
    run.add_argument("--obj-env", choices=ENV_MODES, default="optimistic",
                     help="worlds the objective averages over")
    run.add_argument("--mc-samples", type=int, default=64,
                     help="worlds per Monte-Carlo objective query")
    run.add_argument("--ray-sum", action="store_true",
                     help="use the per-ray independent information objective")
    run.add_argument("--prior", type=float, default=0.125,
                     help="occupancy prior of unknown cells")
    run.add_argument("--view-samples", type=int, default=64,
                     help="candidate poses sampled per iteration")
    run.add_argument("--iters", type=int, default=400,
                     help="iteration budget")
    run.add_argument("--completion", type=float, default=0.9,
                     help="completion fraction of the explorable volume")
    run.add_argument("--bounds", choices=BOUNDS_MODES, default="none",
                     help="suboptimality certificate mode")
    run.add_argument("--threads", type=int, default=None,
                     help="worker thread cap (never changes results)")
    run.add_argument("--zero-timing", action="store_true",
                     help="write 0.0 wall-clock for bit-reproducible output")
    run.add_argument("--from-manifest", default="",
                     help="rerun the exact configuration of a manifest")
    run.add_argument("--out", default="run.csv", help="metrics CSV path")
    run.add_argument("--manifest", default="",
                     help="manifest path (default: CSV path with .json)")

    verify = sub.add_parser("verify", help="run the verification suites")
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    verify.add_argument("--instances", type=int, default=None,
                        help="instances per suite (default: per-suite)")
    verify.add_argument("--seed", type=int, default=None)

    env = sub.add_parser("env", help="generate or inspect voxel files")
    env_sub = env.add_subparsers(dest="env_command", required=True)
    gen = env_sub.add_parser("gen", help="write a generated environment")
    gen.add_argument("kind", choices=("empty", "boxes"))
    _add_env_args(gen)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--start", type=_triple, default=None,
                     help="kept-clear region center (boxes)")
    gen.add_argument("--out", required=True)
    info = env_sub.add_parser("info", help="describe a voxel file")
    info.add_argument("path")

    return parser


def _resolve_seed(value):
    if value is not None:
        return value
    return int(os.environ.get("VOLEX_SEED", "0"))


def _config_from_args(args):
    defaults = _PLANNER_DEFAULTS[args.planner]
    view_threshold = (args.view_threshold if args.view_threshold is not None
                      else defaults["view_threshold"])
    dist_factor = (args.dist_factor if args.dist_factor is not None
                   else defaults["dist_factor"])
    discount = (args.discount if args.discount is not None
                else defaults["discount"])
    planner = PlannerConfig(
        horizon=args.horizon,
        mcts_samples=args.samples,
        exploration_weight=args.cp,
        rsp_rounds=args.rounds,
        include_lateral=args.lateral,
        threads=args.threads if args.threads is not None else 1,
    )
    objective = ObjectiveSpec(
        weighting=args.weighting,
        env_mode=args.obj_env,
        mc_samples=args.mc_samples,
        discount=discount,
        ray_sum_mode=args.ray_sum,
    )
    return ExperimentConfig(
        extent=args.extent,
        resolution=args.res,
        env_kind=args.env,
        env_path=args.env_path,
        box_count=args.boxes,
        box_size_range=args.box_size,
        occupancy_prior=args.prior,
        robot_count=args.robots,
        start=args.start or (),
        perturbation_radius=args.perturb,
        master_seed=_resolve_seed(args.seed),
        coordinator=args.planner,
        planner=planner,
        objective=objective,
        camera=CameraModel(),
        dist_factor=dist_factor,
        view_threshold=view_threshold,
        view_samples=args.view_samples,
        max_iterations=args.iters,
        completion_fraction=args.completion,
        bounds_mode=args.bounds,
        zero_timing=args.zero_timing,
    )


def cmd_run(args):
    expected_hash = None
    if args.from_manifest:
        manifest = load_manifest(args.from_manifest)
        config = config_from_dict(manifest["config"])
        expected_hash = manifest.get("environment_hash")
        if args.threads is not None:
            config = replace(config,
                             planner=replace(config.planner,
                                             threads=args.threads))
        if args.zero_timing:
            config = replace(config, zero_timing=True)
    else:
        config = _config_from_args(args)

    result = run_experiment(config)
    if expected_hash and result.environment_hash != expected_hash:
        print(f"volex: environment hash mismatch: manifest has "
              f"{expected_hash}, run produced {result.environment_hash}",
              file=sys.stderr)
        return EX_CONFIG

    write_metrics_csv(result.records, args.out)
    manifest_path = args.manifest or _default_manifest_path(args.out)
    write_manifest(build_manifest(result, args.out), manifest_path)

    last = result.records[-1]
    status = "complete" if result.completed else "budget exhausted"
    print(f"{status}: {last.covered_cells}/{result.explorable_cells} cells "
          f"({last.coverage_m3:.2f} m^3) after {last.iteration} iterations "
          f"({last.robot_iterations} robot-iterations)")
    print(f"wrote {args.out} and {manifest_path}")
    return EX_OK if result.completed else EX_BUDGET


def _default_manifest_path(csv_path):
    root, _ext = os.path.splitext(csv_path)
    return root + ".json"


def cmd_verify(args):
    names = SUITES if args.suite == "all" else (args.suite,)
    results = run_suites(names, instances=args.instances,
                         seed=_resolve_seed(args.seed))
    failed = None
    for result in results:
        print(result.summary())
        if not result.ok and failed is None:
            failed = result
    if failed is not None:
        print(json.dumps(failed.first_failure, indent=2, default=str),
              file=sys.stderr)
        return EX_VERIFY
    return EX_OK


def cmd_env(args):
    if args.env_command == "gen":
        if args.kind == "empty":
            env = generate_empty(args.extent, args.res)
        else:
            env = generate_boxes(args.extent, args.res, args.boxes,
                                 args.box_size, _resolve_seed(args.seed),
                                 start=args.start)
        save_environment(env, args.out)
        print(f"wrote {args.out} ({env.grid.dims[0]}x{env.grid.dims[1]}x"
              f"{env.grid.dims[2]} cells, {env.occupied_count} occupied)")
        return EX_OK

    env = load_environment(args.path)
    grid = env.grid
    nx, ny, nz = grid.dims
    cell_volume = grid.resolution ** 3
    bounding = grid.n_cells * cell_volume
    center = tuple(d * grid.resolution / 2.0 for d in grid.dims)
    explorable = exploration_volume(env, [center], CameraModel())
    print(f"dims: {nx} x {ny} x {nz} ({grid.n_cells} cells)")
    print(f"resolution: {grid.resolution} m")
    print(f"occupied: {env.occupied_count} cells "
          f"({env.occupied_count / grid.n_cells:.4f})")
    print(f"bounding volume: {bounding:.6g} m^3")
    print(f"explorable from center: {explorable} cells "
          f"({explorable * cell_volume:.6g} m^3)")
    print(f"hash: {environment_hash(env)}")
    return EX_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_env(args)
    except VolexError as exc:
        print(f"volex: {exc}", file=sys.stderr)
        return EX_CONFIG
    except OSError as exc:
        print(f"volex: {exc}", file=sys.stderr)
        return EX_CONFIG


if __name__ == "__main__":
    sys.exit(main())