"""Command-line front end.

Subcommands:

  gen        synthesize a coverage map (free-space, dpm, evanescent, multipath)
  outline    extract obstacle outlines from gray coverage images
  metrics    score prediction maps against ground-truth maps
  localize   fingerprint-localization self-test on a stack of maps
  ddm-sim    scalar diffusion sanity simulation (inversion + terminal moments)
  pipeline   end-to-end synthetic scene -> outline -> sampled map

Every subcommand accepts --config FILE plus per-key override flags; the
resolved configuration is echoed to stderr.  Exit codes: 0 ok, 1 runtime
failure, 2 usage error.
"""

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import (FIELD_NAMES, RunConfig, apply_overrides, converter_for,
                     echo_config, load_config_file)
from .diffusion import (PredictorOutput, forward_sample,
                        gaussian_posterior_sampler, one_step_reconstruct,
                        run_two_stage, sample_reverse, target_oracle_denoiser)
from .grids import (Boundary, BsConfig, EnvironmentMap, UnitTag,
                    amplitude_from_power)
from .helmholtz import (HelmholtzParams, k_eff_map, k_log_map, outline_mask,
                        persistence_mask)
from .io import (gray_to_linear_power, load_field, load_gray_image,
                 read_manifest, save_field, save_mask)
from .localization import build_db, evaluate_localization
from .metrics import nmse, psnr, rmse, ssim_global
from .synth import (PropagationParams, dominant_path_power, evanescent_field,
                    free_space_power, multipath_toy)


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("configuration")
    group.add_argument("--config", default=None, metavar="FILE",
                       help="key=value config file applied before flags")
    for name in FIELD_NAMES:
        group.add_argument("--" + name.replace("_", "-"), dest=name,
                           type=converter_for(name), default=None,
                           metavar="V", help="override config key %s" % name)
    return common


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="rmkit", description="radio-map outline and diffusion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common],
                       help="synthesize a coverage map")
    p.add_argument("--model", required=True,
                   choices=("free-space", "dpm", "evanescent", "multipath"))
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--bs", default=None, metavar="X,Y",
                   help="transmitter position in meters")
    p.add_argument("--env", default=None, metavar="PNG",
                   help="building mask image (gray > 0.5 is opaque)")
    p.add_argument("--out", required=True, metavar="FILE")

    p = sub.add_parser("outline", parents=[common],
                       help="extract obstacle outlines from coverage images")
    p.add_argument("--input", default=None, metavar="PNG")
    p.add_argument("--manifest", default=None, metavar="FILE",
                   help="gain,building,antenna triples, one per line")
    p.add_argument("--out-dir", required=True, metavar="DIR")
    p.add_argument("--save-k2", action="store_true",
                   help="also write the indicator map as CSV")

    p = sub.add_parser("metrics", parents=[common],
                       help="score predictions against ground truth")
    p.add_argument("--pred", default=None, metavar="DIR")
    p.add_argument("--truth", default=None, metavar="DIR")
    p.add_argument("--out-csv", default=None, metavar="FILE")
    p.add_argument("--out-json", default=None, metavar="FILE")

    p = sub.add_parser("localize", parents=[common],
                       help="fingerprint localization self-test")
    p.add_argument("--maps", required=True, metavar="CSV[,CSV...]")

    sub.add_parser("ddm-sim", parents=[common],
                   help="scalar diffusion sanity checks")

    p = sub.add_parser("pipeline", parents=[common],
                       help="synthetic scene through outline and sampling")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--out", required=True, metavar="DIR")

    return parser


def _resolve_config(args):
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = apply_overrides(cfg, load_config_file(args.config))
    overrides = {}
    for name in FIELD_NAMES:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return dataclasses.replace(cfg, **overrides)


def _prop_params(cfg):
    return PropagationParams(gamma=cfg.gamma, k=cfg.k,
                             wall_loss_db=cfg.wall_loss_db,
                             floor_db=cfg.floor_db,
                             reflection_order=cfg.reflection_order)


def _helm_params(cfg):
    return HelmholtzParams(eps=cfg.eps, sigma=cfg.sigma,
                           scales=tuple(cfg.scales),
                           boundary=Boundary(cfg.boundary))


def _parse_bs(spec, cfg):
    if not spec:
        raise ValueError("--bs X,Y is required for this model")
    parts = spec.split(",")
    if len(parts) != 2:
        raise ValueError("--bs expects X,Y, got %r" % spec)
    return BsConfig(x=float(parts[0]), y=float(parts[1]), z=cfg.tx_height_m,
                    tx_power_dbm=cfg.tx_power_dbm, carrier_hz=cfg.carrier_hz)


def _load_env(args):
    if args.env:
        gray = load_gray_image(args.env)
        static = gray.data > 0.5
        return EnvironmentMap(static, np.zeros_like(static))
    if args.width is None or args.height is None:
        raise ValueError("need --env or both --width and --height")
    static = np.zeros((args.height, args.width), dtype=bool)
    return EnvironmentMap(static, np.zeros_like(static))


def cmd_gen(args, cfg):
    env = _load_env(args)
    bs = _parse_bs(args.bs, cfg)
    params = _prop_params(cfg)
    if args.model == "free-space":
        field = free_space_power(env, bs, params)
    elif args.model == "dpm":
        field = dominant_path_power(env, bs, params)
    elif args.model == "evanescent":
        field = evanescent_field(env.width, env.height, (bs.x, bs.y), params,
                                 h_x=env.h_x, h_y=env.h_y)
    else:
        u = multipath_toy(env, bs, params)
        field = amplitude_from_power(np.abs(u.data) ** 2)
    save_field(field, args.out)
    return 0


def cmd_outline(args, cfg):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.manifest:
        inputs = [triple[0] for triple in read_manifest(args.manifest)]
    elif args.input:
        inputs = [Path(args.input)]
    else:
        raise ValueError("need --input or --manifest")
    hp = _helm_params(cfg)

    def process(path):
        gray = load_gray_image(path)
        power = gray_to_linear_power(gray, mode=cfg.gray_mode,
                                     p_min_db=cfg.p_min_db,
                                     p_max_db=cfg.p_max_db)
        amp = amplitude_from_power(power)
        k2 = None
        if cfg.indicator == "k-eff":
            k2 = k_eff_map(amp, hp)
            mask = outline_mask(k2, cfg.threshold)
        elif cfg.indicator == "k-log":
            k2 = k_log_map(amp, hp)
            mask = outline_mask(k2, cfg.threshold)
        elif cfg.indicator == "persistence":
            mask = persistence_mask(amp, hp)
        else:
            raise ValueError("unknown indicator %r" % cfg.indicator)
        save_mask(mask, out_dir / (path.stem + "_outline.png"))
        if args.save_k2 and k2 is not None:
            save_field(k2, out_dir / (path.stem + "_k2.csv"))

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
            list(ex.map(process, inputs))
    else:
        for path in inputs:
            process(path)
    return 0


def _load_map_file(path):
    if path.suffix == ".png":
        return load_gray_image(path)
    return load_field(path)


def cmd_metrics(args, cfg):
    if not args.pred or not args.truth:
        raise ValueError("need --pred and --truth directories")
    pred_dir = Path(args.pred)
    truth_dir = Path(args.truth)
    for d in (pred_dir, truth_dir):
        if not d.is_dir():
            raise FileNotFoundError("no such directory: %s" % d)
    exts = (".csv", ".png")
    pred_names = {p.name for p in pred_dir.iterdir() if p.suffix in exts}
    truth_names = {p.name for p in truth_dir.iterdir() if p.suffix in exts}
    if pred_names != truth_names:
        raise ValueError("map sets differ: only-pred=%s only-truth=%s"
                         % (sorted(pred_names - truth_names),
                            sorted(truth_names - pred_names)))
    if not pred_names:
        raise ValueError("no maps found")
    order = sorted(pred_names)
    rows = {}
    for name in order:
        pr = _load_map_file(pred_dir / name)
        gt = _load_map_file(truth_dir / name)
        rows[name] = {
            "nmse": nmse(pr, gt),
            "rmse": rmse(pr, gt),
            "ssim": ssim_global(pr, gt, L=cfg.ssim_l),
            "psnr": psnr(pr, gt),
        }
    keys = ("nmse", "rmse", "ssim", "psnr")
    mean = {k: sum(rows[name][k] for name in order) / len(order) for k in keys}
    if args.out_csv:
        lines = ["map,nmse,rmse,ssim,psnr"]
        for name in order:
            r = rows[name]
            lines.append("%s,%r,%r,%r,%r"
                         % (name, r["nmse"], r["rmse"], r["ssim"], r["psnr"]))
        lines.append("mean,%r,%r,%r,%r"
                     % (mean["nmse"], mean["rmse"], mean["ssim"], mean["psnr"]))
        Path(args.out_csv).write_text("\n".join(lines) + "\n")
    if args.out_json:
        def jsonable(row):
            return {k: ("inf" if row[k] == math.inf else row[k]) for k in keys}
        payload = {"per_map": {name: jsonable(rows[name]) for name in order},
                   "mean": jsonable(mean)}
        Path(args.out_json).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def cmd_localize(args, cfg):
    paths = [s for s in args.maps.split(",") if s]
    fields = [load_field(Path(p)) for p in paths]
    db = build_db(fields, cfg.stride)
    err = evaluate_localization(db, db, cfg.n_queries, cfg.knn_k,
                                np.random.default_rng(cfg.seed),
                                noise_sigma=cfg.noise_sigma)
    print("mean_loc_error_m=%r" % err)
    return 0


def cmd_ddm_sim(args, cfg):
    rng = np.random.default_rng(cfg.seed)
    x0 = rng.normal(cfg.mu0, math.sqrt(cfg.var0), cfg.runs)
    st = forward_sample(x0, 1.0, rng)
    pred = PredictorOutput(f_hat=-x0, eps_hat=st.x)
    z0 = one_step_reconstruct(st, pred)
    print("inversion_max_err=%r" % float(np.max(np.abs(z0 - x0))))
    den = gaussian_posterior_sampler(cfg.mu0, cfg.var0, rng)
    x1 = rng.standard_normal(cfg.runs)
    out = sample_reverse(den, x1, cfg.steps, rng)
    print("terminal_mean=%r" % float(out.mean()))
    print("terminal_var=%r" % float(out.var()))
    return 0


def cmd_pipeline(args, cfg):
    size = args.size
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(cfg.seed)
    static = np.zeros((size, size), dtype=bool)
    static[size // 4:size // 4 + max(2, size // 8), size // 3] = True
    env = EnvironmentMap(static, np.zeros_like(static))
    bs = BsConfig(x=size * 0.75 + 0.5, y=size * 0.5 + 0.5, z=cfg.tx_height_m,
                  tx_power_dbm=cfg.tx_power_dbm, carrier_hz=cfg.carrier_hz)
    power = dominant_path_power(env, bs, _prop_params(cfg))
    amp = amplitude_from_power(power)
    k2 = k_eff_map(amp, _helm_params(cfg))
    truth = outline_mask(k2, cfg.threshold)
    stage1 = target_oracle_denoiser(truth.bits.astype(np.float64))
    stage2 = target_oracle_denoiser(power.data / power.data.max())
    mask, field = run_two_stage(env, bs, stage1, stage2, steps=cfg.steps,
                                rng=rng)
    save_field(power, out_dir / "power.csv")
    save_field(k2, out_dir / "k2.csv")
    save_mask(mask, out_dir / "outline.png")
    save_field(field, out_dir / "map.csv")
    return 0


_HANDLERS = {
    "gen": cmd_gen,
    "outline": cmd_outline,
    "metrics": cmd_metrics,
    "localize": cmd_localize,
    "ddm-sim": cmd_ddm_sim,
    "pipeline": cmd_pipeline,
}


def cli_dispatch(argv):
    """Parse and run; returns a process exit code instead of raising."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        cfg = _resolve_config(args)
        echo_config(cfg)
        return _HANDLERS[args.command](args, cfg)
    except Exception as e:
        print("error: %s" % e, file=sys.stderr)
        return 1


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))
