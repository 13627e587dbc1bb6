"""Command-line front end: ``tangent-arctic {count,sample,curve,verify,render}``."""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import arctic, sampler, svg
from .combinatorics import brute_force_count, gt_count
from .config import PRESETS, ExperimentConfig
from .tangent_verify import convergence_table, default_interval

CSV_HELP = """\
CSV outputs (floats with 12 significant digits):
  curve    t,X,Y,x_t,dx_dt,portion   portion is F, U, R or outer
  sample   x,y,type                  one row per cell (a single sample)
           x,y,U,R,F                 per-cell tile frequencies (--samples > 1)
  verify   n,ell_star_over_n,xi_star,deviation   plus a trailing '# fit' line
"""


def _parse_a(text: str) -> list[int]:
    return [int(v) for v in text.replace(" ", "").split(",") if v]


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if getattr(args, "preset", None):
        cfg.profile = PRESETS[args.preset]
    for name in ("a", "n", "seed", "sweeps", "samples", "out", "svg", "state",
                 "kind", "z", "n_list", "method"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, _parse_a(v) if name in ("a", "n_list") else v)
    return cfg


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_count(cfg: ExperimentConfig, oracle: bool = False) -> int:
    seq = cfg.sequence()
    z = gt_count(seq)
    print(z)
    if oracle:
        b = brute_force_count(seq)
        print("oracle agrees" if b == z else f"oracle disagrees: enumeration gives {b}")
        return 0 if b == z else 1
    return 0


def _draw(cfg: ExperimentConfig, rng: np.random.Generator) -> sampler.TilingState:
    seq = cfg.sequence()
    small = seq.n <= 10 and seq.a[-1] <= 40
    if cfg.method == "exact" or (cfg.method == "auto" and small):
        return sampler.sample_exact(seq, rng)
    return sampler.sample_mcmc(seq, cfg.sweeps, rng)


def _overlay(cfg: ExperimentConfig):
    if not cfg.overlay or cfg.profile is None:
        return None
    return [[(p.X, p.Y) for p in portion.points]
            for portion in arctic.curve_portions(cfg.alpha_profile(), cfg.curve_samples)]


def cmd_sample(cfg: ExperimentConfig) -> int:
    seq = cfg.sequence()
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.samples)
    acc = sampler.DensityAccumulator(seq)
    state = None
    for s in streams:
        state = _draw(cfg, np.random.default_rng(s))
        acc.add(state)
    grid = sampler.tile_classify(state)
    if cfg.samples == 1:
        _emit(grid.to_csv(), cfg.out)
    else:
        dens = acc.density()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("x", "y", "U", "R", "F"))
        for y in range(dens.shape[1]):
            for x in range(dens.shape[2]):
                w.writerow((x + 1, y, *(f"{dens[k, y, x]:.12g}"
                                        for k in (sampler.U, sampler.R, sampler.F))))
        _emit(buf.getvalue(), cfg.out)
    if cfg.state:
        Path(cfg.state).write_text(state.to_text())
    if cfg.svg:
        Path(cfg.svg).write_text(svg.render_svg(grid, seq, _overlay(cfg), cfg.outline, cfg.scale))
    return 0


def cmd_curve(cfg: ExperimentConfig) -> int:
    profile = cfg.alpha_profile()
    portions = arctic.curve_portions(profile, cfg.curve_samples)
    pts = [p for portion in portions for p in portion.points]
    _emit(arctic.curve_csv(pts), cfg.out)
    if cfg.svg:
        xy = [[(p.X, p.Y) for p in portion.points] for portion in portions]
        Path(cfg.svg).write_text(svg.render_curve_svg(xy, profile.alpha_end))
    return 0


def cmd_verify(cfg: ExperimentConfig) -> int:
    profile = cfg.alpha_profile()
    kind = cfg.portion_kind()
    table = convergence_table(profile, default_interval(profile, kind), kind, cfg.z, cfg.n_list)
    _emit(table.to_csv(), cfg.out)
    return 0


def cmd_render(cfg: ExperimentConfig, state_path: str) -> int:
    seq = cfg.sequence()
    state = sampler.TilingState.from_text(seq, Path(state_path).read_text())
    bad = state.violations()
    if bad:
        raise ValueError(f"invalid tiling state: {bad[0]}")
    grid = sampler.tile_classify(state)
    _emit(svg.render_svg(grid, seq, _overlay(cfg), cfg.outline, cfg.scale), cfg.svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tangent-arctic", description=__doc__,
        epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, outputs=True):
        sp.add_argument("--config", help="JSON experiment configuration")
        sp.add_argument("--preset", choices=sorted(PRESETS), help="built-in profile")
        sp.add_argument("--a", help="explicit starting points, e.g. 1,3")
        sp.add_argument("--n", type=int, help="number of paths when discretising a profile")
        if outputs:
            sp.add_argument("--out", help="CSV output path (default: stdout)")
            sp.add_argument("--svg", help="SVG output path")

    sp = sub.add_parser("count", help="exact number of configurations")
    common(sp, outputs=False)
    sp.add_argument("--oracle", action="store_true", help="cross-check by enumeration")

    sp = sub.add_parser("sample", help="uniform random tiling(s)")
    common(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sweeps", type=int, help="Metropolis sweeps (default 50 n^2)")
    sp.add_argument("--samples", type=int, help="independent samples; >1 writes densities")
    sp.add_argument("--state", help="also write the last state as a text table")
    sp.add_argument("--method", choices=("auto", "exact", "mcmc"),
                    help="exact row sampler for small instances, else Metropolis")

    sp = sub.add_parser("curve", help="predicted arctic curve")
    common(sp)
    sp.add_argument("--samples", type=int, dest="curve_samples", help="points per portion")

    sp = sub.add_parser("verify", help="finite-size convergence of the entry point")
    common(sp)
    sp.add_argument("--kind", choices=("F", "U", "R"), help="portion kind (default F)")
    sp.add_argument("--z", type=float, help="rescaled depth of the displaced start")
    sp.add_argument("--n-list", dest="n_list", help="increasing sizes, e.g. 20,40,80")

    sp = sub.add_parser("render", help="SVG of a saved state")
    common(sp)
    sp.add_argument("state_file", help="text table written by 'sample --state'")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config(args)
    if getattr(args, "curve_samples", None):
        cfg.curve_samples = args.curve_samples
    try:
        cfg.validate(need_interval=args.command == "verify")
        if args.command == "count":
            return cmd_count(cfg, args.oracle)
        if args.command == "sample":
            return cmd_sample(cfg)
        if args.command == "curve":
            return cmd_curve(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_render(cfg, args.state_file)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
