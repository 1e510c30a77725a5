"""Command-line pipeline: densify, inpaint, tonal, eval.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 solver failure.
Runs are deterministic: identical configs produce byte-identical mask
files and CSV traces.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

from .errors import GimError, MaskFileError, PnmError, SolverBreakdownError
from .image import mse, read_pnm, write_pnm
from .inpaint import InpaintProblem, inpaint
from .masks import load_masks, save_masks
from .operators import DEFAULT_CATALOGUE, FeatureKind
from .solvers import SolverConfig
from .spatial import DensifyConfig, densify
from .tonal import TonalConfig, tonal_optimise


class ValidationError(GimError):
    pass


def _parse_features(text: str) -> tuple:
    try:
        kinds = tuple(FeatureKind.from_label(t.strip())
                      for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    if not kinds:
        raise ValidationError("feature list must not be empty")
    if len(set(kinds)) != len(kinds):
        raise ValidationError("feature list has duplicates")
    return kinds


def _read_config_file(path: str) -> dict:
    """key=value per line; blank lines and # comments ignored."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _atomic_write(path: str, writer) -> None:
    """Write via a temp file + rename so failures leave nothing behind."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _write_trace_csv(path: str, trace: list, catalogue) -> None:
    header = ["iteration", "points_total"]
    header += [f"points_{k.value}" for k in catalogue]
    header.append("mse")
    lines = [",".join(header)]
    for row in trace:
        fields = [str(row["iteration"]), str(row["points_total"])]
        fields += [str(c) for c in row["points_per_feature"]]
        fields.append(repr(row["mse"]))
        lines.append(",".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _recon_name(channels: int) -> str:
    return "reconstruction.pgm" if channels == 1 else "reconstruction.ppm"


def cmd_densify(args) -> int:
    f = read_pnm(args.input)
    catalogue = _parse_features(args.features)
    if not 0.0 < args.density <= len(catalogue):
        raise ValidationError(f"density must be in (0, {len(catalogue)}]")
    n = f.width * f.height
    target = round(args.density * n)
    if target < 1:
        raise ValidationError("density too small: no points to place")
    os.makedirs(args.out, exist_ok=True)
    solver_cfg = SolverConfig(args.epsilon, args.max_iter)
    cfg = DensifyConfig(target_points=target, iterations=args.iters,
                        solver_cfg=solver_cfg, seed=args.seed)
    debug_dir = os.path.join(args.out, "debug") if args.debug_maps else None
    result = densify(f, catalogue, cfg, debug_dir=debug_dir)

    masks, values, recon = result.masks, result.values, result.reconstruction
    if args.tonal:
        tonal = tonal_optimise(f, masks, values)
        values, recon = tonal.values, tonal.reconstruction

    mask_path = os.path.join(args.out, "mask.txt")
    _atomic_write(mask_path, lambda p: save_masks(masks, values, p))
    write_pnm(recon, os.path.join(args.out, _recon_name(f.channels)))
    _write_trace_csv(os.path.join(args.out, "trace.csv"), result.trace, catalogue)
    print(f"points={masks.total_points} density={masks.density:.6f} "
          f"mse={mse(recon, f).mse:.6f}")
    return 0


def cmd_inpaint(args) -> int:
    masks, values = load_masks(args.maskfile)
    solver_cfg = SolverConfig(args.epsilon, args.max_iter)
    grid, _ = inpaint(InpaintProblem(masks.geom, masks, values, solver_cfg))
    write_pnm(grid, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_tonal(args) -> int:
    masks, values = load_masks(args.maskfile)
    f = read_pnm(args.image)
    if (f.width, f.height) != (masks.geom.width, masks.geom.height):
        raise ValidationError(
            f"mask geometry {masks.geom.width}x{masks.geom.height} does not "
            f"match image {f.width}x{f.height}")
    if values.shape[0] != f.channels:
        raise ValidationError(
            f"mask file has {values.shape[0]} channels, image has {f.channels}")
    cfg = TonalConfig(outer_epsilon=args.tonal_epsilon,
                      outer_max_iterations=args.tonal_max_iter)
    result = tonal_optimise(f, masks, values, cfg)
    os.makedirs(args.out, exist_ok=True)
    mask_path = os.path.join(args.out, "mask_tonal.txt")
    _atomic_write(mask_path, lambda p: save_masks(masks, result.values, p))
    write_pnm(result.reconstruction,
              os.path.join(args.out, "reconstruction_tonal" +
                           (".pgm" if f.channels == 1 else ".ppm")))
    csv_path = os.path.join(args.out, "tonal_mse.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("mse_before,mse_after\n")
        fh.write(f"{result.mse_before!r},{result.mse_after!r}\n")
    print(f"mse {result.mse_before:.6f} -> {result.mse_after:.6f}")
    return 0


def cmd_eval(args) -> int:
    u = read_pnm(args.reconstruction)
    f = read_pnm(args.reference)
    report = mse(u, f)
    per_channel = " ".join(f"{v:.6f}" for v in report.per_channel_mse)
    print(f"mse={report.mse:.6f} per_channel={per_channel}")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("mse," + ",".join(
                f"mse_ch{i}" for i in range(len(report.per_channel_mse))) + "\n")
            fh.write(repr(report.mse) + "," + ",".join(
                repr(v) for v in report.per_channel_mse) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gim",
        description="Sparse image representation by generalised inpainting.")
    sub = parser.add_subparsers(dest="command", required=True)

    feature_default = ",".join(k.value for k in DEFAULT_CATALOGUE)

    p = sub.add_parser("densify", help="optimise mask locations for an image")
    p.add_argument("input", help="input PGM/PPM image")
    p.add_argument("--features", default=feature_default,
                   help=f"comma-separated subset of: {feature_default}")
    p.add_argument("--density", type=float, default=0.05,
                   help="stored points per pixel (all features combined)")
    p.add_argument("--iters", type=int, default=30,
                   help="densification iterations (= inpainting solves)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--epsilon", type=float, default=1e-9,
                   help="inner solver tolerance")
    p.add_argument("--max-iter", type=int, default=200000)
    p.add_argument("--seed", type=int, default=None,
                   help="randomise the initial mask (default: lattice)")
    p.add_argument("--tonal", action="store_true",
                   help="optimise stored values after densification")
    p.add_argument("--debug-maps", action="store_true",
                   help="emit per-iteration error/cell maps as PNM")
    p.set_defaults(func=cmd_densify)

    p = sub.add_parser("inpaint", help="reconstruct an image from a mask file")
    p.add_argument("maskfile")
    p.add_argument("--out", required=True, help="output PNM path")
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=200000)
    p.set_defaults(func=cmd_inpaint)

    p = sub.add_parser("tonal", help="optimise stored values of a mask file")
    p.add_argument("maskfile")
    p.add_argument("--image", required=True, help="reference PGM/PPM image")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--tonal-epsilon", type=float, default=1e-4)
    p.add_argument("--tonal-max-iter", type=int, default=100)
    p.set_defaults(func=cmd_tonal)

    p = sub.add_parser("eval", help="mean squared error between two images")
    p.add_argument("reconstruction")
    p.add_argument("reference")
    p.add_argument("--csv", default=None, help="also write a CSV report")
    p.set_defaults(func=cmd_eval)

    for sp in sub.choices.values():
        sp.add_argument("--config", default=None,
                        help="key=value file; flags override file entries")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args, _ = parser.parse_known_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1  # argparse usage errors are validation
    if getattr(args, "config", None):
        try:
            overrides = _read_config_file(args.config)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        known = {a.dest for a in parser._actions}
        for sp in parser._subparsers._group_actions[0].choices.values():
            known |= {a.dest for a in sp._actions}
        bad = set(overrides) - known
        if bad:
            print(f"error: unknown config keys: {', '.join(sorted(bad))}",
                  file=sys.stderr)
            return 1
        for sp in parser._subparsers._group_actions[0].choices.values():
            sp.set_defaults(**{k: _coerce(sp, k, v)
                               for k, v in overrides.items()})
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1

    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PnmError, MaskFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SolverBreakdownError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


def _coerce(subparser, key, value):
    for action in subparser._actions:
        if action.dest == key:
            if action.const is True or isinstance(action.default, bool):
                return value.lower() in ("1", "true", "yes", "on")
            if action.type is not None:
                return action.type(value)
            return value
    return value


if __name__ == "__main__":
    sys.exit(main())
