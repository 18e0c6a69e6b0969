"""Command-line interface tying the pipeline together.

Subcommands: ``estimate`` (build a platform profile from original/shared
pairs), ``emulate`` (apply a profile to new videos), ``analyze-stability``
(bootstrap study of CRF estimate spread vs sample count), ``db show``
(inspect a profile), and ``mock-platform`` (encode a corpus with fixed,
known parameters to serve as a ground-truth stand-in for real uploads).

Exit codes: 0 success (individual item failures are summarized), 1
operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import logging
import sys
from collections import Counter
from pathlib import Path

from . import __version__
from .analysis import bootstrap_stability, recommend_sample_size, write_stability_csv
from .config import DEFAULT_PRESET, RunConfig
from .encoder import AudioPolicy, EncodeSpec, encode
from .errors import (
    AllInputsFailed,
    AllPairsFailed,
    PreconditionViolation,
    SnvseError,
)
from .estimator import (
    CRF_MAX_DEFAULT,
    CRF_MIN_DEFAULT,
    SearchStrategy,
    VideoPair,
    estimate_batch,
)
from .planner import check_preset, emulate_batch
from .probe import probe_media
from .profile_db import PlatformProfile, ProfileEntry, load_profile, save_profile
from .runner import run_pool, terminate_active

logger = logging.getLogger(__name__)

VIDEO_EXTENSIONS = {".mp4", ".m4v", ".mov", ".mkv", ".avi", ".webm", ".ts", ".mpg", ".mpeg"}
MIN_SAMPLES_PER_RESOLUTION = 30

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _resolution(text: str) -> tuple[int, int]:
    try:
        w, _, h = text.lower().partition("x")
        width, height = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return width, height


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # The same options are accepted before and after the subcommand; the
    # subcommand copies use SUPPRESS so they never clobber root values.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--ffmpeg-bin", default=default,
                        help="encoder command (default: $SNVSE_FFMPEG or ffmpeg)")
    parser.add_argument("--ffprobe-bin", default=default,
                        help="prober command (default: $SNVSE_FFPROBE or ffprobe)")
    parser.add_argument("--preset", default=default,
                        help="x264 preset; estimation and emulation must agree (default: medium)")
    parser.add_argument("--workers", type=_positive_int, default=default,
                        help="max concurrent encodes (default: cpu count)")
    parser.add_argument("--scratch-dir", type=Path, default=default,
                        help="directory for trial encodes (default: system temp)")
    parser.add_argument("--log-level", choices=sorted(_LOG_LEVELS),
                        default=argparse.SUPPRESS if suppress else "info")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snvse",
        description="Estimate social-network video re-encoding parameters and emulate them locally.",
    )
    parser.add_argument("--version", action="version", version=f"snvse {__version__}")
    _add_global_options(parser, suppress=False)

    shared = argparse.ArgumentParser(add_help=False)
    _add_global_options(shared, suppress=True)

    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", parents=[shared], help="estimate (resolution, CRF) parameters from original/shared pairs")
    p_est.add_argument("originals_dir", type=Path)
    p_est.add_argument("shared_dir", type=Path)
    p_est.add_argument("--platform", required=True, help="platform name stored in the profile")
    p_est.add_argument("--out", required=True, type=Path, help="output profile JSON path")
    p_est.add_argument("--pairing", choices=["stem", "manifest"], default="stem")
    p_est.add_argument("--manifest", type=Path, help="CSV of original,shared paths (pairing=manifest)")
    p_est.add_argument("--c-min", type=int, default=CRF_MIN_DEFAULT)
    p_est.add_argument("--c-max", type=int, default=CRF_MAX_DEFAULT)
    p_est.add_argument("--strategy", choices=["linear", "bisection"], default="linear")
    p_est.add_argument("--trial-seconds", type=float, default=None,
                       help="truncate trial encodes to the first K seconds")
    p_est.add_argument("--keep-trials", action="store_true", help="keep trial encodes in the scratch dir")

    p_emu = sub.add_parser("emulate", parents=[shared], help="apply a profile to local videos")
    p_emu.add_argument("inputs", nargs="+", type=Path)
    p_emu.add_argument("--profile", required=True, type=Path)
    p_emu.add_argument("--out", required=True, type=Path, help="output directory")
    p_emu.add_argument("--include-saturated", action="store_true",
                       help="let saturated estimates join the CRF average")

    p_sta = sub.add_parser("analyze-stability", parents=[shared], help="bootstrap CRF estimate spread vs sample count")
    p_sta.add_argument("--profile", required=True, type=Path)
    p_sta.add_argument("--resolution", required=True, type=_resolution, help="output resolution WxH to study")
    p_sta.add_argument("--iterations", type=_positive_int, default=1000)
    p_sta.add_argument("--seed", type=int, default=0)
    p_sta.add_argument("--out", required=True, type=Path, help="output CSV path")
    p_sta.add_argument("--n-min", type=_positive_int, default=1)
    p_sta.add_argument("--n-max", type=_positive_int, default=None,
                       help="largest subset size (default: min(50, population))")
    p_sta.add_argument("--include-saturated", action="store_true")
    p_sta.add_argument("--width-threshold", type=float, default=None,
                       help="also report the smallest n' whose CRF range is within this width")

    p_db = sub.add_parser("db", parents=[shared], help="profile database inspection")
    db_sub = p_db.add_subparsers(dest="db_command", required=True)
    p_show = db_sub.add_parser("show", help="tabulate a profile")
    p_show.add_argument("profile", type=Path)

    p_mock = sub.add_parser("mock-platform", parents=[shared], help="encode a corpus with fixed hidden parameters")
    p_mock.add_argument("inputs_dir", type=Path)
    p_mock.add_argument("--out", required=True, type=Path, help="output directory")
    p_mock.add_argument("--resolution", required=True, type=_resolution, help="hidden output resolution WxH")
    p_mock.add_argument("--crf", required=True, type=float, help="hidden CRF")

    return parser


def _config_from_args(args, preset: str) -> RunConfig:
    config = RunConfig.from_env(
        ffmpeg=args.ffmpeg_bin,
        ffprobe=args.ffprobe_bin,
        preset=preset,
        workers=args.workers,
        scratch_dir=args.scratch_dir,
        log_level=args.log_level,
    )
    config.check_tools()
    return config


def _list_videos(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in VIDEO_EXTENSIONS
    )


def _pair_by_stem(originals_dir: Path, shared_dir: Path) -> list[VideoPair]:
    originals = {p.stem: p for p in _list_videos(originals_dir)}
    shared = {p.stem: p for p in _list_videos(shared_dir)}
    common = sorted(originals.keys() & shared.keys())
    for stem in sorted(originals.keys() ^ shared.keys()):
        logger.warning("unpaired stem %r skipped", stem)
    return [VideoPair(originals[s], shared[s], pair_id=s) for s in common]


def _pair_by_manifest(manifest: Path) -> list[VideoPair]:
    pairs = []
    with open(manifest, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "original":
                continue
            if len(row) < 2:
                raise PreconditionViolation(f"manifest row needs 2 columns: {row!r}")
            original, shared = Path(row[0].strip()), Path(row[1].strip())
            pairs.append(VideoPair(original, shared, pair_id=original.stem))
    return pairs


def cmd_estimate(args) -> int:
    config = _config_from_args(args, preset=args.preset or DEFAULT_PRESET)
    if args.pairing == "manifest":
        if args.manifest is None:
            print("error: --pairing manifest requires --manifest", file=sys.stderr)
            return 2
        pairs = _pair_by_manifest(args.manifest)
    else:
        pairs = _pair_by_stem(args.originals_dir, args.shared_dir)
    if not pairs:
        print("error: no pairs to estimate", file=sys.stderr)
        return 1

    outcomes = estimate_batch(
        pairs,
        workers=config.workers,
        c_min=args.c_min,
        c_max=args.c_max,
        strategy=SearchStrategy.BISECTION_WITH_VERIFY if args.strategy == "bisection"
        else SearchStrategy.LINEAR_SWEEP,
        config=config,
        trial_seconds=args.trial_seconds,
        keep_trials=args.keep_trials,
    )

    entries = [ProfileEntry.from_estimation(o.result) for o in outcomes if o.ok]
    profile = PlatformProfile(
        platform_name=args.platform,
        captured_at=dt.date.today(),
        preset=config.preset,
        entries=entries,
    )
    save_profile(profile, args.out)
    print(f"profile with {len(entries)} entries written to {args.out}")

    counts = Counter(entry.rho_out for entry in entries)
    for rho, count in sorted(counts.items()):
        line = f"  {rho[0]}x{rho[1]}: {count} entries"
        if count < MIN_SAMPLES_PER_RESOLUTION:
            line += f"  (warning: < {MIN_SAMPLES_PER_RESOLUTION} samples, estimate may be unstable)"
        print(line)

    failures = [o for o in outcomes if not o.ok]
    for failure in failures:
        print(f"  pair {failure.pair.pair_id} failed: {failure.error}", file=sys.stderr)
    if failures:
        print(f"{len(failures)} of {len(outcomes)} pairs failed", file=sys.stderr)
    return 0


def cmd_emulate(args) -> int:
    profile = load_profile(args.profile)
    preset = check_preset(profile, args.preset)
    config = _config_from_args(args, preset=preset)
    outcomes = emulate_batch(
        args.inputs,
        profile,
        args.out,
        workers=config.workers,
        config=config,
        include_saturated=args.include_saturated,
    )
    ok = sum(o.ok for o in outcomes)
    print(f"{ok} of {len(outcomes)} inputs emulated into {args.out} (manifest.json written)")
    for outcome in outcomes:
        if not outcome.ok:
            print(f"  {outcome.input_path} failed: {outcome.error}", file=sys.stderr)
    return 0


def cmd_analyze_stability(args) -> int:
    profile = load_profile(args.profile)
    rho = args.resolution
    entries = [
        e for e in profile.entries
        if e.rho_out == rho and (args.include_saturated or not e.saturated)
    ]
    if not entries:
        available = ", ".join(f"{w}x{h}" for w, h in profile.resolutions_out()) or "none"
        print(
            f"error: no entries at {rho[0]}x{rho[1]}; available output resolutions: {available}",
            file=sys.stderr,
        )
        return 1
    n_max = args.n_max if args.n_max is not None else min(50, len(entries))
    report = bootstrap_stability(
        entries, (args.n_min, n_max), iterations=args.iterations, seed=args.seed
    )
    write_stability_csv(report, args.out)
    first, last = report.rows[0], report.rows[-1]
    print(f"stability of {rho[0]}x{rho[1]} over {len(entries)} estimates "
          f"({report.iterations} iterations, seed {report.seed}) -> {args.out}")
    print(f"  n'={first.n_prime}: range {first.range_width:.3f}   "
          f"n'={last.n_prime}: range {last.range_width:.3f}")
    if args.width_threshold is not None:
        rec = recommend_sample_size(report, args.width_threshold)
        if rec.achieved:
            print(f"  smallest n' with CRF range <= {args.width_threshold:g}: {rec.n_prime}")
        else:
            print(f"  no n' reaches range <= {args.width_threshold:g}; largest studied: {rec.n_prime}")
    return 0


def cmd_db_show(args) -> int:
    profile = load_profile(args.profile)
    print(f"platform:     {profile.platform_name}")
    print(f"captured at:  {profile.captured_at.isoformat()}")
    print(f"preset:       {profile.preset}")
    print(f"tool version: {profile.tool_version}")
    print(f"entries:      {len(profile.entries)}")
    groups: dict[tuple, list[ProfileEntry]] = {}
    for entry in profile.entries:
        groups.setdefault((entry.rho_in, entry.rho_out), []).append(entry)
    for (rho_in, rho_out), group in sorted(groups.items()):
        crfs = [e.crf_hat for e in group]
        saturated = sum(e.saturated for e in group)
        line = (f"  {rho_in[0]}x{rho_in[1]} -> {rho_out[0]}x{rho_out[1]}: "
                f"{len(group)} entries, mean crf {sum(crfs) / len(crfs):.2f}")
        if saturated:
            line += f", {saturated} saturated"
        print(line)
    return 0


def cmd_mock_platform(args) -> int:
    width, height = args.resolution
    if width % 2 or height % 2:
        print(f"error: hidden resolution {width}x{height} must be even", file=sys.stderr)
        return 2
    if not 0 <= args.crf <= 51:
        print(f"error: hidden CRF {args.crf} outside [0, 51]", file=sys.stderr)
        return 2
    config = _config_from_args(args, preset=args.preset or DEFAULT_PRESET)
    inputs = _list_videos(args.inputs_dir)
    if not inputs:
        print(f"error: no videos in {args.inputs_dir}", file=sys.stderr)
        return 1
    args.out.mkdir(parents=True, exist_ok=True)

    def work(path: Path) -> str | None:
        try:
            info = probe_media(path, config)
            spec = EncodeSpec(
                target_width=width,
                target_height=height,
                crf=args.crf,
                frame_rate=info.frame_rate,
                preset=config.preset,
                audio_policy=AudioPolicy.DROP,
            )
            encode(path, spec, args.out / f"{path.stem}.mp4", config)
            return None
        except (SnvseError, OSError) as exc:
            return f"{path}: {type(exc).__name__}: {exc}"

    errors = [e for e in run_pool(work, inputs, config.workers) if e]
    print(f"{len(inputs) - len(errors)} of {len(inputs)} videos mock-shared into {args.out} "
          f"(hidden: {width}x{height} @ crf {args.crf:g}, preset {config.preset})")
    for error in errors:
        print(f"  {error}", file=sys.stderr)
    return 0 if len(errors) < len(inputs) else 1


_COMMANDS = {
    "estimate": cmd_estimate,
    "emulate": cmd_emulate,
    "analyze-stability": cmd_analyze_stability,
    "mock-platform": cmd_mock_platform,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=_LOG_LEVELS[args.log_level],
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        if args.command == "db":
            return cmd_db_show(args)
        return _COMMANDS[args.command](args)
    except (AllPairsFailed, AllInputsFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SnvseError, FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        count = terminate_active()
        print(f"interrupted; terminated {count} in-flight encode(s)", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
