"""The re-encode operator: H.264 at a target resolution and CRF.

The invocation contract is fixed for every flow in this tool: libx264,
yuv420p, full-frame scale to the target dimensions (no crop, no padding),
an explicit output frame rate, audio dropped or stream-copied, overwrite
enabled. The scaler is the encoder's default bicubic-class filter and
color tags pass through untouched. The exact argument list is logged for
every run.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from .config import RunConfig
from .errors import EncoderFailure, PreconditionViolation
from .probe import MediaInfo, probe_media
from .runner import run_tool

logger = logging.getLogger(__name__)

VIDEO_CODEC = "h264"
PIXEL_FORMAT = "yuv420p"
CRF_FLOOR = 0.0
CRF_CEIL = 51.0

# ffprobe reports the codec as "h264"; the encoder is selected as libx264.
_ENCODER_NAME = {"h264": "libx264"}


class AudioPolicy(Enum):
    DROP = "drop"
    COPY = "copy"


def normalize_dimensions(width: int, height: int) -> tuple[int, int]:
    """Round odd dimensions down to even (4:2:0 subsampling requirement)."""
    if width < 2 or height < 2:
        raise PreconditionViolation(f"dimensions too small to normalize: {width}x{height}")
    return (width - width % 2, height - height % 2)


@dataclass(frozen=True)
class EncodeSpec:
    """Full argument set for one re-encode."""

    target_width: int
    target_height: int
    crf: float
    frame_rate: Fraction
    codec: str = VIDEO_CODEC
    pixel_format: str = PIXEL_FORMAT
    preset: str = "medium"
    audio_policy: AudioPolicy = AudioPolicy.DROP

    def validate(self) -> None:
        if self.target_width < 2 or self.target_width % 2:
            raise PreconditionViolation(f"target width must be even and >= 2, got {self.target_width}")
        if self.target_height < 2 or self.target_height % 2:
            raise PreconditionViolation(f"target height must be even and >= 2, got {self.target_height}")
        if not CRF_FLOOR <= self.crf <= CRF_CEIL:
            raise PreconditionViolation(f"crf must be in [{CRF_FLOOR}, {CRF_CEIL}], got {self.crf}")
        if self.codec != VIDEO_CODEC:
            raise PreconditionViolation(f"codec is fixed to {VIDEO_CODEC!r}, got {self.codec!r}")
        if self.pixel_format != PIXEL_FORMAT:
            raise PreconditionViolation(f"pixel format is fixed to {PIXEL_FORMAT!r}, got {self.pixel_format!r}")
        if self.frame_rate <= 0:
            raise PreconditionViolation(f"frame rate must be positive, got {self.frame_rate}")


def _format_crf(crf: float) -> str:
    # Integer CRFs stay integers on the command line; fractional means pass through.
    return str(int(crf)) if float(crf).is_integer() else f"{crf:g}"


def build_encode_argv(
    input_path: Path,
    spec: EncodeSpec,
    output_path: Path,
    config: RunConfig,
    max_seconds: float | None = None,
) -> list[str]:
    """Construct the full encoder argument list for one run."""
    argv = config.ffmpeg_argv() + [
        "-hide_banner",
        "-loglevel", "error",
        "-y",
        "-i", str(input_path),
        "-map", "0:v:0",
    ]
    if spec.audio_policy is AudioPolicy.COPY:
        argv += ["-map", "0:a?", "-c:a", "copy"]
    else:
        argv += ["-an"]
    argv += [
        "-vf", f"scale={spec.target_width}:{spec.target_height}",
        "-c:v", _ENCODER_NAME[spec.codec],
        "-crf", _format_crf(spec.crf),
        "-preset", spec.preset,
        "-pix_fmt", spec.pixel_format,
        "-r", f"{spec.frame_rate.numerator}/{spec.frame_rate.denominator}",
    ]
    if max_seconds is not None:
        argv += ["-t", f"{max_seconds:g}"]
    argv.append(str(output_path))
    return argv


def encode(
    input_path: str | Path,
    spec: EncodeSpec,
    output_path: str | Path,
    config: RunConfig | None = None,
    max_seconds: float | None = None,
) -> MediaInfo:
    """Re-encode *input_path* per *spec* and return the probe of the output.

    *max_seconds*, when set, truncates the output to its first K seconds
    (used for cheap trial encodes). Partial outputs are removed on failure.
    """
    config = config or RunConfig.from_env()
    spec.validate()
    input_path = Path(input_path)
    output_path = Path(output_path)
    if not input_path.exists():
        raise FileNotFoundError(str(input_path))

    argv = build_encode_argv(input_path, spec, output_path, config, max_seconds)
    try:
        result = run_tool(argv)
    except BaseException:
        output_path.unlink(missing_ok=True)
        raise
    if result.returncode != 0:
        output_path.unlink(missing_ok=True)
        raise EncoderFailure(
            f"encoder exited {result.returncode} for {input_path} -> {output_path}: "
            f"{result.stderr.strip()}"
        )
    return probe_media(output_path, config)
