"""ffprobe wrapper: authoritative media metadata for one file.

Runs the configured prober with JSON output and reduces the result to the
fields the pipeline needs. The first video stream by container order wins;
frame rate comes from the declared average rate with the real base rate as
fallback; duration comes from the video stream, then the container.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .config import RunConfig
from .errors import NoVideoStream, PacketScanFailure, ProberFailure
from .runner import run_tool

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MediaInfo:
    """Probed facts about one video file."""

    path: Path
    width: int
    height: int
    frame_rate: Fraction
    codec_name: str
    pixel_format: str
    duration: float
    file_size: int
    stream_bitrate: float | None = None

    @property
    def resolution(self) -> tuple[int, int]:
        return (self.width, self.height)


def _parse_rate(text: str | None) -> Fraction | None:
    """Parse an ffprobe rate string like '30000/1001'; None when absent or 0."""
    if not text:
        return None
    try:
        rate = Fraction(text)
    except (ValueError, ZeroDivisionError):
        return None
    return rate if rate > 0 else None


def _parse_positive_float(text) -> float | None:
    try:
        value = float(text)
    except (TypeError, ValueError):
        return None
    return value if value > 0 else None


def probe_media(path: str | Path, config: RunConfig | None = None) -> MediaInfo:
    """Probe *path* and return MediaInfo for its first video stream.

    Raises FileNotFoundError, NoVideoStream, or ProberFailure (with the
    prober's diagnostics attached).
    """
    config = config or RunConfig.from_env()
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))

    argv = config.ffprobe_argv() + [
        "-v", "error",
        "-print_format", "json",
        "-show_format",
        "-show_streams",
        str(path),
    ]
    result = run_tool(argv)
    if result.returncode != 0:
        raise ProberFailure(
            f"prober exited {result.returncode} for {path}: {result.stderr.strip()}"
        )
    try:
        doc = json.loads(result.stdout)
    except json.JSONDecodeError as exc:
        raise ProberFailure(f"unparseable prober output for {path}: {exc}") from exc

    streams = doc.get("streams", [])
    video = next((s for s in streams if s.get("codec_type") == "video"), None)
    if video is None:
        raise NoVideoStream(f"no video stream in {path}")

    try:
        width = int(video["width"])
        height = int(video["height"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ProberFailure(f"video stream of {path} lacks dimensions: {exc}") from exc
    if width < 1 or height < 1:
        raise ProberFailure(f"nonpositive dimensions {width}x{height} in {path}")

    avg = _parse_rate(video.get("avg_frame_rate"))
    base = _parse_rate(video.get("r_frame_rate"))
    frame_rate = avg or base
    if frame_rate is None:
        raise ProberFailure(f"no usable frame rate reported for {path}")
    if avg is not None and base is not None and avg != base:
        logger.warning(
            "%s looks variable-frame-rate (avg %s vs base %s); using the average",
            path, avg, base,
        )

    duration = _parse_positive_float(video.get("duration"))
    if duration is None:
        duration = _parse_positive_float(doc.get("format", {}).get("duration"))
    if duration is None:
        raise ProberFailure(f"no usable duration reported for {path}")

    codec_name = video.get("codec_name", "")
    pixel_format = video.get("pix_fmt", "")
    stream_bitrate = _parse_positive_float(video.get("bit_rate"))
    file_size = os.stat(path).st_size
    if file_size <= 0:
        raise ProberFailure(f"{path} is empty")

    return MediaInfo(
        path=path,
        width=width,
        height=height,
        frame_rate=frame_rate,
        codec_name=codec_name,
        pixel_format=pixel_format,
        duration=duration,
        file_size=file_size,
        stream_bitrate=stream_bitrate,
    )


def scan_video_stream_bytes(path: str | Path, config: RunConfig | None = None) -> int:
    """Sum the packet sizes of the first video stream, in bytes."""
    config = config or RunConfig.from_env()
    argv = config.ffprobe_argv() + [
        "-v", "error",
        "-select_streams", "v:0",
        "-show_entries", "packet=size",
        "-print_format", "json",
        str(path),
    ]
    result = run_tool(argv)
    if result.returncode != 0:
        raise PacketScanFailure(
            f"packet scan exited {result.returncode} for {path}: {result.stderr.strip()}"
        )
    try:
        doc = json.loads(result.stdout)
        sizes = [int(p["size"]) for p in doc.get("packets", [])]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise PacketScanFailure(f"unparseable packet list for {path}: {exc}") from exc
    if not sizes:
        raise PacketScanFailure(f"no video packets reported for {path}")
    return sum(sizes)
