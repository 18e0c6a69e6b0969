"""The bitrate measure used on both sides of the CRF search inequality.

One fixed definition everywhere: video-stream bits per second, audio
excluded. Prefers the prober-reported stream bitrate; falls back to
summing video packet sizes over the stream duration. Shared videos and
trial encodes are always measured by this same function.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .config import RunConfig
from .errors import MissingDuration
from .probe import MediaInfo, scan_video_stream_bytes


class BitrateMethod(Enum):
    REPORTED_STREAM_BITRATE = "ReportedStreamBitrate"
    VIDEO_BYTES_OVER_DURATION = "VideoBytesOverDuration"


@dataclass(frozen=True)
class BitrateMeasurement:
    """A bits-per-second value plus the path that computed it."""

    value: float
    method: BitrateMethod


def measure_bitrate(info: MediaInfo, config: RunConfig | None = None) -> BitrateMeasurement:
    """Measure the video-stream bitrate of the file described by *info*.

    Raises MissingDuration when the probe carries no positive duration and
    PacketScanFailure when the fallback packet scan is unusable.
    """
    if info.duration is None or info.duration <= 0:
        raise MissingDuration(f"nonpositive duration for {info.path}")
    if info.stream_bitrate is not None:
        return BitrateMeasurement(info.stream_bitrate, BitrateMethod.REPORTED_STREAM_BITRATE)
    payload = scan_video_stream_bytes(info.path, config)
    return BitrateMeasurement(payload * 8.0 / info.duration, BitrateMethod.VIDEO_BYTES_OVER_DURATION)
