"""Encode operator contract: probed output equals the spec, CRF drives rate."""

import json
import subprocess
from fractions import Fraction

import pytest

from snvse.bitrate import measure_bitrate
from snvse.encoder import (
    AudioPolicy,
    EncodeSpec,
    build_encode_argv,
    encode,
    normalize_dimensions,
)
from snvse.errors import EncoderFailure, PreconditionViolation
from conftest import make_clip


def _spec(**overrides):
    defaults = dict(
        target_width=640,
        target_height=360,
        crf=30.0,
        frame_rate=Fraction(30, 1),
        preset="medium",
    )
    defaults.update(overrides)
    return EncodeSpec(**defaults)


@pytest.mark.parametrize(
    "given,expected",
    [((641, 480), (640, 480)), ((1280, 718), (1280, 718)), ((855, 481), (854, 480))],
)
def test_normalize_dimensions(given, expected):
    assert normalize_dimensions(*given) == expected


def test_normalize_dimensions_rejects_tiny():
    with pytest.raises(PreconditionViolation):
        normalize_dimensions(1, 480)


def test_encode_output_matches_spec(config, clips, tmp_path):
    spec = _spec(target_width=1280, target_height=720, crf=30.0, frame_rate=Fraction(30, 1))
    info = encode(clips["hd"], spec, tmp_path / "out.mp4", config)
    assert info.width == 1280
    assert info.height == 720
    assert info.codec_name == "h264"
    assert info.pixel_format == "yuv420p"
    assert info.frame_rate == Fraction(30, 1)


def test_encode_downscale_and_fps_change(config, clips, tmp_path):
    spec = _spec(frame_rate=Fraction(24, 1))
    info = encode(clips["hd"], spec, tmp_path / "out.mp4", config)
    assert info.resolution == (640, 360)
    assert info.frame_rate == Fraction(24, 1)


def test_higher_crf_means_lower_bitrate(config, clips, tmp_path):
    low = encode(clips["textured"], _spec(crf=23.0), tmp_path / "c23.mp4", config)
    high = encode(clips["textured"], _spec(crf=45.0), tmp_path / "c45.mp4", config)
    assert measure_bitrate(low, config).value > measure_bitrate(high, config).value


def test_bitrate_non_increasing_across_crf_grid(config, clips, tmp_path):
    rates = []
    for crf in (21, 30, 40, 50):
        info = encode(clips["textured"], _spec(crf=float(crf)), tmp_path / f"c{crf}.mp4", config)
        rates.append(measure_bitrate(info, config).value)
    for earlier, later in zip(rates, rates[1:]):
        # Inversions tolerated only when the two rates are within 2%.
        assert later <= earlier or abs(later - earlier) / earlier < 0.02


def test_encode_is_rate_stable(config, clips, tmp_path):
    a = encode(clips["sd"], _spec(), tmp_path / "a.mp4", config)
    b = encode(clips["sd"], _spec(), tmp_path / "b.mp4", config)
    rate_a = measure_bitrate(a, config).value
    rate_b = measure_bitrate(b, config).value
    assert abs(rate_a - rate_b) / rate_a < 0.01


def test_odd_target_rejected_before_running(config, clips, tmp_path):
    with pytest.raises(PreconditionViolation):
        encode(clips["hd"], _spec(target_width=641, target_height=480), tmp_path / "x.mp4", config)
    assert not (tmp_path / "x.mp4").exists()


@pytest.mark.parametrize("crf", [-1.0, 52.0])
def test_crf_out_of_range_rejected(crf):
    with pytest.raises(PreconditionViolation):
        _spec(crf=crf).validate()


def test_codec_and_pixel_format_are_pinned():
    with pytest.raises(PreconditionViolation):
        _spec(codec="vp9").validate()
    with pytest.raises(PreconditionViolation):
        _spec(pixel_format="yuv444p").validate()


def test_encoder_failure_cleans_partial_output(config, tmp_path):
    corrupt = tmp_path / "corrupt.mp4"
    corrupt.write_bytes(b"junk" * 64)
    out = tmp_path / "out.mp4"
    with pytest.raises(EncoderFailure):
        encode(corrupt, _spec(), out, config)
    assert not out.exists()


def _stream_types(config, path):
    argv = config.ffprobe_argv() + [
        "-v", "error", "-print_format", "json", "-show_streams", str(path)
    ]
    doc = json.loads(subprocess.run(argv, capture_output=True, text=True, check=True).stdout)
    return [s["codec_type"] for s in doc["streams"]]


def test_audio_policy_drop_and_copy(config, tmp_path):
    # Source with both video and audio: generate video, then mux decisions apply.
    src = make_clip(config, tmp_path / "src.mp4", size=(640, 360), duration=2)
    dropped = tmp_path / "dropped.mp4"
    encode(src, _spec(audio_policy=AudioPolicy.DROP), dropped, config)
    assert _stream_types(config, dropped) == ["video"]
    # Copy on an audio-less source still yields just the video stream.
    copied = tmp_path / "copied.mp4"
    encode(src, _spec(audio_policy=AudioPolicy.COPY), copied, config)
    assert "video" in _stream_types(config, copied)


def test_argv_pins_the_full_contract(config, tmp_path):
    spec = _spec(crf=32.5, frame_rate=Fraction(30000, 1001))
    argv = build_encode_argv(tmp_path / "in.mp4", spec, tmp_path / "out.mp4", config)
    joined = " ".join(argv)
    assert "-c:v libx264" in joined
    assert "-crf 32.5" in joined
    assert "-vf scale=640:360" in joined
    assert "-pix_fmt yuv420p" in joined
    assert "-r 30000/1001" in joined
    assert "-preset medium" in joined
    assert "-an" in joined
    assert "-y" in joined


def test_argv_is_logged_verbatim(config, clips, tmp_path, caplog):
    import logging

    with caplog.at_level(logging.INFO, logger="snvse.runner"):
        encode(clips["flat"], _spec(), tmp_path / "log.mp4", config)
    exec_lines = [r.message for r in caplog.records if r.message.startswith("exec:")]
    assert any("-crf 30" in line and "scale=640:360" in line for line in exec_lines)
