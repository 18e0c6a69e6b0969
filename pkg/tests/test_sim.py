"""Simulated tool backend: rate model properties and container handling."""

from fractions import Fraction

import pytest

from snvse.sim import (
    SimError,
    _packetize,
    main_ffmpeg,
    main_ffprobe,
    read_container,
    synthesize_source,
    video_bits_per_second,
)


def test_rate_strictly_decreasing_in_crf():
    fps = Fraction(30, 1)
    for complexity in (0.03, 0.6, 1.25):
        rates = [video_bits_per_second(complexity, 640, 360, fps, float(crf), "medium")
                 for crf in range(0, 52)]
        assert all(a > b for a, b in zip(rates, rates[1:]))


def test_rate_scales_with_resolution_and_complexity():
    fps = Fraction(30, 1)
    small = video_bits_per_second(0.6, 640, 360, fps, 23.0, "medium")
    large = video_bits_per_second(0.6, 1920, 1080, fps, 23.0, "medium")
    assert large > small
    flat = video_bits_per_second(0.03, 640, 360, fps, 23.0, "medium")
    assert flat < small


def test_rate_is_deterministic():
    fps = Fraction(30000, 1001)
    a = video_bits_per_second(0.6, 1280, 720, fps, 31.5, "medium")
    b = video_bits_per_second(0.6, 1280, 720, fps, 31.5, "medium")
    assert a == b


def test_packetize_sums_exactly():
    sizes = _packetize(123_457, 91)
    assert sum(sizes) == 123_457
    assert len(sizes) == 91
    assert sizes[30] < sizes[31] * 5  # keyframes weighted, not absurd


def test_synthesize_known_sources():
    stream = synthesize_source("testsrc2=size=1280x720:rate=30:duration=10")
    assert stream["width"] == 1280
    assert stream["fps"] == [30, 1]
    with pytest.raises(SimError):
        synthesize_source("nosuchsource=size=1x1")


def test_cli_roundtrip(tmp_path, capsys):
    out = tmp_path / "clip.mp4"
    code = main_ffmpeg([
        "-y", "-f", "lavfi", "-i", "testsrc2=size=640x360:rate=30",
        "-c:v", "libx264", "-crf", "23", "-pix_fmt", "yuv420p",
        "-t", "4", str(out),
    ])
    assert code == 0
    header = read_container(out)
    assert header["streams"][0]["width"] == 640
    assert main_ffprobe(["-show_streams", "-print_format", "json", str(out)]) == 0
    assert '"codec_name": "h264"' in capsys.readouterr().out


def test_cli_rejects_odd_yuv420p(tmp_path, capsys):
    code = main_ffmpeg([
        "-y", "-f", "lavfi", "-i", "testsrc2=size=640x360:rate=30",
        "-vf", "scale=641:360", "-pix_fmt", "yuv420p", "-t", "2",
        str(tmp_path / "x.mp4"),
    ])
    assert code == 1
    assert "divisible by 2" in capsys.readouterr().err


def test_cli_rejects_garbage_input(tmp_path, capsys):
    bad = tmp_path / "bad.mp4"
    bad.write_bytes(b"not a container")
    assert main_ffprobe(["-show_streams", str(bad)]) == 1
    assert "Invalid data" in capsys.readouterr().err
    assert main_ffmpeg(["-i", str(bad), str(tmp_path / "o.mp4")]) == 1
