"""Stability and fidelity diagnostics for estimated profiles.

The bootstrap study answers "how many shared videos per resolution do I
need": for each subset size n', it repeatedly draws random subsets of the
estimated CRFs (without replacement within a subset, independent across
iterations), averages each subset, and reports the spread of those
averages. The fidelity report compares emulated outputs against their
actually-shared counterparts file by file.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitrate import measure_bitrate
from .config import RunConfig
from .errors import LengthMismatch, MixedResolutions, PopulationTooSmall
from .probe import probe_media

DEFAULT_ITERATIONS = 1000


@dataclass(frozen=True)
class StabilityRow:
    n_prime: int
    crf_min: float
    crf_max: float
    crf_mean: float
    crf_stddev: float

    @property
    def range_width(self) -> float:
        return self.crf_max - self.crf_min


@dataclass(frozen=True)
class StabilityReport:
    resolution: tuple[int, int]
    iterations: int
    rows: list[StabilityRow]
    seed: int


@dataclass(frozen=True)
class SampleSizeRecommendation:
    n_prime: int
    achieved: bool
    width_threshold: float


def bootstrap_stability(
    estimates: list,
    n_prime_range: tuple[int, int],
    iterations: int = DEFAULT_ITERATIONS,
    seed: int = 0,
) -> StabilityReport:
    """Bootstrap the per-resolution CRF mean over subset sizes.

    *estimates* is any sequence of records with ``rho_out``, ``crf_hat``
    and ``saturated`` attributes (estimation results or stored profile
    entries) sharing one output resolution. Pure computation: no probing
    or encoding happens here. Deterministic for a given seed; each n'
    uses its own generator seeded with ``seed + n'`` so the result does
    not depend on scheduling.
    """
    if not estimates:
        raise PopulationTooSmall("no estimates given")
    resolutions = {tuple(e.rho_out) for e in estimates}
    if len(resolutions) != 1:
        raise MixedResolutions(f"estimates span several output resolutions: {sorted(resolutions)}")
    values = np.array([float(e.crf_hat) for e in estimates])
    population = len(values)
    if population < 2:
        raise PopulationTooSmall(f"need at least 2 estimates, got {population}")

    lo, hi = n_prime_range
    if lo < 1 or hi < lo:
        raise PopulationTooSmall(f"bad subset-size range [{lo}, {hi}]")
    if hi > population:
        raise PopulationTooSmall(
            f"subset size {hi} exceeds population of {population} estimates"
        )
    if iterations < 1:
        raise ValueError("iterations must be positive")

    rows = []
    for n_prime in range(lo, hi + 1):
        rng = np.random.default_rng(seed + n_prime)
        means = np.empty(iterations)
        for it in range(iterations):
            means[it] = rng.choice(values, size=n_prime, replace=False).mean()
        rows.append(
            StabilityRow(
                n_prime=n_prime,
                crf_min=float(means.min()),
                crf_max=float(means.max()),
                crf_mean=float(means.mean()),
                crf_stddev=float(means.std()),
            )
        )
    return StabilityReport(
        resolution=next(iter(resolutions)),
        iterations=iterations,
        rows=rows,
        seed=seed,
    )


def recommend_sample_size(
    report: StabilityReport, width_threshold: float
) -> SampleSizeRecommendation:
    """Smallest n' whose CRF range is within *width_threshold*.

    Falls back to the largest studied n' with ``achieved=False`` when no
    row meets the threshold.
    """
    if not report.rows:
        raise ValueError("empty stability report")
    for row in report.rows:
        if row.range_width <= width_threshold:
            return SampleSizeRecommendation(row.n_prime, True, width_threshold)
    return SampleSizeRecommendation(report.rows[-1].n_prime, False, width_threshold)


def write_stability_csv(report: StabilityReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n_prime", "crf_min", "crf_max", "crf_mean", "crf_stddev"])
        for row in report.rows:
            writer.writerow([row.n_prime, row.crf_min, row.crf_max, row.crf_mean, row.crf_stddev])


# ---------------------------------------------------------------------------
# fidelity


@dataclass(frozen=True)
class FidelityPair:
    emulated: Path
    shared: Path
    resolution_match: bool
    codec_match: bool
    pixel_format_match: bool
    bitrate_rel_diff: float


@dataclass(frozen=True)
class FidelityReport:
    pairs: list[FidelityPair]

    @property
    def resolution_equality_rate(self) -> float:
        return sum(p.resolution_match for p in self.pairs) / len(self.pairs)

    @property
    def codec_match_rate(self) -> float:
        return sum(p.codec_match for p in self.pairs) / len(self.pairs)

    @property
    def pixel_format_match_rate(self) -> float:
        return sum(p.pixel_format_match for p in self.pairs) / len(self.pairs)

    @property
    def median_bitrate_rel_diff(self) -> float:
        return statistics.median(p.bitrate_rel_diff for p in self.pairs)

    @property
    def mean_bitrate_rel_diff(self) -> float:
        return statistics.fmean(p.bitrate_rel_diff for p in self.pairs)

    def summary(self) -> dict:
        return {
            "pairs": len(self.pairs),
            "resolution_equality_rate": self.resolution_equality_rate,
            "codec_match_rate": self.codec_match_rate,
            "pixel_format_match_rate": self.pixel_format_match_rate,
            "median_bitrate_rel_diff": self.median_bitrate_rel_diff,
            "mean_bitrate_rel_diff": self.mean_bitrate_rel_diff,
        }


def fidelity_report(
    emulated: list[str | Path],
    shared: list[str | Path],
    config: RunConfig | None = None,
) -> FidelityReport:
    """Compare emulated outputs against shared counterparts, paired by order."""
    if len(emulated) != len(shared):
        raise LengthMismatch(f"{len(emulated)} emulated vs {len(shared)} shared files")
    if not emulated:
        raise LengthMismatch("empty file lists")
    config = config or RunConfig.from_env()

    pairs = []
    for emu_path, shared_path in zip(emulated, shared):
        emu = probe_media(emu_path, config)
        ref = probe_media(shared_path, config)
        emu_rate = measure_bitrate(emu, config).value
        ref_rate = measure_bitrate(ref, config).value
        pairs.append(
            FidelityPair(
                emulated=Path(emu_path),
                shared=Path(shared_path),
                resolution_match=emu.resolution == ref.resolution,
                codec_match=emu.codec_name == ref.codec_name,
                pixel_format_match=emu.pixel_format == ref.pixel_format,
                bitrate_rel_diff=abs(emu_rate - ref_rate) / ref_rate,
            )
        )
    return FidelityReport(pairs=pairs)


def write_fidelity_json(report: FidelityReport, path: str | Path) -> None:
    doc = {
        "summary": report.summary(),
        "pairs": [
            {
                "emulated": str(p.emulated),
                "shared": str(p.shared),
                "resolution_match": p.resolution_match,
                "codec_match": p.codec_match,
                "pixel_format_match": p.pixel_format_match,
                "bitrate_rel_diff": p.bitrate_rel_diff,
            }
            for p in report.pairs
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_fidelity_csv(report: FidelityReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["emulated", "shared", "resolution_match", "codec_match",
             "pixel_format_match", "bitrate_rel_diff"]
        )
        for p in report.pairs:
            writer.writerow(
                [p.emulated, p.shared, p.resolution_match, p.codec_match,
                 p.pixel_format_match, p.bitrate_rel_diff]
            )
