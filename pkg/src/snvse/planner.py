"""Emulation planning: pick the output resolution and CRF for each input.

Resolution: an exact input-resolution match in the profile wins; otherwise
the entry whose input resolution is Euclidean-nearest. Ties are broken
deterministically (smallest distance, then larger input pixel count, then
larger input width). When one input resolution maps to several output
resolutions, the one backed by the most entries wins.

CRF: the arithmetic mean of the estimated CRFs of all entries sharing the
selected output resolution; saturated entries are excluded unless asked
for. The fractional mean goes to the encoder as-is.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .config import RunConfig
from .encoder import EncodeSpec, encode, normalize_dimensions
from .errors import AllInputsFailed, EmptyProfile, NoSupport, PresetMismatch, SnvseError
from .probe import probe_media
from .profile_db import PlatformProfile, ProfileEntry
from .runner import run_pool

logger = logging.getLogger(__name__)

ASPECT_WARN_THRESHOLD = 0.01


@dataclass(frozen=True)
class EmulationPlan:
    """Everything needed to emulate platform sharing for one input."""

    input_path: Path
    rho_star: tuple[int, int]
    crf_star: float
    matched_exactly: bool
    support_count: int
    spec: EncodeSpec
    aspect_change: float


@dataclass(frozen=True)
class EmulationOutcome:
    input_path: Path
    output_path: Path | None = None
    plan: EmulationPlan | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _distance_sq(a: tuple[int, int], b: tuple[int, int]) -> int:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def _pick_rho_out(candidates: list[ProfileEntry]) -> tuple[int, int]:
    """Majority output resolution among entries sharing one input resolution."""
    counts: dict[tuple[int, int], int] = {}
    for entry in candidates:
        counts[entry.rho_out] = counts.get(entry.rho_out, 0) + 1
    return max(counts, key=lambda rho: (counts[rho], rho[0] * rho[1], rho[0]))


def select_resolution(
    rho: tuple[int, int], profile: PlatformProfile
) -> tuple[tuple[int, int], bool]:
    """Return (rho_out, matched_exactly) for input resolution *rho*."""
    if not profile.entries:
        raise EmptyProfile("profile has no entries")

    exact = [entry for entry in profile.entries if entry.rho_in == rho]
    if exact:
        return _pick_rho_out(exact), True

    best_rho_in = min(
        {entry.rho_in for entry in profile.entries},
        key=lambda rin: (_distance_sq(rin, rho), -(rin[0] * rin[1]), -rin[0]),
    )
    nearest = [entry for entry in profile.entries if entry.rho_in == best_rho_in]
    return _pick_rho_out(nearest), False


def select_crf(
    rho_star: tuple[int, int],
    profile: PlatformProfile,
    include_saturated: bool = False,
) -> tuple[float, int]:
    """Mean estimated CRF over entries with output resolution *rho_star*."""
    group = [
        entry for entry in profile.entries
        if entry.rho_out == rho_star and (include_saturated or not entry.saturated)
    ]
    if not group:
        raise NoSupport(
            f"no usable entries at output resolution {rho_star[0]}x{rho_star[1]}"
            + ("" if include_saturated else " (saturated entries excluded; retry with include_saturated)")
        )
    return sum(entry.crf_hat for entry in group) / len(group), len(group)


def plan_emulation(
    input_path: str | Path,
    profile: PlatformProfile,
    config: RunConfig | None = None,
    include_saturated: bool = False,
) -> EmulationPlan:
    """Probe *input_path* and derive its full emulation encode spec."""
    config = config or RunConfig.from_env()
    info = probe_media(input_path, config)
    rho_star_raw, matched = select_resolution(info.resolution, profile)
    rho_star = normalize_dimensions(*rho_star_raw)
    crf_star, support = select_crf(rho_star_raw, profile, include_saturated)

    in_aspect = info.width / info.height
    out_aspect = rho_star[0] / rho_star[1]
    aspect_change = abs(out_aspect / in_aspect - 1.0)
    if aspect_change > ASPECT_WARN_THRESHOLD:
        logger.warning(
            "%s: aspect ratio changes by %.1f%% (%dx%d -> %dx%d, full-frame scale)",
            input_path, aspect_change * 100, info.width, info.height, *rho_star,
        )

    spec = EncodeSpec(
        target_width=rho_star[0],
        target_height=rho_star[1],
        crf=crf_star,
        frame_rate=info.frame_rate,  # emulation keeps the input's frame rate
        preset=profile.preset,
    )
    return EmulationPlan(
        input_path=Path(input_path),
        rho_star=rho_star,
        crf_star=crf_star,
        matched_exactly=matched,
        support_count=support,
        spec=spec,
        aspect_change=aspect_change,
    )


def check_preset(profile: PlatformProfile, configured_preset: str | None) -> str:
    """Pin the emulation preset to the profile's; reject explicit mismatches."""
    if configured_preset is not None and configured_preset != profile.preset:
        raise PresetMismatch(
            f"profile was estimated with preset {profile.preset!r} but the run "
            f"configures {configured_preset!r}; estimates are preset-relative"
        )
    return profile.preset


def emulate_batch(
    inputs: list[str | Path],
    profile: PlatformProfile,
    out_dir: str | Path,
    workers: int,
    config: RunConfig | None = None,
    include_saturated: bool = False,
) -> list[EmulationOutcome]:
    """Emulate every input into *out_dir*; per-input failures are recorded.

    Outputs are named ``<stem>.<platform>.mp4`` and a JSON manifest of the
    plans is written next to them. Raises AllInputsFailed only when no
    input succeeded.
    """
    if not inputs:
        raise AllInputsFailed("no inputs to emulate")
    config = config or RunConfig.from_env()
    config = config.with_preset(profile.preset)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def work(input_path: str | Path) -> EmulationOutcome:
        input_path = Path(input_path)
        output_path = out_dir / f"{input_path.stem}.{profile.platform_name}.mp4"
        try:
            plan = plan_emulation(input_path, profile, config, include_saturated)
            encode(input_path, plan.spec, output_path, config)
            return EmulationOutcome(input_path=input_path, output_path=output_path, plan=plan)
        except (SnvseError, OSError) as exc:
            logger.error("emulation of %s failed: %s", input_path, exc)
            return EmulationOutcome(input_path=input_path, error=f"{type(exc).__name__}: {exc}")

    outcomes = run_pool(work, inputs, workers)

    write_manifest(outcomes, out_dir / "manifest.json")
    if not any(o.ok for o in outcomes):
        raise AllInputsFailed(
            "every input failed; first error: " + (outcomes[0].error or "unknown")
        )
    return outcomes


def manifest_records(outcomes: list[EmulationOutcome]) -> list[dict]:
    records = []
    for outcome in outcomes:
        record: dict = {"input": str(outcome.input_path)}
        if outcome.ok:
            plan = outcome.plan
            record.update(
                output=str(outcome.output_path),
                rho_star=list(plan.rho_star),
                crf_star=plan.crf_star,
                matched_exactly=plan.matched_exactly,
                support_count=plan.support_count,
                aspect_change=round(plan.aspect_change, 6),
            )
        else:
            record["error"] = outcome.error
        records.append(record)
    return records


def write_manifest(outcomes: list[EmulationOutcome], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(manifest_records(outcomes), fh, indent=2)
        fh.write("\n")
