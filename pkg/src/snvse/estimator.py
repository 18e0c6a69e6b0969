"""Per-pair CRF estimation: the minimum CRF whose trial re-encode stays
at or under the shared video's bitrate.

For each (original, shared) pair the original is re-encoded at candidate
CRFs to the shared video's resolution and frame rate, and the first
candidate whose measured bitrate does not exceed the shared bitrate wins.
The default search is a linear sweep from the low end; an optional
bisection strategy exploits bitrate monotonicity and verifies minimality
afterwards, falling back to a local scan when encoder noise breaks the
assumption. When even the top of the range overshoots, the result is
clamped there and flagged saturated.
"""

from __future__ import annotations

import logging
import uuid
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .bitrate import measure_bitrate
from .config import RunConfig
from .encoder import EncodeSpec, encode, normalize_dimensions
from .errors import AllPairsFailed, InvalidRange, SnvseError
from .probe import probe_media
from .runner import run_pool

logger = logging.getLogger(__name__)

CRF_MIN_DEFAULT = 21
CRF_MAX_DEFAULT = 50


class SearchStrategy(Enum):
    LINEAR_SWEEP = "linear"
    BISECTION_WITH_VERIFY = "bisection"


@dataclass(frozen=True)
class VideoPair:
    """One original video and its platform-shared counterpart."""

    original_path: Path
    shared_path: Path
    pair_id: str


@dataclass(frozen=True)
class EstimationResult:
    pair_id: str
    rho_in: tuple[int, int]
    rho_out: tuple[int, int]
    crf_hat: int
    saturated: bool
    trial_log: list[tuple[int, float]]
    target_bitrate: float


@dataclass(frozen=True)
class EstimationOutcome:
    """Batch slot: either a result or the captured per-pair error."""

    pair: VideoPair
    result: EstimationResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


def estimate_crf(
    pair: VideoPair,
    c_min: int = CRF_MIN_DEFAULT,
    c_max: int = CRF_MAX_DEFAULT,
    strategy: SearchStrategy = SearchStrategy.LINEAR_SWEEP,
    config: RunConfig | None = None,
    trial_seconds: float | None = None,
    keep_trials: bool = False,
) -> EstimationResult:
    """Estimate the CRF the platform applied to *pair.shared_path*.

    *trial_seconds* truncates trial encodes to the first K seconds of the
    original (bitrate is per-second, so the comparison stays valid);
    *keep_trials* leaves trial files in the scratch directory.
    """
    if not c_min < c_max:
        raise InvalidRange(f"need c_min < c_max, got [{c_min}, {c_max}]")
    if c_min < 0 or c_max > 51:
        raise InvalidRange(f"CRF range [{c_min}, {c_max}] outside [0, 51]")
    config = config or RunConfig.from_env()

    original = probe_media(pair.original_path, config)
    shared = probe_media(pair.shared_path, config)
    if shared.codec_name != "h264":
        logger.warning(
            "pair %s: shared video codec is %r, not h264; trial encodes still use h264",
            pair.pair_id, shared.codec_name,
        )
    target = measure_bitrate(shared, config).value
    rho_out = normalize_dimensions(shared.width, shared.height)

    scratch = config.scratch_path()
    scratch.mkdir(parents=True, exist_ok=True)
    trials: dict[int, float] = {}

    def trial(crf: int) -> float:
        if crf in trials:
            return trials[crf]
        spec = EncodeSpec(
            target_width=rho_out[0],
            target_height=rho_out[1],
            crf=float(crf),
            frame_rate=shared.frame_rate,
            preset=config.preset,
        )
        out_path = scratch / f"trial-{pair.pair_id}-{uuid.uuid4().hex[:8]}-crf{crf}.mp4"
        try:
            info = encode(pair.original_path, spec, out_path, config, max_seconds=trial_seconds)
            rate = measure_bitrate(info, config).value
        finally:
            if not keep_trials:
                out_path.unlink(missing_ok=True)
        trials[crf] = rate
        logger.debug("pair %s: trial crf=%d -> %.0f bit/s (target %.0f)",
                      pair.pair_id, crf, rate, target)
        return rate

    if strategy is SearchStrategy.LINEAR_SWEEP:
        crf_hat, saturated = _linear_sweep(trial, target, c_min, c_max)
    else:
        crf_hat, saturated = _bisection_with_verify(trial, target, c_min, c_max)

    return EstimationResult(
        pair_id=pair.pair_id,
        rho_in=original.resolution,
        rho_out=rho_out,
        crf_hat=crf_hat,
        saturated=saturated,
        trial_log=sorted(trials.items()),
        target_bitrate=target,
    )


def _linear_sweep(trial, target: float, c_min: int, c_max: int) -> tuple[int, bool]:
    for crf in range(c_min, c_max + 1):
        if trial(crf) <= target:
            return crf, False
    return c_max, True


def _bisection_with_verify(trial, target: float, c_min: int, c_max: int) -> tuple[int, bool]:
    """Binary-search the lowest passing CRF, then verify minimality.

    Assumes bitrate is non-increasing in CRF. If the verification probe at
    crf_hat - 1 also passes (encoder rate noise), walks down linearly.
    """
    if trial(c_max) > target:
        return c_max, True
    lo, hi = c_min, c_max  # invariant: trial(hi) passes
    while lo < hi:
        mid = (lo + hi) // 2
        if trial(mid) <= target:
            hi = mid
        else:
            lo = mid + 1
    crf_hat = hi
    while crf_hat > c_min and trial(crf_hat - 1) <= target:
        crf_hat -= 1
    return crf_hat, False


def estimate_batch(
    pairs: list[VideoPair],
    workers: int,
    c_min: int = CRF_MIN_DEFAULT,
    c_max: int = CRF_MAX_DEFAULT,
    strategy: SearchStrategy = SearchStrategy.LINEAR_SWEEP,
    config: RunConfig | None = None,
    trial_seconds: float | None = None,
    keep_trials: bool = False,
) -> list[EstimationOutcome]:
    """Estimate every pair, at most *workers* in flight, preserving order.

    Individual failures are captured in their slot; raises AllPairsFailed
    only when no pair succeeded.
    """
    if not pairs:
        raise AllPairsFailed("no pairs to estimate")
    config = config or RunConfig.from_env()

    def work(pair: VideoPair) -> EstimationOutcome:
        try:
            result = estimate_crf(
                pair, c_min=c_min, c_max=c_max, strategy=strategy,
                config=config, trial_seconds=trial_seconds, keep_trials=keep_trials,
            )
            return EstimationOutcome(pair=pair, result=result)
        except (SnvseError, OSError) as exc:
            logger.error("pair %s failed: %s", pair.pair_id, exc)
            return EstimationOutcome(pair=pair, error=f"{type(exc).__name__}: {exc}")

    outcomes = run_pool(work, pairs, workers)

    if not any(o.ok for o in outcomes):
        raise AllPairsFailed(
            "every pair failed; first error: " + (outcomes[0].error or "unknown")
        )
    return outcomes
