"""Persistence for platform profiles: the (rho_in, rho_out, crf) lookup table.

A profile is one JSON document per platform per capture date. The encoder
preset is stored inside the profile because CRF semantics are
preset-relative; emulation refuses to run under a different preset.
Writes are atomic (temp file + rename) and save/load round-trips are
byte-stable.
"""

from __future__ import annotations

import datetime as dt
import json
import logging
import os
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .errors import (
    DuplicatePair,
    IoFailure,
    PlatformMismatch,
    PresetMismatch,
    SchemaViolation,
)
from .estimator import EstimationResult

logger = logging.getLogger(__name__)

CRF_ENTRY_MIN = 21
CRF_ENTRY_MAX = 50


@dataclass(frozen=True)
class ProfileEntry:
    """One estimated (input resolution, output resolution, CRF) triplet."""

    rho_in: tuple[int, int]
    rho_out: tuple[int, int]
    crf_hat: int
    saturated: bool
    pair_id: str
    target_bitrate: float

    def validate(self, where: str = "entry") -> None:
        if self.rho_out[0] % 2 or self.rho_out[1] % 2:
            raise SchemaViolation(f"{where}.rho_out must have even dimensions, got {self.rho_out}")
        if not CRF_ENTRY_MIN <= self.crf_hat <= CRF_ENTRY_MAX:
            raise SchemaViolation(
                f"{where}.crf_hat must be in [{CRF_ENTRY_MIN}, {CRF_ENTRY_MAX}], got {self.crf_hat}"
            )

    @classmethod
    def from_estimation(cls, result: EstimationResult) -> "ProfileEntry":
        return cls(
            rho_in=result.rho_in,
            rho_out=result.rho_out,
            crf_hat=result.crf_hat,
            saturated=result.saturated,
            pair_id=result.pair_id,
            target_bitrate=result.target_bitrate,
        )


@dataclass(frozen=True)
class PlatformProfile:
    """A named, dated collection of estimated triplets for one platform."""

    platform_name: str
    captured_at: dt.date
    preset: str
    entries: list[ProfileEntry]
    tool_version: str = __version__

    def validate(self) -> None:
        for index, entry in enumerate(self.entries):
            entry.validate(where=f"entries[{index}]")

    def resolutions_out(self) -> list[tuple[int, int]]:
        seen: dict[tuple[int, int], None] = {}
        for entry in self.entries:
            seen.setdefault(entry.rho_out, None)
        return list(seen)


def _profile_document(profile: PlatformProfile) -> dict:
    # Fixed key order keeps save -> load -> save byte-identical.
    return {
        "platform_name": profile.platform_name,
        "captured_at": profile.captured_at.isoformat(),
        "preset": profile.preset,
        "tool_version": profile.tool_version,
        "entries": [
            {
                "rho_in": list(entry.rho_in),
                "rho_out": list(entry.rho_out),
                "crf_hat": entry.crf_hat,
                "saturated": entry.saturated,
                "pair_id": entry.pair_id,
                "target_bitrate": entry.target_bitrate,
            }
            for entry in profile.entries
        ],
    }


def save_profile(profile: PlatformProfile, path: str | Path) -> None:
    """Write *profile* as one JSON document, atomically."""
    profile.validate()
    if not profile.entries:
        logger.warning("saving profile %r with zero entries (inspection only)",
                       profile.platform_name)
    path = Path(path)
    doc = _profile_document(profile)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp_name, path)
    except OSError as exc:
        raise IoFailure(f"cannot write profile to {path}: {exc}") from exc


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise SchemaViolation(f"{where}.{key} is missing")
    value = doc[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaViolation(f"{where}.{key} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaViolation(f"{where}.{key} has wrong type: {value!r}")
    return value


def _parse_pair(doc: dict, key: str, where: str) -> tuple[int, int]:
    value = _require(doc, key, list, where)
    if len(value) != 2 or not all(isinstance(v, int) and v > 0 for v in value):
        raise SchemaViolation(f"{where}.{key} must be [width, height] of positive ints, got {value!r}")
    return (value[0], value[1])


def load_profile(path: str | Path) -> PlatformProfile:
    """Load and re-validate a profile document."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(str(path))
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read profile {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"profile {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation("profile root must be an object")

    captured_raw = _require(doc, "captured_at", str, "profile")
    try:
        captured_at = dt.date.fromisoformat(captured_raw)
    except ValueError as exc:
        raise SchemaViolation(f"profile.captured_at is not an ISO date: {captured_raw!r}") from exc

    entries_raw = _require(doc, "entries", list, "profile")
    entries = []
    for index, entry_doc in enumerate(entries_raw):
        where = f"profile.entries[{index}]"
        if not isinstance(entry_doc, dict):
            raise SchemaViolation(f"{where} must be an object")
        entry = ProfileEntry(
            rho_in=_parse_pair(entry_doc, "rho_in", where),
            rho_out=_parse_pair(entry_doc, "rho_out", where),
            crf_hat=_require(entry_doc, "crf_hat", int, where),
            saturated=_require(entry_doc, "saturated", bool, where),
            pair_id=_require(entry_doc, "pair_id", str, where),
            target_bitrate=_require(entry_doc, "target_bitrate", float, where),
        )
        entry.validate(where=where)
        entries.append(entry)

    profile = PlatformProfile(
        platform_name=_require(doc, "platform_name", str, "profile"),
        captured_at=captured_at,
        preset=_require(doc, "preset", str, "profile"),
        entries=entries,
        tool_version=_require(doc, "tool_version", str, "profile"),
    )
    return profile


def merge_profiles(a: PlatformProfile, b: PlatformProfile) -> PlatformProfile:
    """Concatenate two capture campaigns for the same platform and preset."""
    if a.platform_name != b.platform_name:
        raise PlatformMismatch(f"{a.platform_name!r} vs {b.platform_name!r}")
    if a.preset != b.preset:
        raise PresetMismatch(f"{a.preset!r} vs {b.preset!r}")
    seen = {entry.pair_id for entry in a.entries}
    dupes = [entry.pair_id for entry in b.entries if entry.pair_id in seen]
    if dupes:
        raise DuplicatePair(f"pair ids present in both profiles: {sorted(set(dupes))}")
    return replace(
        a,
        captured_at=max(a.captured_at, b.captured_at),
        entries=a.entries + b.entries,
    )
