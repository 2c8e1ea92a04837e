"""Precomputed census rows shipped with the package.

Rows for 29 <= ell are slow enough to be worth caching (the full-interval
ell = 46 enumeration visits hundreds of millions of squarefree smooth
numbers), so the package ships them as JSON under ``divmatch/data``,
guarded by a SHA-256 hash over the canonical payload encoding. Loaders
re-derive dataclass instances; nothing here trusts the file beyond the
hash check, and every consumer can force recomputation instead.

Set ``DIVMATCH_DATA_DIR`` to read the bundle from a different directory.
"""

from __future__ import annotations

import hashlib
import json
import os
from functools import lru_cache
from pathlib import Path

from .census import CensusRow, GcdCounts, census_row, gcd_counts, interval_bound
from .errors import RangeError, ValidationError

BUNDLE_NAME = "census_bundle.json"
BUNDLED_DS = (105, 15, 21, 3, 5)
BUNDLE_MIN = 29
BUNDLE_MAX = {"odd": 45, "full": 46}


def bundle_path() -> Path:
    override = os.environ.get("DIVMATCH_DATA_DIR")
    if override:
        return Path(override) / BUNDLE_NAME
    return Path(__file__).parent / "data" / BUNDLE_NAME


def payload_digest(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def build_payload(ells=None, threads=None) -> dict:
    """Recompute the bundled rows (all of them by default)."""
    payload = {"census": {"odd": {}, "full": {}}, "gcds": {"odd": {}, "full": {}}}
    for mode in ("odd", "full"):
        wanted = ells or range(BUNDLE_MIN, BUNDLE_MAX[mode] + 1)
        for ell in wanted:
            row = census_row(ell, mode, threads=threads)
            payload["census"][mode][str(ell)] = {
                "omega_max": row.omega_max,
                "c": list(row.c),
            }
            g = gcd_counts(ell, mode, BUNDLED_DS, threads=threads)
            payload["gcds"][mode][str(ell)] = {
                "entries": {str(d): g.entries[d] for d in BUNDLED_DS},
                "x3": g.x3,
            }
    return payload


def write_bundle(path=None, threads=None) -> Path:
    path = Path(path) if path else bundle_path()
    payload = build_payload(threads=threads)
    doc = {"sha256": payload_digest(payload), "payload": payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True))
    return path


@lru_cache(maxsize=None)
def _load(path_str: str) -> dict:
    doc = json.loads(Path(path_str).read_text())
    payload = doc.get("payload")
    if payload is None or payload_digest(payload) != doc.get("sha256"):
        raise ValidationError("bundled census data failed its integrity check")
    return payload


def load_payload() -> dict:
    return _load(str(bundle_path()))


def has_row(ell: int, mode: str) -> bool:
    return BUNDLE_MIN <= ell <= BUNDLE_MAX.get(mode, 0)


def bundled_row(ell: int, mode: str) -> CensusRow:
    if not has_row(ell, mode):
        raise RangeError(f"no bundled census row for ell={ell} mode={mode}")
    rec = load_payload()["census"][mode][str(ell)]
    return CensusRow(
        ell=ell,
        mode=mode,
        N=interval_bound(ell, mode),
        c=tuple(rec["c"]),
        omega_max=rec["omega_max"],
    )


def bundled_gcds(ell: int, mode: str) -> GcdCounts:
    if not has_row(ell, mode):
        raise RangeError(f"no bundled gcd counts for ell={ell} mode={mode}")
    rec = load_payload()["gcds"][mode][str(ell)]
    return GcdCounts(
        ell=ell,
        mode=mode,
        entries={int(d): v for d, v in rec["entries"].items()},
        x3=rec["x3"],
    )
