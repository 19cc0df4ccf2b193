"""On-disk cache of minimal resolutions, keyed by group, prime, depth, version.

Entries are JSON with hex-packed differential rows.  Loads are never
trusted blindly: every hit is revalidated against the resolution
invariants (rank bookkeeping, D o D = 0, minimality, exactness) and a
table checksum before use.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path
from typing import Optional

import numpy as np

from . import ENGINE_VERSION
from .errors import EngineIntegrityError
from .grouptheory import GroupTable
from .linalg import packed_width
from .resolution import MinimalResolution


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name)


def cache_path(cache_dir, group: GroupTable, maxdeg: int) -> Path:
    # The short digest keeps distinct tables with colliding auto-generated
    # names (e.g. two order-4 subgroups of the same parent) apart.
    digest = _table_digest(group)[:10]
    fname = (f"{_safe_name(group.name)}_{digest}_p{group.p}_deg{maxdeg}"
             f"_v{ENGINE_VERSION}.json")
    return Path(cache_dir) / fname


def _table_digest(group: GroupTable) -> str:
    return hashlib.sha256(group.table_bytes()).hexdigest()


def save_resolution(cache_dir, res: MinimalResolution) -> Path:
    path = cache_path(cache_dir, res.group, res.maxdeg)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "engine": ENGINE_VERSION,
        "group": res.group.name,
        "p": res.group.p,
        "order": res.group.order,
        "table_sha256": _table_digest(res.group),
        "maxdeg": res.maxdeg,
        "computed_maxdeg": res.computed_maxdeg,
        "ranks": res.ranks,
        "degree1_elements": res.degree1_elements,
        "truncated": res.truncated,
        "truncation_reason": res.truncation_reason,
        "diffs": [None] + [
            [row.tobytes().hex() for row in res.diffs[n]]
            for n in range(1, res.computed_maxdeg + 1)
        ],
    }
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    tmp.replace(path)
    return path


def load_resolution(cache_dir, group: GroupTable, maxdeg: int,
                    column_cap: Optional[int]) -> Optional[MinimalResolution]:
    """Load and revalidate a cached resolution; None on a clean miss.

    A present-but-invalid entry raises EngineIntegrityError naming the
    failed revalidation check: silent acceptance of corrupt mathematics
    is worse than recomputing.
    """
    path = cache_path(cache_dir, group, maxdeg)
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise EngineIntegrityError(
            f"cache revalidation failed for {path.name}: unreadable entry ({exc})")
    return _revalidate(payload, path.name, group, maxdeg, column_cap)


def _fail(name: str, check: str):
    raise EngineIntegrityError(
        f"cache revalidation failed for {name}: {check}")


def _revalidate(payload: dict, fname: str, group: GroupTable, maxdeg: int,
                column_cap: Optional[int]) -> MinimalResolution:
    if payload.get("engine") != ENGINE_VERSION:
        _fail(fname, "engine version mismatch")
    if payload.get("p") != group.p or payload.get("order") != group.order:
        _fail(fname, "group parameters mismatch")
    if payload.get("table_sha256") != _table_digest(group):
        _fail(fname, "multiplication table checksum mismatch")
    ranks = payload.get("ranks")
    if not isinstance(ranks, list) or not ranks or ranks[0] != 1:
        _fail(fname, "ranks[0] != 1")
    computed = payload.get("computed_maxdeg")
    if computed != len(ranks) - 1:
        _fail(fname, "rank list length disagrees with computed_maxdeg")
    order = group.order
    diffs: list = [None]
    raw = payload.get("diffs") or []
    if len(raw) != computed + 1:
        _fail(fname, "differential list length mismatch")
    for n in range(1, computed + 1):
        width = packed_width(ranks[n - 1] * order)
        rows = raw[n]
        if len(rows) != ranks[n]:
            _fail(fname, f"degree {n}: row count disagrees with rank")
        try:
            arr = np.stack([
                np.frombuffer(bytes.fromhex(r), dtype=np.uint8) for r in rows
            ]) if rows else np.zeros((0, width), dtype=np.uint8)
        except ValueError:
            _fail(fname, f"degree {n}: undecodable rows")
        if rows and arr.shape[1] != width:
            _fail(fname, f"degree {n}: row width mismatch")
        diffs.append(np.ascontiguousarray(arr))
    res = MinimalResolution.from_data(
        group, payload.get("maxdeg", maxdeg), ranks, diffs,
        payload.get("degree1_elements", []),
        bool(payload.get("truncated", False)),
        payload.get("truncation_reason", ""), column_cap)
    for n in range(1, computed + 1):
        if not res.check_minimality(n):
            _fail(fname, f"minimality fails at degree {n}")
        if not res.check_dd_zero(n):
            _fail(fname, f"D o D != 0 at degree {n}")
    for n in range(0, computed):
        if not res.check_exactness(n):
            _fail(fname, f"exactness fails at degree {n}")
    return res
