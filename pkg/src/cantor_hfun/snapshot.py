"""JSON snapshots of converged circular preimages, keyed by ``(level, n, eps)``."""

from __future__ import annotations

import json
import os
from typing import Optional

from .conformal import PreimageResult
from .exceptions import HFunctionError
from .geometry import CircularDomain, SlitDomain

FORMAT = "cantor-hfun-preimage/1"


class SnapshotError(HFunctionError, ValueError):
    pass


def snapshot_key(level, n: int, eps: float) -> dict:
    return {"level": level, "n": int(n), "eps": float(eps)}


def save_snapshot(path, result: PreimageResult, slits: SlitDomain, n: int, eps: float) -> None:
    payload = {"format": FORMAT, "key": snapshot_key(slits.level, n, eps),
               **result.to_dict(slits, n, eps)}
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=1)
    os.replace(tmp, path)


def load_snapshot(path, level, n: int, eps: float) -> Optional[CircularDomain]:
    """Circular domain stored at ``path``; ``None`` if the file does not exist.

    A snapshot made for a different ``(level, n, eps)`` is rejected.
    """
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format") != FORMAT:
        raise SnapshotError(f"{path} is not a preimage snapshot")
    want = snapshot_key(level, n, eps)
    if data.get("key") != want:
        raise SnapshotError(f"snapshot key {data.get('key')} does not match {want}")
    dom = CircularDomain.from_dict(data)
    if dom.m != 2 ** level:
        raise SnapshotError("snapshot circle count does not match the level")
    return dom
