"""Reference-field caching keyed by input fingerprints.

Cache entries are stored in a platform-appropriate directory via
``platformdirs``.  Each finite-difference solution is saved as
``<key>.npz`` next to a ``<key>.json`` fingerprint, where the key is the
SHA-256 of the fingerprint itself.  A lookup only hits when both files
exist and the stored fingerprint equals the requested one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from logging import getLogger
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from platformdirs import user_cache_dir

from .models import Field

if TYPE_CHECKING:
    from typing import Any

    from .drift import DriftSpec
    from .models import FdConfig

log = getLogger(__name__)


def _cache_root() -> Path:
    """Return the platform-appropriate root cache directory for conda-kolmogorov."""
    return Path(user_cache_dir("conda-kolmogorov"))


def _fd_cache_dir() -> Path:
    """Return the reference-field cache directory, creating it if necessary."""
    d = _cache_root() / "fd"
    d.mkdir(parents=True, exist_ok=True)
    return d


def fd_fingerprint(drift: DriftSpec, cfg: FdConfig, sigma_c2: float) -> dict[str, Any]:
    """Everything the finite-difference solution depends on."""
    from . import __version__

    return {
        "drift": drift.signature or drift.name,
        "sigma_c2": sigma_c2,
        "fd": {k: v for k, v in asdict(cfg).items() if k != "grid"},
        "grid": asdict(cfg.grid),
        "version": __version__,
    }


def _key(fingerprint: dict[str, Any]) -> str:
    blob = json.dumps(fingerprint, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:32]


def has_field(fingerprint: dict[str, Any]) -> bool:
    """Whether an entry for *fingerprint* exists (contents are not checked)."""
    d = _fd_cache_dir()
    key = _key(fingerprint)
    return (d / f"{key}.json").exists() and (d / f"{key}.npz").exists()


def load_field(fingerprint: dict[str, Any]) -> Field | None:
    """Return the cached field for *fingerprint*, or None on a miss."""
    from .models import Grid2D

    key = _key(fingerprint)
    d = _fd_cache_dir()
    meta, data = d / f"{key}.json", d / f"{key}.npz"
    if not (meta.exists() and data.exists()):
        return None
    try:
        stored = json.loads(meta.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError):
        return None
    if stored != json.loads(json.dumps(fingerprint, sort_keys=True)):
        return None
    try:
        with np.load(data) as archive:
            values = archive["values"]
    except (OSError, KeyError, ValueError):
        return None
    log.info("reference cache hit %s", key)
    return Field(Grid2D(**fingerprint["grid"]), values)


def save_field(fingerprint: dict[str, Any], field: Field) -> Path:
    """Write *field* under *fingerprint* and return the ``.npz`` path."""
    key = _key(fingerprint)
    d = _fd_cache_dir()
    data = d / f"{key}.npz"
    np.savez_compressed(data, values=field.values)
    (d / f"{key}.json").write_text(
        json.dumps(fingerprint, indent=2, sort_keys=True), encoding="utf-8"
    )
    log.debug("reference cached as %s", key)
    return data
