"""On-disk caches for sieved tables and eigenform coefficients.

Files are keyed on (format version, weight, limit) through both the file name
and the header; anything unreadable or mismatched is rebuilt with a warning.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

from heckepoly import arith, eigenform

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


def tables_path(cache_dir: str | Path, limit: int) -> Path:
    return Path(cache_dir) / f"tables_v{FORMAT_VERSION}_n{limit}.bin"


def eigenform_path(cache_dir: str | Path, weight: int, limit: int) -> Path:
    return Path(cache_dir) / f"eigenform_v{FORMAT_VERSION}_w{weight}_n{limit}.bin"


def get_tables(limit: int, cache_dir: str | Path | None) -> arith.MultiplicativeTables:
    if cache_dir is None:
        return arith.build_tables(limit)
    path = tables_path(cache_dir, limit)
    if path.exists():
        try:
            return arith.load_tables(path, limit=limit)
        except (ValueError, OSError, struct.error) as exc:
            log.warning("rebuilding table cache %s: %s", path, exc)
    tables = arith.build_tables(limit)
    path.parent.mkdir(parents=True, exist_ok=True)
    arith.save_tables(tables, path)
    return tables


def get_eigenform(weight: int, limit: int, cache_dir: str | Path | None) -> eigenform.EigenformTable:
    if cache_dir is None:
        return eigenform.eigenform_coefficients(weight, limit)
    path = eigenform_path(cache_dir, weight, limit)
    if path.exists():
        try:
            return eigenform.load_table(path, weight=weight, limit=limit)
        except (ValueError, OSError, struct.error) as exc:
            log.warning("rebuilding coefficient cache %s: %s", path, exc)
    table = eigenform.eigenform_coefficients(weight, limit)
    path.parent.mkdir(parents=True, exist_ok=True)
    eigenform.save_table(table, path)
    return table
