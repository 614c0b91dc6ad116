"""
Output writers for spingate artifacts
CSV and JSON with a provenance header and round-trip float formatting
"""

import csv
import hashlib
import json
import logging
import os
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np

from config import UNIT_CONVENTIONS, VERSION

logger = logging.getLogger(__name__)


def format_float(value: Any) -> str:
    """Shortest round-trip representation of a number; other values pass through str()"""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def config_hash(config: Dict[str, Any]) -> str:
    """sha256 of the canonical JSON form of a run configuration"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def provenance(config: Dict[str, Any]) -> Dict[str, str]:
    return {"version": VERSION, "config_sha256": config_hash(config), "units": UNIT_CONVENTIONS}


def provenance_header(config: Dict[str, Any]) -> str:
    info = provenance(config)
    return f"# spingate {info['version']} config-sha256={info['config_sha256']} units={info['units']}"


def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              config: Optional[Dict[str, Any]] = None) -> int:
    """
    Write a CSV file with a provenance comment line and a header row

    Args:
        path: Output file
        header: Column names
        rows: Row values (numbers are written in round-trip form)
        config: Run configuration hashed into the provenance line

    Returns:
        Number of data rows written
    """
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(provenance_header(config or {}) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"Row has {len(row)} values, header has {len(header)}")
            writer.writerow([format_float(v) for v in row])
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return count


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def write_json(path: str, data: Dict[str, Any], config: Optional[Dict[str, Any]] = None) -> None:
    """Write data with a provenance object; keys sorted so equal inputs give equal bytes"""
    _ensure_parent(path)
    document = {"provenance": provenance(config or {})}
    document.update(_plain(data))
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    logger.info(f"Wrote {path}")


def read_csv_rows(path: str) -> list:
    """Data rows of a CSV written by write_csv (provenance comment and header skipped), as floats"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.reader(lines)
    next(reader)
    return [[float(v) for v in row] for row in reader]
