"""CSV / JSON persistence.

CSV files are comma-separated with a header row and numbers written with 17
significant digits, so every double round-trips exactly. JSON is written with
sorted keys; non-finite floats become ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

from .distributions import SampleBatch, params_from_dict
from .errors import DomainError

PathOrStream = Union[str, os.PathLike, IO[str]]


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _write_text(target: PathOrStream, text: str) -> None:
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def write_json(target: PathOrStream, obj) -> None:
    _write_text(target, dumps(obj))


def csv_text(header: Sequence[str], columns: Sequence[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(target: PathOrStream, header: Sequence[str], columns: Sequence[Iterable]) -> None:
    _write_text(target, csv_text(header, columns))


def load_params(path: PathOrStream):
    """Read a ``{"family": ..., ...}`` parameter object."""
    try:
        if hasattr(path, "read"):
            d = json.load(path)
        else:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read parameters: {exc}") from exc
    return params_from_dict(d)


def sidecar_path(path) -> str:
    return os.fspath(path) + ".json"


def sample_metadata(batch: SampleBatch) -> dict:
    return {
        "n": batch.n,
        "seed": batch.seed,
        "method": batch.method,
        "acceptance_rate": batch.acceptance_rate,
        "block_size": batch.block_size,
        "params": batch.params.to_dict() if batch.params is not None else None,
    }


def write_sample(batch: SampleBatch, path, extra_meta: Optional[dict] = None) -> None:
    """Single-column CSV ``x`` plus a ``<path>.json`` sidecar."""
    write_csv(path, ["x"], [batch.values])
    meta = sample_metadata(batch)
    if extra_meta:
        meta.update(extra_meta)
    write_json(sidecar_path(path), meta)


def read_sample_csv(path: PathOrStream) -> np.ndarray:
    """Read a single-column sample; an optional non-numeric header is skipped.

    Raises :class:`DomainError` for unreadable, empty or non-numeric input.
    """
    try:
        if hasattr(path, "read"):
            text = path.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read sample: {exc}") from exc
    values = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        cell = row[0].strip()
        try:
            values.append(float(cell))
        except ValueError:
            if lineno == 1 and not values:
                continue  # header
            raise DomainError(f"line {lineno}: not a number: {cell!r}") from None
    if not values:
        raise DomainError("sample file contains no observations")
    return np.asarray(values, dtype=float)


def solution_columns(sol) -> tuple:
    header = ["x", "f", "f_prime", "residual", "masked"]
    return header, [sol.grid, sol.f_values, sol.f_prime_values, sol.residuals, sol.masked]


def solution_to_dict(sol, meta: Optional[dict] = None) -> dict:
    header, cols = solution_columns(sol)
    d = {"summary": sol.summary(), "columns": header, "rows": [list(r) for r in zip(*cols)]}
    if meta:
        d.update(meta)
    return d
