"""File formats: complex tensors as JSON, convergence traces as CSV, reports as JSON lines."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .errors import ShapeError

TRACE_HEADER = ("iteration", "loss", "constraint_residual", "metric", "wall_time_ms")


def _fmt(x: Optional[float]) -> str:
    if x is None:
        return ""
    # 17 significant digits round-trip every double exactly
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SerializedTensor:
    shape: tuple
    re: tuple
    im: tuple

    def __post_init__(self):
        size = math.prod(self.shape)
        if len(self.re) != size or len(self.im) != size:
            raise ShapeError(f"expected {size} entries for shape {list(self.shape)}")

    @classmethod
    def from_array(cls, a) -> "SerializedTensor":
        a = np.asarray(a, dtype=np.complex128)
        flat = a.ravel()
        return cls(tuple(a.shape), tuple(flat.real.tolist()), tuple(flat.imag.tolist()))

    def to_array(self) -> np.ndarray:
        re = np.array(self.re, dtype=float)
        im = np.array(self.im, dtype=float)
        return (re + 1j * im).reshape(self.shape)

    def to_json(self) -> str:
        # json writes the shortest repr of each double, which round-trips exactly
        return json.dumps({"shape": list(self.shape), "re": list(self.re), "im": list(self.im)})

    @classmethod
    def from_json(cls, text: str) -> "SerializedTensor":
        body = json.loads(text)
        try:
            shape = tuple(int(s) for s in body["shape"])
            return cls(shape, tuple(map(float, body["re"])), tuple(map(float, body["im"])))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed tensor record: {exc}") from exc


def save_tensor(path, a) -> None:
    Path(path).write_text(SerializedTensor.from_array(a).to_json() + "\n", encoding="utf-8")


def load_tensor(path) -> np.ndarray:
    return SerializedTensor.from_json(Path(path).read_text(encoding="utf-8")).to_array()


def trace_rows(losses, residuals, metrics=None, wall_ms=None) -> list:
    n = len(losses)
    metrics = metrics if metrics is not None else [None] * n
    wall_ms = wall_ms if wall_ms is not None else [None] * n
    return [(i, losses[i], residuals[i], metrics[i], wall_ms[i]) for i in range(n)]


def format_trace(rows: Iterable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for it, loss, residual, metric, wall in rows:
        writer.writerow([int(it), _fmt(loss), _fmt(residual), _fmt(metric), _fmt(wall)])
    return buf.getvalue()


def write_trace(path, rows: Iterable) -> None:
    Path(path).write_text(format_trace(rows), encoding="utf-8")


def read_trace(path) -> list:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ShapeError(f"unexpected trace header {reader.fieldnames}")
        return [
            {k: (int(v) if k == "iteration" else (float(v) if v else None)) for k, v in row.items()}
            for row in reader
        ]


def format_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
