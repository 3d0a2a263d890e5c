"""Flat-file outputs: CSV per-trial data and JSON summaries.

Floats are written with 17 significant digits so they parse back to the same
double.  Every file opens with a metadata record (config, seed, version,
timestamp); in CSV files it is a single ``#`` comment line holding JSON.
"""

from __future__ import annotations

import datetime as _dt
import json
import math
from pathlib import Path

import numpy as np

from . import __version__


class OutputError(OSError):
    """Writing an output file failed."""


def format_value(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _json_encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        s = format(x, ".17g")
        if all(ch not in s for ch in ".e"):
            s += ".0"
        return s
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{_json_encode(v, indent, level + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "to_dict"):
        return _json_encode(obj.to_dict(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON text with insertion-ordered keys and 17-digit floats."""
    return _json_encode(obj, indent, 0) + "\n"


def metadata(command, config, seed=None, timestamp=True):
    meta = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
    }
    meta["timestamp"] = (_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
                         if timestamp else None)
    return meta


def write_json(path, meta, payload):
    doc = {"meta": meta}
    doc.update(payload)
    _write_text(path, dumps(doc))
    return doc


class CsvWriter:
    """Streams rows to ``path`` with a metadata line and a fixed header.

    Opened in append mode when ``resume`` is set and the file exists, so an
    interrupted sweep can continue where it stopped.
    """

    def __init__(self, path, columns, meta, resume=False):
        self.path = Path(path)
        self.columns = tuple(columns)
        try:
            if resume and self.path.exists():
                self._fh = self.path.open("a")
            else:
                self._fh = self.path.open("w")
                self._fh.write("# " + json.dumps(meta, separators=(",", ":")) + "\n")
                self._fh.write(",".join(self.columns) + "\n")
        except OSError as exc:
            raise OutputError(f"{self.path}: {exc.strerror or exc}") from exc

    def write(self, row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(self.columns)}")
        self._fh.write(",".join(format_value(x) for x in row) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_csv(path):
    """``(meta, columns, rows)``; rows are lists of strings."""
    lines = Path(path).read_text().splitlines()
    meta = None
    if lines and lines[0].startswith("#"):
        meta = json.loads(lines[0][1:].strip())
        lines = lines[1:]
    if not lines:
        return meta, (), []
    cols = tuple(lines[0].split(","))
    return meta, cols, [ln.split(",") for ln in lines[1:] if ln]


def completed_trials(path):
    """Number of data rows already in a CSV written by :class:`CsvWriter`."""
    p = Path(path)
    if not p.exists():
        return 0
    return len(read_csv(p)[2])


def _write_text(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror or exc}") from exc
