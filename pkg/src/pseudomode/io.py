"""Reading run configurations and writing/reading reports.

Configurations and structured reports are TOML. Complex numbers are stored
as ``[re, im]`` pairs. Floats in structured reports use Python's shortest
round-trip representation, so re-parsing gives the identical bits; delimited
tables use 17 significant digits.
"""
from __future__ import annotations

import io
import sys

import numpy as np
import tomli_w

from .exceptions import ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

FLOAT_FMT = "{:.17g}"


def load_toml(path):
    """Parse a TOML file; syntax errors become ValidationError with the location."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def loads_toml(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(str(exc)) from exc


def pair(z):
    z = complex(z)
    return [z.real, z.imag]


def pairs(values):
    return [pair(z) for z in values]


def unpair(values):
    return np.array([complex(re, im) for re, im in values], dtype=complex)


def _plain(obj):
    # numpy scalars and arrays into plain Python for the TOML writer
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, complex):
        return pair(obj)
    return obj


def dumps_structured(report):
    return tomli_w.dumps(_plain(report))


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT.format(float(v))
    return str(v)


def dumps_delimited(columns, rows, sep="\t"):
    """Tab-separated table with one ``#`` header line of ``name [unit]`` labels."""
    buf = io.StringIO()
    buf.write("# " + sep.join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, header has {len(columns)}")
        buf.write(sep.join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def loads_delimited(text):
    """Parse a table written by :func:`dumps_delimited` into (columns, rows)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValidationError("delimited report lacks its header line")
    columns = lines[0][2:].split("\t")
    rows = []
    for line in lines[1:]:
        fields = line.split("\t")
        rows.append([_parse_field(f) for f in fields])
    return columns, rows


def _parse_field(text):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if text in ("true", "false"):
        return text == "true"
    return text


def load_samples(path):
    """Read ``omega re im`` rows (whitespace or comma separated, ``#`` comments)."""
    try:
        with open(path) as fh:
            data = np.loadtxt(fh, comments="#", delimiter=None, ndmin=2,
                              converters=None)
    except OSError as exc:
        raise ValidationError(f"cannot read samples file {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise ValidationError(f"samples file {path}: {exc}") from exc
    if data.shape[1] not in (2, 3):
        raise ValidationError(f"samples file {path}: expected 2 or 3 columns, got {data.shape[1]}")
    values = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0.0)
    return data[:, 0], values
