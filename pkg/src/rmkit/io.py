"""File formats: gray images, CSV fields, mask PNGs, dataset manifests.

The CSV field format is lossless: a two-line header (column names, then
width/height/spacing) followed by one row of repr()-formatted values per
grid row, so floats round-trip bit-for-bit.  PNG field output is a lossy
8-bit min-max normalized preview.  All writes go through a temp file and
os.replace, so readers never observe a half-written file.
"""

import io as _io
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .grids import OutlineMask, ScalarField, UnitTag

_FIELD_HEADER = "width,height,h_x,h_y"


def _atomic_write_bytes(path, blob):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)


def _atomic_write_text(path, text):
    _atomic_write_bytes(path, text.encode("utf-8"))


def load_gray_image(path):
    """Read an 8- or 16-bit grayscale image as a NORMALIZED_GRAY field."""
    img = Image.open(path)
    if img.mode == "L":
        scale = 255.0
    elif img.mode in ("I", "I;16"):
        scale = 65535.0
    else:
        raise ValueError("expected a grayscale image, got mode %r" % img.mode)
    data = np.asarray(img, dtype=np.float64) / scale
    return ScalarField(data, unit=UnitTag.NORMALIZED_GRAY)


def gray_to_linear_power(field, mode="direct", p_min_db=-100.0, p_max_db=0.0):
    """Reinterpret normalized gray levels as linear power.

    "direct" keeps the values as-is; "db" maps [0, 1] affinely onto
    [p_min_db, p_max_db] and converts to linear scale.
    """
    if field.unit is not UnitTag.NORMALIZED_GRAY:
        raise ValueError("expected a NORMALIZED_GRAY field, got %s"
                         % field.unit.value)
    if mode == "direct":
        data = field.data.copy()
    elif mode == "db":
        if p_max_db <= p_min_db:
            raise ValueError("p_max_db must exceed p_min_db")
        db = field.data * (p_max_db - p_min_db) + p_min_db
        data = 10.0 ** (db / 10.0)
    else:
        raise ValueError("unknown gray mode %r" % (mode,))
    return ScalarField(data, h_x=field.h_x, h_y=field.h_y,
                       unit=UnitTag.LINEAR_POWER)


def save_field(field, path, fmt=None):
    """Write a field as lossless CSV or an 8-bit normalized PNG preview."""
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower()
    if fmt == "csv":
        lines = [_FIELD_HEADER,
                 "%d,%d,%r,%r" % (field.width, field.height,
                                  field.h_x, field.h_y)]
        for row in field.data:
            lines.append(",".join(repr(float(v)) for v in row))
        _atomic_write_text(path, "\n".join(lines) + "\n")
    elif fmt == "png":
        data = field.data
        lo = float(data.min())
        hi = float(data.max())
        norm = (data - lo) / (hi - lo) if hi > lo else np.zeros_like(data)
        img = Image.fromarray(np.round(norm * 255.0).astype(np.uint8))
        buf = _io.BytesIO()
        img.save(buf, format="PNG")
        _atomic_write_bytes(path, buf.getvalue())
    else:
        raise ValueError("unknown field format %r" % (fmt,))


def load_field(path, unit=UnitTag.NORMALIZED_GRAY):
    """Read a CSV field written by save_field."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != _FIELD_HEADER:
        raise ValueError("%s: not a field CSV (bad header)" % (path,))
    dims = lines[1].split(",")
    if len(dims) != 4:
        raise ValueError("%s: malformed dimension line" % (path,))
    w, h = int(dims[0]), int(dims[1])
    h_x, h_y = float(dims[2]), float(dims[3])
    rows = [[float(s) for s in line.split(",")] for line in lines[2:2 + h]]
    data = np.array(rows, dtype=np.float64)
    if data.shape != (h, w):
        raise ValueError("%s: expected %dx%d values, got %r"
                         % (path, h, w, data.shape))
    return ScalarField(data, h_x=h_x, h_y=h_y, unit=unit)


def save_mask(mask, path):
    """Write an outline mask as a 0/255 grayscale PNG."""
    img = Image.fromarray(mask.bits.astype(np.uint8) * 255)
    buf = _io.BytesIO()
    img.save(buf, format="PNG")
    _atomic_write_bytes(path, buf.getvalue())


def load_mask(path):
    arr = np.asarray(Image.open(path))
    return OutlineMask(arr > 127)


def read_manifest(path):
    """Parse a scene manifest: one gain,building,antenna triple per line.

    Entries are resolved relative to the manifest's directory and must
    exist; returns a list of Path triples.
    """
    path = Path(path)
    triples = []
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [s.strip() for s in line.split(",")]
        if len(parts) != 3:
            raise ValueError("manifest line needs 3 entries: %r" % raw)
        resolved = tuple(path.parent / p for p in parts)
        for p in resolved:
            if not p.exists():
                raise FileNotFoundError("manifest entry not found: %s" % p)
        triples.append(resolved)
    return triples


def read_antenna_file(path):
    """Read whitespace-separated x y transmitter positions, one per line."""
    out = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError("antenna line needs x and y: %r" % raw)
        out.append((float(parts[0]), float(parts[1])))
    return out
