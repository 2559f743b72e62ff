"""
File formats: the TNS3 tensor container, 8-bit RGB images (PPM P6 / PNG),
grayscale frame stacks and solver traces (CSV / JSON).

TNS3 layout, all little-endian:
    magic  b'TNS3'        4 bytes
    version u16 = 1       2 bytes
    n1, n2, n3 u32       12 bytes
    payload float64 x n1*n2*n3, i fastest, then j, then k
"""
import csv
import json
import logging
import math
import os
from pathlib import Path
import struct
from typing import Iterable, List

import numpy as np
from PIL import Image, UnidentifiedImageError

from .exceptions import (
    BadMagic,
    CorruptHeader,
    IoFailure,
    TruncatedPayload,
    UnsupportedFormat,
    UnsupportedVersion,
)
from .tensor_types import Tensor3

logger = logging.getLogger(__name__)

TNS3_MAGIC = b'TNS3'
TNS3_VERSION = 1
_HEADER = struct.Struct('<4sHIII')

TRACE_COLUMNS = [
    'iter', 'objective', 'rmse_l', 'rmse_s', 'theta1', 'theta2', 'theta3',
    'tnn_of_l', 'l1_of_s', 'residual_fro',
]

IMAGE_FORMATS = {'.ppm': 'PPM', '.png': 'PNG'}


# ---------------------
# TNS3 tensors
# ---------------------
def write_tensor(path, t: Tensor3) -> None:
    n1, n2, n3 = t.dims
    header = _HEADER.pack(TNS3_MAGIC, TNS3_VERSION, n1, n2, n3)
    payload = t.data.astype('<f8').tobytes(order='F')
    try:
        with open(path, 'wb') as f:
            f.write(header)
            f.write(payload)
    except OSError as exc:
        raise IoFailure(f"Cannot write tensor to {path}: {exc}") from exc


def read_tensor(path) -> Tensor3:
    try:
        with open(path, 'rb') as f:
            blob = f.read()
    except OSError as exc:
        raise IoFailure(f"Cannot read tensor from {path}: {exc}") from exc

    if len(blob) < _HEADER.size:
        if not blob.startswith(TNS3_MAGIC[:len(blob)]):
            raise BadMagic(f"{path} is not a TNS3 file")
        raise TruncatedPayload(f"{path}: header is {len(blob)} bytes, expected {_HEADER.size}")
    magic, version, n1, n2, n3 = _HEADER.unpack_from(blob)
    if magic != TNS3_MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} is not {TNS3_MAGIC!r}")
    if version != TNS3_VERSION:
        raise UnsupportedVersion(f"{path}: TNS3 version {version} (supported: {TNS3_VERSION})")

    expected = 8 * n1 * n2 * n3
    payload = blob[_HEADER.size:]
    if len(payload) != expected:
        raise TruncatedPayload(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    values = np.frombuffer(payload, dtype='<f8').reshape((n1, n2, n3), order='F')
    return Tensor3(values.astype(np.float64))


# ---------------------
# Images
# ---------------------
def _image_format(path) -> str:
    fmt = IMAGE_FORMATS.get(Path(path).suffix.lower())
    if fmt is None:
        raise UnsupportedFormat(f"{path}: supported image types are {', '.join(IMAGE_FORMATS)}")
    return fmt


def _open_image(path):
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError as exc:
        raise IoFailure(f"Cannot read image {path}: {exc}") from exc
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise CorruptHeader(f"{path}: cannot parse image: {exc}") from exc
    return img


def load_image(path) -> Tensor3:
    """8-bit RGB image as a height x width x 3 tensor with values in [0, 255]"""
    img = _open_image(path)
    if img.format not in IMAGE_FORMATS.values():
        raise UnsupportedFormat(f"{path}: {img.format} images are not supported")
    if img.mode != 'RGB':
        raise UnsupportedFormat(f"{path}: expected 8-bit RGB, got mode {img.mode}")
    return Tensor3(np.asarray(img, dtype=np.float64))


def to_uint8(values: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half to even"""
    return np.rint(np.clip(values, 0.0, 255.0)).astype(np.uint8)


def save_image(path, t: Tensor3) -> None:
    fmt = _image_format(path)
    if t.dims[2] != 3:
        raise UnsupportedFormat(f"RGB export needs 3 channels, got {t.dims[2]}")
    try:
        Image.fromarray(to_uint8(t.data), mode='RGB').save(path, format=fmt)
    except OSError as exc:
        raise IoFailure(f"Cannot write image {path}: {exc}") from exc


def load_frames(paths: Iterable) -> Tensor3:
    """Stack grayscale versions of same-sized frames into height x width x T"""
    planes = []
    for path in paths:
        img = _open_image(path)
        planes.append(np.asarray(img.convert('L'), dtype=np.float64))
    if not planes:
        raise IoFailure("No frames to stack")
    shapes = {p.shape for p in planes}
    if len(shapes) != 1:
        raise CorruptHeader(f"Frames differ in size: {sorted(shapes)}")
    return Tensor3(np.stack(planes, axis=2))


def save_frames(directory, t: Tensor3, prefix: str = 'frame', fmt: str = 'png') -> List[str]:
    """Write every frontal slice as an 8-bit grayscale image"""
    os.makedirs(directory, exist_ok=True)
    written = []
    for k in range(t.dims[2]):
        path = os.path.join(directory, f"{prefix}_{k + 1:04d}.{fmt}")
        try:
            Image.fromarray(to_uint8(t.frontal(k)), mode='L').save(path, format=_image_format(path))
        except OSError as exc:
            raise IoFailure(f"Cannot write frame {path}: {exc}") from exc
        written.append(path)
    return written


# ---------------------
# Traces and reports
# ---------------------
def format_float(value) -> str:
    """17 significant digits, enough to round-trip any double"""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(value)
    return f"{value:.17g}"


def to_jsonable(value):
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'"""
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_rows(path, columns: List[str], rows: Iterable[dict], fmt: str = 'csv') -> None:
    """Write dict rows as CSV (full-precision floats) or as a JSON list"""
    rows = list(rows)
    try:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            if fmt == 'csv':
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(columns)
                for row in rows:
                    writer.writerow([
                        format_float(row[c]) if isinstance(row[c], (int, float, np.number)) else row[c]
                        for c in columns
                    ])
            elif fmt == 'json':
                json.dump([{c: to_jsonable(row[c]) for c in columns} for row in rows], f, indent=2)
                f.write('\n')
            else:
                raise ValueError(f"Unknown report format '{fmt}'")
    except OSError as exc:
        raise IoFailure(f"Cannot write {path}: {exc}") from exc


def write_trace(path, trace, fmt: str = 'csv') -> None:
    """Per-iteration solver diagnostics as plottable columns"""
    write_rows(path, TRACE_COLUMNS, (record.as_row() for record in trace), fmt)
    logger.debug(f"Wrote {len(trace)} trace records to {path}")


def read_trace_csv(path) -> List[dict]:
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        return [
            {k: (int(v) if k == 'iter' else float(v)) for k, v in row.items()}
            for row in reader
        ]


def write_json(path, payload: dict) -> None:
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
            f.write('\n')
    except OSError as exc:
        raise IoFailure(f"Cannot write {path}: {exc}") from exc
