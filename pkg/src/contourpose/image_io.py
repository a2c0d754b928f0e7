"""Netpbm image I/O and the geometric preprocessing stages of the pipeline.

Images are plain numpy arrays: a grayscale image is a 2-D float64 array of
intensities (nominally in [0, 255], transform outputs may leave that range),
a color image is an (rows, cols, 3) float64 array of RGB triples.

Only the netpbm formats P2/P5 (grayscale) and P3/P6 (RGB) with maxval <= 255
are read; P5/P6 are written.  Nothing else is supported on purpose: the
source data this pipeline targets is plain PPM.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetpbmError",
    "CropRect",
    "parse_netpbm",
    "write_netpbm",
    "to_grayscale",
    "crop",
    "resize",
]

_WHITESPACE = b" \t\n\r\x0b\x0c"


class NetpbmError(ValueError):
    """Raised for any malformed or unsupported netpbm input."""


@dataclass(frozen=True)
class CropRect:
    """Zero-based crop window: ``top``/``left`` offsets, positive extent."""

    top: int
    left: int
    height: int
    width: int

    def __post_init__(self):
        if self.top < 0 or self.left < 0:
            raise ValueError(f"crop offsets must be non-negative, got {self}")
        if self.height < 1 or self.width < 1:
            raise ValueError(f"crop extent must be positive, got {self}")


def _skip_separators(data: bytes, pos: int) -> int:
    """Advance past whitespace and '#' comments (comment runs to end of line)."""
    n = len(data)
    while pos < n:
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == 0x23:  # '#'
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    return pos


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    pos = _skip_separators(data, pos)
    start = pos
    n = len(data)
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != 0x23:
        pos += 1
    if start == pos:
        raise NetpbmError("truncated netpbm header")
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _next_token(data, pos)
    try:
        value = int(token)
    except ValueError:
        raise NetpbmError(
            f"malformed netpbm header: expected integer {what}, got {token!r}"
        ) from None
    return value, pos


def parse_netpbm(data: bytes) -> np.ndarray:
    """Decode P2/P3/P5/P6 bytes into a float64 image array.

    P2/P5 yield a 2-D grayscale array, P3/P6 an (rows, cols, 3) RGB array.
    Only maxval <= 255 is accepted; values are kept verbatim, not rescaled.
    """
    if len(data) < 2:
        raise NetpbmError("truncated netpbm header")
    magic = bytes(data[:2])
    if magic in (b"P1", b"P4", b"P7"):
        raise NetpbmError(f"unsupported netpbm magic {magic.decode()}")
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise NetpbmError(f"malformed netpbm header: bad magic {magic!r}")
    color = magic in (b"P3", b"P6")
    binary = magic in (b"P5", b"P6")
    channels = 3 if color else 1

    pos = 2
    cols, pos = _header_int(data, pos, "width")
    rows, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if cols < 1 or rows < 1:
        raise NetpbmError(f"malformed netpbm header: bad dimensions {cols}x{rows}")
    if maxval > 255:
        raise NetpbmError(f"unsupported netpbm maxval {maxval} (must be <= 255)")
    if maxval < 1:
        raise NetpbmError(f"malformed netpbm header: bad maxval {maxval}")

    count = rows * cols * channels
    if binary:
        # Exactly one whitespace byte separates maxval from the raster.
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise NetpbmError("malformed netpbm header: missing raster separator")
        raster = data[pos + 1 : pos + 1 + count]
        if len(raster) < count:
            raise NetpbmError(
                f"truncated pixel data: expected {count} bytes, got {len(raster)}"
            )
        flat = np.frombuffer(bytes(raster), dtype=np.uint8).astype(np.float64)
    else:
        values = np.empty(count, dtype=np.float64)
        for i in range(count):
            try:
                token, pos = _next_token(data, pos)
            except NetpbmError:
                raise NetpbmError(
                    f"truncated pixel data: expected {count} samples, got {i}"
                ) from None
            try:
                sample = int(token)
            except ValueError:
                raise NetpbmError(f"malformed pixel sample {token!r}") from None
            if not 0 <= sample <= 255:
                raise NetpbmError(f"pixel sample {sample} out of range [0, 255]")
            values[i] = sample
        flat = values

    if color:
        return flat.reshape(rows, cols, 3)
    return flat.reshape(rows, cols)


def write_netpbm(img: np.ndarray) -> bytes:
    """Encode an image as binary P5 (2-D input) or P6 (3-D input), maxval 255.

    Values are rounded to nearest and clipped to [0, 255]; integer-valued
    images in range round-trip exactly through :func:`parse_netpbm`.
    """
    img = np.asarray(img)
    if img.ndim == 2:
        magic = b"P5"
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"expected 2-D gray or (rows, cols, 3) image, got {img.shape}")
    rows, cols = img.shape[:2]
    raster = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    header = b"%s\n%d %d\n255\n" % (magic, cols, rows)
    return header + raster.tobytes()


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Average the three channels in real arithmetic (no re-quantization)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (rows, cols, 3) RGB image, got shape {img.shape}")
    return img.mean(axis=2)


def crop(img: np.ndarray, rect: CropRect) -> np.ndarray:
    """Extract the exact sub-lattice given by ``rect`` (no resampling)."""
    rows, cols = img.shape[:2]
    if rect.top + rect.height > rows or rect.left + rect.width > cols:
        raise ValueError(
            f"crop rectangle {rect} exceeds image bounds {rows}x{cols}"
        )
    return img[rect.top : rect.top + rect.height, rect.left : rect.left + rect.width].copy()


def resize(img: np.ndarray, out_rows: int, out_cols: int) -> np.ndarray:
    """Bilinear resize with corner-aligned sample mapping.

    Output sample i maps to source position i * (in - 1) / (out - 1), so the
    four image corners are reproduced exactly and affine intensity fields are
    preserved.  A size-1 output axis takes the first source sample.
    """
    if out_rows < 1 or out_cols < 1:
        raise ValueError(f"output size must be positive, got {out_rows}x{out_cols}")
    img = np.asarray(img, dtype=np.float64)
    rows, cols = img.shape[:2]

    def axis_coords(n_in: int, n_out: int):
        pos = np.linspace(0.0, n_in - 1.0, n_out)
        lo = np.floor(pos).astype(int)
        lo = np.minimum(lo, n_in - 1)
        hi = np.minimum(lo + 1, n_in - 1)
        frac = pos - lo
        return lo, hi, frac

    r0, r1, fr = axis_coords(rows, out_rows)
    c0, c1, fc = axis_coords(cols, out_cols)
    top = img[r0] * (1.0 - fr)[:, None] + img[r1] * fr[:, None]
    out = top[:, c0] * (1.0 - fc)[None, :] + top[:, c1] * fc[None, :]
    return out
