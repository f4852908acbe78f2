"""8-bit raster type and PNG/PPM file I/O.

PNG handles user assets (via Pillow), PPM/PGM are trivial binary formats for
dependency-free fixtures.  Everything downstream operates on interleaved
uint8 arrays of shape (height, width, channels) with channels 1 or 3.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


@dataclass(frozen=True)
class RasterImage:
    """Row-major interleaved 8-bit raster, 1 (gray) or 3 (RGB) channels."""

    width: int
    height: int
    channels: int
    data: np.ndarray  # uint8, shape (height, width, channels)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        if self.data.dtype != np.uint8:
            raise ValueError(f"raster data must be uint8, got {self.data.dtype}")
        if self.data.shape != (self.height, self.width, self.channels):
            raise ValueError(
                f"data shape {self.data.shape} does not match "
                f"{self.height}x{self.width}x{self.channels}"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        """Wrap a (H,W), (H,W,1) or (H,W,3) uint8 array."""
        a = np.asarray(arr)
        if a.ndim == 2:
            a = a[:, :, None]
        if a.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D array, got shape {a.shape}")
        a = np.ascontiguousarray(a, dtype=np.uint8)
        h, w, c = a.shape
        return cls(width=w, height=h, channels=c, data=a)

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.channels == other.channels
            and np.array_equal(self.data, other.data)
        )


_PNM_MAGIC = {b"P5": 1, b"P6": 3}


def _read_pnm(raw: bytes, path) -> RasterImage:
    magic = raw[:2]
    if magic not in _PNM_MAGIC:
        raise ValueError(f"{path}: unsupported PNM magic {magic!r}")
    # header = magic, width, height, maxval; '#' comments allowed between tokens
    tokens: list[int] = []
    pos = 2
    while len(tokens) < 3:
        m = re.match(rb"(?:\s+|#[^\n]*\n)*(\d+)", raw[pos:])
        if m is None:
            raise ValueError(f"{path}: corrupt PNM header")
        tokens.append(int(m.group(1)))
        pos += m.end()
    w, h, maxval = tokens
    if maxval != 255:
        raise ValueError(f"{path}: only maxval 255 supported, got {maxval}")
    if w < 1 or h < 1:
        raise ValueError(f"{path}: corrupt PNM dimensions {w}x{h}")
    pos += 1  # single whitespace byte after maxval
    c = _PNM_MAGIC[magic]
    n = w * h * c
    body = raw[pos : pos + n]
    if len(body) != n:
        raise ValueError(f"{path}: truncated PNM payload ({len(body)} of {n} bytes)")
    data = np.frombuffer(body, dtype=np.uint8).reshape(h, w, c)
    return RasterImage(width=w, height=h, channels=c, data=data.copy())


def _write_pnm(img: RasterImage, path: Path) -> None:
    magic = "P6" if img.channels == 3 else "P5"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    path.write_bytes(header + img.data.tobytes())


def load_image(path) -> RasterImage:
    """Decode a PNG or binary PPM/PGM file into a RasterImage.

    Color sources give 3 channels, grayscale sources 1.  PNG alpha is
    dropped with a warning.
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw[:2] in _PNM_MAGIC:
        return _read_pnm(raw, path)
    if raw[:8] == b"\x89PNG\r\n\x1a\n":
        with Image.open(path) as im:
            if im.mode in ("RGBA", "LA", "PA"):
                warnings.warn(f"{path}: alpha channel dropped", stacklevel=2)
            if im.mode in ("L",):
                arr = np.asarray(im, dtype=np.uint8)
            elif im.mode == "LA":
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
        return RasterImage.from_array(arr)
    raise ValueError(f"{path}: unsupported format (expected PNG or binary PPM/PGM)")


def save_image(img: RasterImage, path) -> None:
    """Encode losslessly; format chosen by extension (.png, .ppm, .pgm, .pnm)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in (".ppm", ".pgm", ".pnm"):
        _write_pnm(img, path)
    elif suffix == ".png":
        arr = img.data[:, :, 0] if img.channels == 1 else img.data
        Image.fromarray(arr, mode="L" if img.channels == 1 else "RGB").save(path, format="PNG")
    else:
        raise ValueError(f"{path}: unsupported output format {suffix!r}")
