"""8-bit PGM reading and writing (ASCII P2 and binary P5)."""
from __future__ import annotations

from pathlib import Path

import numpy as np


class PGMError(ValueError):
    pass


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping # comments."""
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i >= n:
            raise PGMError("truncated PGM header")
        if data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < n and not data[j:j + 1].isspace() and data[j:j + 1] != b"#":
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def parse_pgm(data: bytes) -> np.ndarray:
    """Decode PGM bytes into a uint8 array of shape (height, width)."""
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"not an 8-bit grayscale PGM (magic {magic!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PGMError("malformed PGM header") from None
    if width <= 0 or height <= 0:
        raise PGMError(f"bad image size {width}x{height}")
    if not 0 < maxval < 256:
        raise PGMError(f"only 8-bit PGM is supported (maxval {maxval})")
    if magic == b"P5":
        start = pos + 1  # exactly one whitespace byte after maxval
        raw = data[start:start + width * height]
        if len(raw) != width * height:
            raise PGMError(f"expected {width * height} pixel bytes, found {len(raw)}")
        pixels = np.frombuffer(raw, dtype=np.uint8).astype(np.int64)
    else:
        body = b" ".join(line.split(b"#", 1)[0] for line in data[pos:].splitlines())
        try:
            pixels = np.array([int(t) for t in body.split()], dtype=np.int64)
        except ValueError:
            raise PGMError("non-integer pixel value in ASCII PGM") from None
        if pixels.size != width * height:
            raise PGMError(f"expected {width * height} pixel values, found {pixels.size}")
    if pixels.size and (pixels.min() < 0 or pixels.max() > maxval):
        raise PGMError(f"pixel value outside [0, {maxval}]")
    if maxval != 255:
        pixels = np.rint(pixels * (255.0 / maxval)).astype(np.int64)
    return pixels.reshape(height, width).astype(np.uint8)


def read_pgm(path: str | Path) -> np.ndarray:
    return parse_pgm(Path(path).read_bytes())


def encode_pgm(pixels: np.ndarray, binary: bool = True) -> bytes:
    arr = np.asarray(pixels)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise PGMError("PGM output needs a 2-D uint8 array")
    h, w = arr.shape
    if binary:
        return f"P5\n{w} {h}\n255\n".encode("ascii") + arr.tobytes()
    lines = [f"P2\n{w} {h}\n255"]
    lines += [" ".join(str(v) for v in row) for row in arr.tolist()]
    return ("\n".join(lines) + "\n").encode("ascii")


def write_pgm(path: str | Path, pixels: np.ndarray, binary: bool = True) -> Path:
    path = Path(path)
    path.write_bytes(encode_pgm(pixels, binary))
    return path


def to_gray(pixels: np.ndarray) -> np.ndarray:
    """8-bit intensities to the [-1, 1] working scale: x -> 2x/255 - 1."""
    arr = np.asarray(pixels)
    if arr.dtype != np.uint8:
        raise PGMError("expected uint8 pixels")
    return arr.astype(np.float64) * (2.0 / 255.0) - 1.0


def from_gray(img: np.ndarray) -> np.ndarray:
    """Inverse of ``to_gray``, rounding and clipping to 0..255."""
    return np.clip(np.rint((np.asarray(img, dtype=float) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def check_gray(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite intensities")
    if arr.min() < -1.0 or arr.max() > 1.0:
        raise ValueError("intensities must lie in [-1, 1]")
    return arr
