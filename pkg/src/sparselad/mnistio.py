"""IDX image-file ingestion (the MNIST container format).

Only the unsigned-byte 3-D image tensor is supported: big-endian magic
0x00000803, three big-endian uint32 dimensions (count, rows, cols), then the
raw pixel bytes. Parsing is strict -- short payloads and trailing bytes are
both rejected -- and ``serialize_idx_images`` inverts ``parse_idx_images``
bit-exactly.

Dataset files are not shipped; point the CLI at a locally downloaded copy.
"""

import struct
from dataclasses import dataclass

import numpy as np

IDX_IMAGES_MAGIC = 0x00000803


class IdxFormatError(ValueError):
    """Malformed IDX payload."""


class MagicMismatch(IdxFormatError):
    pass


class Truncated(IdxFormatError):
    pass


class TrailingData(IdxFormatError):
    pass


@dataclass
class IdxImages:
    count: int
    rows: int
    cols: int
    pixels: np.ndarray  # uint8, length count*rows*cols, image-major

    def image(self, i):
        """One image as a (rows, cols) uint8 array."""
        if not 0 <= i < self.count:
            raise IndexError(f"image index {i} out of range [0, {self.count})")
        size = self.rows * self.cols
        return self.pixels[i * size:(i + 1) * size].reshape(self.rows, self.cols)


def parse_idx_images(data):
    if len(data) < 16:
        raise Truncated(f"header needs 16 bytes, got {len(data)}")
    magic, count, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise MagicMismatch(f"magic 0x{magic:08x} != 0x{IDX_IMAGES_MAGIC:08x}")
    expected = 16 + count * rows * cols
    if len(data) < expected:
        raise Truncated(f"payload needs {expected} bytes, got {len(data)}")
    if len(data) > expected:
        raise TrailingData(f"{len(data) - expected} trailing bytes after pixel data")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=16).copy()
    return IdxImages(count=count, rows=rows, cols=cols, pixels=pixels)


def serialize_idx_images(images):
    header = struct.pack(">IIII", IDX_IMAGES_MAGIC, images.count, images.rows, images.cols)
    return header + images.pixels.astype(np.uint8).tobytes()


def load_idx_images(path):
    try:
        with open(path, "rb") as fh:
            return parse_idx_images(fh.read())
    except IdxFormatError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def image_to_signal(img):
    """Vectorize one image into a [0, 1]-scaled signal.

    Returns (signal, s) where s is the number of nonzero pixels.
    """
    img = np.asarray(img, dtype=np.uint8)
    signal = img.reshape(-1).astype(np.float64) / 255.0
    return signal, int(np.count_nonzero(signal))
